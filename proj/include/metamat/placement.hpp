#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metamat/fields.hpp"

namespace metamat {

/// Nearest integer to b >= 0, ties rounded up.
std::uint64_t nearest_integer(double b);

struct Box {
    Vec3 lo{};
    Vec3 hi{};

    double volume() const;
    bool contains_strictly(const Vec3& p) const;
};

struct Cube {
    std::size_t index = 0;
    Vec3 center{};
    Box bounds;
};

/// Cubes of equal side tiling the grid's bounding box, enumerated x-fastest.
struct CubePartition {
    double cube_side = 0.0;
    Index3 counts{};
    std::vector<Cube> cubes;
};

CubePartition partition_domain(const SpatialGrid& grid, double cube_side);

/// Integral of the voxelwise-constant density over an axis-aligned box.
double cube_integral(const DensityField& density, const Box& box);

/// d = kappa * a^(1/3)
double ball_spacing(double radius_a, double kappa);

/// Lattice points of pitch d that fit strictly inside a segment of length side.
std::size_t lattice_points_per_axis(double cube_side, double spacing_d);

struct ZetaSample {
    double omega = 0.0;
    Complex zeta;
};

struct CubeEmbedding {
    std::size_t index = 0;
    Vec3 center{};
    std::uint64_t nu = 0;
    std::vector<Vec3> balls;
    std::vector<ZetaSample> zeta;
};

struct EmbeddingManifest {
    double radius_a = 0.0;
    double spacing_d = 0.0;
    double kappa = 1.0;
    double cube_side = 0.0;
    std::vector<CubeEmbedding> cubes;

    std::uint64_t total_balls() const;
    Box cube_bounds(const CubeEmbedding& cube) const;
};

/// Per cube: nu = [integral of N / a], balls on a simple-cubic sub-lattice of
/// pitch d centered in the cube, zeta = h(x_j, omega) / a from the voxel
/// nearest to the cube center. cube_side defaults to the voxel edge.
EmbeddingManifest plan_embedding(const DensityField& density, const SampledField& h,
                                 double radius_a, double kappa = 1.0,
                                 std::optional<double> cube_side = std::nullopt);

struct CubeVerification {
    std::size_t index = 0;
    double integral = 0.0;
    std::uint64_t ball_count = 0;
    double deviation = 0.0;           // |a * ball_count - integral|
    double relative_deviation = 0.0;  // deviation / integral, 0 when both vanish
    bool count_matches_nu = true;
    bool within_rounding = true;      // deviation <= a/2
    bool centers_inside = true;
    double min_spacing = 0.0;         // +inf with fewer than two balls
};

struct ManifestVerification {
    std::vector<CubeVerification> cubes;
    double total_integral = 0.0;
    std::uint64_t total_balls = 0;
    double total_deviation = 0.0;
    double relative_total_deviation = 0.0;
    double deviation_bound = 0.0;  // (number of cubes) * a / 2
    double min_spacing = 0.0;
    bool spacing_ok = true;
    bool geometry_ok = true;  // 2a < d and every center inside its cube
    bool counts_ok = true;    // per-cube count equals nu and within a/2
    bool passed = true;
    std::vector<std::string> issues;
};

ManifestVerification verify_manifest(const EmbeddingManifest& manifest,
                                     const DensityField& density);

nlohmann::json manifest_json(const EmbeddingManifest& manifest);
EmbeddingManifest parse_manifest(const nlohmann::json& j);
/// Flat geometry listing "cube,ball,x,y,z".
std::string manifest_csv(const EmbeddingManifest& manifest);
nlohmann::json verification_json(const ManifestVerification& v);

}  // namespace metamat
