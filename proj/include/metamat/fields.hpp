#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace metamat {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Index3 = std::array<std::size_t, 3>;

double norm(const Vec3& v);

/// Regular voxel grid. Voxels are enumerated x-fastest:
/// linear = i + nx * (j + ny * k).
struct SpatialGrid {
    Vec3 origin{0.0, 0.0, 0.0};
    Vec3 spacing{1.0, 1.0, 1.0};
    Index3 dims{1, 1, 1};

    void validate() const;

    std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
    Index3 unflatten(std::size_t linear) const;
    std::size_t flatten(const Index3& ijk) const;
    Vec3 voxel_center(std::size_t linear) const;
    Vec3 extent() const;
    Vec3 upper() const;
    double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
    bool cubic_voxels() const;

    friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;
};

struct FrequencyGrid {
    std::vector<double> samples;

    void validate() const;
    std::size_t size() const { return samples.size(); }
    double front() const { return samples.front(); }
    double back() const { return samples.back(); }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

/// Complex samples over voxels x frequencies, voxel-major and frequency-minor.
struct SampledField {
    SpatialGrid grid;
    FrequencyGrid freqs;
    std::vector<Complex> values;

    SampledField() = default;
    SampledField(SpatialGrid g, FrequencyGrid f);
    SampledField(SpatialGrid g, FrequencyGrid f, std::vector<Complex> v);

    void validate() const;

    std::size_t offset(std::size_t voxel, std::size_t freq) const {
        return voxel * freqs.size() + freq;
    }
    Complex& at(std::size_t voxel, std::size_t freq) { return values[offset(voxel, freq)]; }
    const Complex& at(std::size_t voxel, std::size_t freq) const {
        return values[offset(voxel, freq)];
    }
    /// All frequencies of one voxel.
    std::span<const Complex> voxel_samples(std::size_t voxel) const {
        return std::span<const Complex>(values).subspan(voxel * freqs.size(), freqs.size());
    }
};

/// Particle density N(x), one nonnegative value per voxel, independent of frequency.
struct DensityField {
    SpatialGrid grid;
    std::vector<double> values;

    DensityField() = default;
    explicit DensityField(SpatialGrid g);
    DensityField(SpatialGrid g, std::vector<double> v);

    void validate() const;
    /// Exact integral of the piecewise-constant field over the whole grid.
    double total() const;
};

struct MediumConstants {
    double c = 1.0;  // free-space wave speed

    void validate() const;
};

/// Euclidean diagonal of a box with the given edge lengths.
double box_diagonal(const Vec3& extent);

/// Diameter of the grid's bounding box.
double domain_diameter(const SpatialGrid& grid);

void require_same_support(const SampledField& a, const SampledField& b);

}  // namespace metamat
