#include "metamat/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metamat/error.hpp"
#include "metamat/field_io.hpp"

namespace metamat {

namespace {

// Relative slack for floating-point comparisons against exact geometric bounds.
constexpr double kGeometrySlack = 1e-12;

struct AxisOverlap {
    std::size_t index;
    double length;
};

std::vector<AxisOverlap> axis_overlaps(const SpatialGrid& grid, int axis, double lo, double hi) {
    std::vector<AxisOverlap> out;
    const double o = grid.origin[axis];
    const double h = grid.spacing[axis];
    const auto n = static_cast<std::ptrdiff_t>(grid.dims[axis]);
    const auto first = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor((lo - o) / h)), 0, n - 1);
    const auto last = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor((hi - o) / h)), 0, n - 1);
    for (std::ptrdiff_t i = first; i <= last; ++i) {
        const double vlo = o + static_cast<double>(i) * h;
        const double len = std::min(hi, vlo + h) - std::max(lo, vlo);
        if (len > 0.0) out.push_back({static_cast<std::size_t>(i), len});
    }
    return out;
}

std::size_t nearest_voxel(const SpatialGrid& grid, const Vec3& p) {
    Index3 ijk{};
    for (int a = 0; a < 3; ++a) {
        const double f = std::floor((p[a] - grid.origin[a]) / grid.spacing[a]);
        const double hi = static_cast<double>(grid.dims[a] - 1);
        ijk[a] = static_cast<std::size_t>(std::clamp(f, 0.0, hi));
    }
    return grid.flatten(ijk);
}

std::vector<Vec3> lattice_positions(const Vec3& center, double d, std::size_t m,
                                    std::uint64_t count) {
    std::vector<Vec3> out;
    out.reserve(count);
    const double half = 0.5 * static_cast<double>(m - 1);
    for (std::size_t k = 0; k < m && out.size() < count; ++k)
        for (std::size_t j = 0; j < m && out.size() < count; ++j)
            for (std::size_t i = 0; i < m && out.size() < count; ++i)
                out.push_back({center[0] + (static_cast<double>(i) - half) * d,
                               center[1] + (static_cast<double>(j) - half) * d,
                               center[2] + (static_cast<double>(k) - half) * d});
    return out;
}

double distance(const Vec3& a, const Vec3& b) {
    return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

}  // namespace

std::uint64_t nearest_integer(double b) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw Error("nearest_integer needs a finite b >= 0");
    const double whole = std::floor(b);
    const double frac = b - whole;
    return static_cast<std::uint64_t>(whole) + (frac >= 0.5 ? 1u : 0u);
}

double Box::volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }

bool Box::contains_strictly(const Vec3& p) const {
    for (int a = 0; a < 3; ++a)
        if (!(p[a] > lo[a] && p[a] < hi[a])) return false;
    return true;
}

CubePartition partition_domain(const SpatialGrid& grid, double cube_side) {
    grid.validate();
    if (!(cube_side > 0.0) || !std::isfinite(cube_side)) throw Error("cube_side must be > 0");
    CubePartition part;
    part.cube_side = cube_side;
    const Vec3 extent = grid.extent();
    for (int a = 0; a < 3; ++a) {
        const double ratio = extent[a] / cube_side;
        const double count = std::round(ratio);
        if (count < 1.0 || std::abs(count - ratio) > 1e-9 * std::max(1.0, ratio)) {
            std::ostringstream os;
            os << "cube_side " << cube_side << " does not tile the domain extent " << extent[a]
               << " along axis " << a;
            throw Error(os.str());
        }
        part.counts[a] = static_cast<std::size_t>(count);
    }
    const std::size_t total = part.counts[0] * part.counts[1] * part.counts[2];
    part.cubes.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const std::size_t i = idx % part.counts[0];
        const std::size_t j = (idx / part.counts[0]) % part.counts[1];
        const std::size_t k = idx / (part.counts[0] * part.counts[1]);
        const Index3 ijk{i, j, k};
        Cube c;
        c.index = idx;
        for (int a = 0; a < 3; ++a) {
            c.bounds.lo[a] = grid.origin[a] + static_cast<double>(ijk[a]) * cube_side;
            c.bounds.hi[a] = c.bounds.lo[a] + cube_side;
            c.center[a] = grid.origin[a] + (static_cast<double>(ijk[a]) + 0.5) * cube_side;
        }
        part.cubes.push_back(c);
    }
    return part;
}

double cube_integral(const DensityField& density, const Box& box) {
    const SpatialGrid& grid = density.grid;
    const Vec3 upper = grid.upper();
    for (int a = 0; a < 3; ++a) {
        const double tol = 1e-9 * std::max(1.0, upper[a] - grid.origin[a]);
        if (box.lo[a] < grid.origin[a] - tol || box.hi[a] > upper[a] + tol || box.hi[a] < box.lo[a])
            throw Error("cube outside grid");
    }
    const auto ox = axis_overlaps(grid, 0, box.lo[0], box.hi[0]);
    const auto oy = axis_overlaps(grid, 1, box.lo[1], box.hi[1]);
    const auto oz = axis_overlaps(grid, 2, box.lo[2], box.hi[2]);
    double sum = 0.0;
    for (const auto& z : oz)
        for (const auto& y : oy)
            for (const auto& x : ox)
                sum += density.values[grid.flatten({x.index, y.index, z.index})] * x.length *
                       y.length * z.length;
    return sum;
}

double ball_spacing(double radius_a, double kappa) { return kappa * std::cbrt(radius_a); }

std::size_t lattice_points_per_axis(double cube_side, double spacing_d) {
    // Largest m with (m - 1) d < side.
    auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(cube_side / spacing_d)));
    while (m > 1 && static_cast<double>(m - 1) * spacing_d >= cube_side) --m;
    while (static_cast<double>(m) * spacing_d < cube_side) ++m;
    return m;
}

std::uint64_t EmbeddingManifest::total_balls() const {
    std::uint64_t total = 0;
    for (const auto& c : cubes) total += c.balls.size();
    return total;
}

Box EmbeddingManifest::cube_bounds(const CubeEmbedding& cube) const {
    Box b;
    for (int a = 0; a < 3; ++a) {
        b.lo[a] = cube.center[a] - 0.5 * cube_side;
        b.hi[a] = cube.center[a] + 0.5 * cube_side;
    }
    return b;
}

EmbeddingManifest plan_embedding(const DensityField& density, const SampledField& h,
                                 double radius_a, double kappa, std::optional<double> cube_side) {
    density.validate();
    h.validate();
    if (!(density.grid == h.grid)) throw Error("density and h use different grids");
    if (!(radius_a > 0.0) || !std::isfinite(radius_a)) throw Error("radius_a must be > 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error("kappa must be > 0");

    EmbeddingManifest m;
    m.radius_a = radius_a;
    m.kappa = kappa;
    m.spacing_d = ball_spacing(radius_a, kappa);
    if (!(2.0 * radius_a < m.spacing_d)) {
        std::ostringstream os;
        os << "geometry violation: 2a = " << 2.0 * radius_a << " >= d = " << m.spacing_d;
        throw Error(os.str());
    }
    if (cube_side) {
        m.cube_side = *cube_side;
    } else {
        if (!density.grid.cubic_voxels())
            throw Error("cube_side is required when voxels are not cubic");
        m.cube_side = density.grid.spacing[0];
    }
    if (!(m.cube_side > m.spacing_d)) {
        std::ostringstream os;
        os << "cube_side " << m.cube_side << " must exceed ball spacing d = " << m.spacing_d;
        throw Error(os.str());
    }

    const CubePartition part = partition_domain(density.grid, m.cube_side);
    std::vector<double> integrals;
    integrals.reserve(part.cubes.size());
    for (const Cube& cube : part.cubes) integrals.push_back(cube_integral(density, cube.bounds));

    auto first_overflow = [&](double a, double d) -> std::optional<std::size_t> {
        const std::size_t per_axis = lattice_points_per_axis(m.cube_side, d);
        const std::uint64_t capacity = static_cast<std::uint64_t>(per_axis) * per_axis * per_axis;
        for (std::size_t j = 0; j < integrals.size(); ++j)
            if (nearest_integer(integrals[j] / a) > capacity) return j;
        return std::nullopt;
    };

    if (const auto bad = first_overflow(radius_a, m.spacing_d)) {
        const std::size_t per_axis = lattice_points_per_axis(m.cube_side, m.spacing_d);
        std::ostringstream os;
        os << "capacity exceeded in cube " << *bad << ": nu = "
           << nearest_integer(integrals[*bad] / radius_a) << " balls but the lattice of pitch "
           << m.spacing_d << " holds " << per_axis * per_axis * per_axis;
        bool found = false;
        for (int step = 1; step <= 320 && !found; ++step) {
            const double a = radius_a * std::exp2(-step / 16.0);
            const double d = ball_spacing(a, kappa);
            if (2.0 * a < d && m.cube_side > d && !first_overflow(a, d)) {
                os << "; smallest change that fits: radius_a = " << a;
                found = true;
            }
        }
        if (!found) os << "; no smaller radius_a fits, reduce kappa or the density";
        throw Error(os.str());
    }

    const std::size_t per_axis = lattice_points_per_axis(m.cube_side, m.spacing_d);
    m.cubes.reserve(part.cubes.size());
    for (std::size_t j = 0; j < part.cubes.size(); ++j) {
        const Cube& cube = part.cubes[j];
        CubeEmbedding e;
        e.index = cube.index;
        e.center = cube.center;
        e.nu = nearest_integer(integrals[j] / radius_a);
        e.balls = lattice_positions(cube.center, m.spacing_d, per_axis, e.nu);
        const std::size_t voxel = nearest_voxel(h.grid, cube.center);
        for (std::size_t f = 0; f < h.freqs.size(); ++f)
            e.zeta.push_back({h.freqs.samples[f], h.at(voxel, f) / radius_a});
        m.cubes.push_back(std::move(e));
    }
    return m;
}

ManifestVerification verify_manifest(const EmbeddingManifest& manifest,
                                     const DensityField& density) {
    ManifestVerification v;
    const double a = manifest.radius_a;
    const double d = manifest.spacing_d;
    v.min_spacing = std::numeric_limits<double>::infinity();

    if (!(2.0 * a < d)) {
        v.geometry_ok = false;
        v.issues.push_back("geometry violation: 2a >= d");
    }
    if (std::abs(d - ball_spacing(a, manifest.kappa)) > kGeometrySlack * d) {
        v.geometry_ok = false;
        v.issues.push_back("spacing_d differs from kappa * a^(1/3)");
    }

    for (const CubeEmbedding& cube : manifest.cubes) {
        CubeVerification cv;
        cv.index = cube.index;
        const Box bounds = manifest.cube_bounds(cube);
        cv.integral = cube_integral(density, bounds);
        cv.ball_count = cube.balls.size();
        cv.deviation = std::abs(a * static_cast<double>(cv.ball_count) - cv.integral);
        cv.relative_deviation = cv.integral > 0.0 ? cv.deviation / cv.integral
                                : cv.deviation == 0.0
                                    ? 0.0
                                    : std::numeric_limits<double>::infinity();
        cv.count_matches_nu = cv.ball_count == cube.nu;
        cv.within_rounding = cv.deviation <= 0.5 * a + kGeometrySlack * (a + cv.integral);
        cv.min_spacing = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < cube.balls.size(); ++p) {
            if (!bounds.contains_strictly(cube.balls[p])) cv.centers_inside = false;
            for (std::size_t q = p + 1; q < cube.balls.size(); ++q)
                cv.min_spacing = std::min(cv.min_spacing, distance(cube.balls[p], cube.balls[q]));
        }

        std::ostringstream where;
        where << "cube " << cube.index << ": ";
        if (!cv.count_matches_nu)
            v.issues.push_back(where.str() + "ball count differs from nu");
        if (!cv.within_rounding)
            v.issues.push_back(where.str() + "a * count deviates from the density integral by "
                               "more than a/2");
        if (!cv.centers_inside) v.issues.push_back(where.str() + "ball center outside cube");
        if (cv.min_spacing < d * (1.0 - kGeometrySlack))
            v.issues.push_back(where.str() + "pairwise spacing below d");

        v.counts_ok = v.counts_ok && cv.count_matches_nu && cv.within_rounding;
        v.geometry_ok = v.geometry_ok && cv.centers_inside;
        v.min_spacing = std::min(v.min_spacing, cv.min_spacing);
        v.total_integral += cv.integral;
        v.total_balls += cv.ball_count;
        v.cubes.push_back(cv);
    }

    v.spacing_ok = v.min_spacing >= d * (1.0 - kGeometrySlack);
    v.total_deviation = std::abs(a * static_cast<double>(v.total_balls) - v.total_integral);
    v.relative_total_deviation =
        v.total_integral > 0.0 ? v.total_deviation / v.total_integral : v.total_deviation;
    v.deviation_bound = static_cast<double>(manifest.cubes.size()) * 0.5 * a;
    const bool total_ok =
        v.total_deviation <= v.deviation_bound + kGeometrySlack * (a + v.total_integral);
    if (!total_ok) v.issues.push_back("total deviation exceeds (number of cubes) * a / 2");
    v.passed = v.spacing_ok && v.geometry_ok && v.counts_ok && total_ok;
    return v;
}

nlohmann::json manifest_json(const EmbeddingManifest& manifest) {
    nlohmann::json cubes = nlohmann::json::array();
    for (const CubeEmbedding& c : manifest.cubes) {
        nlohmann::json balls = nlohmann::json::array();
        for (const Vec3& b : c.balls) balls.push_back(vec3_json(b));
        nlohmann::json zeta = nlohmann::json::array();
        for (const ZetaSample& z : c.zeta)
            zeta.push_back({{"omega", z.omega}, {"re", z.zeta.real()}, {"im", z.zeta.imag()}});
        cubes.push_back({{"index", c.index},
                         {"center", vec3_json(c.center)},
                         {"nu", c.nu},
                         {"balls", std::move(balls)},
                         {"zeta", std::move(zeta)}});
    }
    return {{"schema_version", 1},
            {"radius_a", manifest.radius_a},
            {"spacing_d", manifest.spacing_d},
            {"kappa", manifest.kappa},
            {"cube_side", manifest.cube_side},
            {"cubes", std::move(cubes)}};
}

EmbeddingManifest parse_manifest(const nlohmann::json& j) {
    try {
        EmbeddingManifest m;
        m.radius_a = j.at("radius_a").get<double>();
        m.spacing_d = j.at("spacing_d").get<double>();
        m.kappa = j.at("kappa").get<double>();
        m.cube_side = j.at("cube_side").get<double>();
        if (!(m.radius_a > 0.0) || !(m.spacing_d > 0.0) || !(m.kappa > 0.0) ||
            !(m.cube_side > 0.0))
            throw Error("manifest lengths must be positive");
        for (const auto& jc : j.at("cubes")) {
            CubeEmbedding c;
            c.index = jc.at("index").get<std::size_t>();
            c.center = parse_vec3(jc.at("center"), "cube center");
            c.nu = jc.at("nu").get<std::uint64_t>();
            for (const auto& b : jc.at("balls")) c.balls.push_back(parse_vec3(b, "ball center"));
            for (const auto& z : jc.at("zeta"))
                c.zeta.push_back({z.at("omega").get<double>(),
                                  Complex(z.at("re").get<double>(), z.at("im").get<double>())});
            m.cubes.push_back(std::move(c));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed manifest: ") + e.what());
    }
}

std::string manifest_csv(const EmbeddingManifest& manifest) {
    std::ostringstream os;
    os << "cube,ball,x,y,z\n";
    for (const CubeEmbedding& c : manifest.cubes)
        for (std::size_t b = 0; b < c.balls.size(); ++b)
            os << c.index << ',' << b << ',' << format_double(c.balls[b][0]) << ','
               << format_double(c.balls[b][1]) << ',' << format_double(c.balls[b][2]) << '\n';
    return os.str();
}

nlohmann::json verification_json(const ManifestVerification& v) {
    auto finite_or_null = [](double x) -> nlohmann::json {
        return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
    };
    nlohmann::json cubes = nlohmann::json::array();
    for (const CubeVerification& c : v.cubes)
        cubes.push_back({{"index", c.index},
                         {"integral", c.integral},
                         {"ball_count", c.ball_count},
                         {"deviation", c.deviation},
                         {"relative_deviation", finite_or_null(c.relative_deviation)},
                         {"count_matches_nu", c.count_matches_nu},
                         {"within_rounding", c.within_rounding},
                         {"centers_inside", c.centers_inside},
                         {"min_spacing", finite_or_null(c.min_spacing)}});
    return {{"schema_version", 1},
            {"passed", v.passed},
            {"total_integral", v.total_integral},
            {"total_balls", v.total_balls},
            {"total_deviation", v.total_deviation},
            {"relative_total_deviation", v.relative_total_deviation},
            {"deviation_bound", v.deviation_bound},
            {"min_spacing", finite_or_null(v.min_spacing)},
            {"spacing_ok", v.spacing_ok},
            {"geometry_ok", v.geometry_ok},
            {"counts_ok", v.counts_ok},
            {"issues", v.issues},
            {"cubes", std::move(cubes)}};
}

}  // namespace metamat
