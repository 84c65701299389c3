#include "metamat/fields.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "metamat/error.hpp"

namespace metamat {

double norm(const Vec3& v) { return std::hypot(v[0], v[1], v[2]); }

void SpatialGrid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (!std::isfinite(origin[a])) throw Error("grid origin must be finite");
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            throw Error("grid spacing must be positive and finite");
        if (dims[a] < 1) throw Error("grid dims must be >= 1");
    }
}

Index3 SpatialGrid::unflatten(std::size_t linear) const {
    const std::size_t i = linear % dims[0];
    const std::size_t rest = linear / dims[0];
    return {i, rest % dims[1], rest / dims[1]};
}

std::size_t SpatialGrid::flatten(const Index3& ijk) const {
    return ijk[0] + dims[0] * (ijk[1] + dims[1] * ijk[2]);
}

Vec3 SpatialGrid::voxel_center(std::size_t linear) const {
    const Index3 ijk = unflatten(linear);
    Vec3 x{};
    for (int a = 0; a < 3; ++a)
        x[a] = origin[a] + (static_cast<double>(ijk[a]) + 0.5) * spacing[a];
    return x;
}

Vec3 SpatialGrid::extent() const {
    return {dims[0] * spacing[0], dims[1] * spacing[1], dims[2] * spacing[2]};
}

Vec3 SpatialGrid::upper() const {
    const Vec3 e = extent();
    return {origin[0] + e[0], origin[1] + e[1], origin[2] + e[2]};
}

bool SpatialGrid::cubic_voxels() const {
    return spacing[0] == spacing[1] && spacing[1] == spacing[2];
}

void FrequencyGrid::validate() const {
    if (samples.empty()) throw Error("frequency grid is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i] > 0.0) || !std::isfinite(samples[i])) {
            std::ostringstream os;
            os << "frequency " << i << " must be positive and finite";
            throw Error(os.str());
        }
        if (i > 0 && !(samples[i] > samples[i - 1])) {
            std::ostringstream os;
            os << "frequencies must be strictly increasing (index " << i << ")";
            throw Error(os.str());
        }
    }
}

SampledField::SampledField(SpatialGrid g, FrequencyGrid f)
    : grid(std::move(g)), freqs(std::move(f)) {
    values.assign(grid.voxel_count() * freqs.size(), Complex{});
}

SampledField::SampledField(SpatialGrid g, FrequencyGrid f, std::vector<Complex> v)
    : grid(std::move(g)), freqs(std::move(f)), values(std::move(v)) {}

void SampledField::validate() const {
    grid.validate();
    freqs.validate();
    const std::size_t expected = grid.voxel_count() * freqs.size();
    if (values.size() != expected) {
        std::ostringstream os;
        os << "field has " << values.size() << " values, expected " << expected;
        throw Error(os.str());
    }
    for (std::size_t s = 0; s < values.size(); ++s) {
        if (!std::isfinite(values[s].real()) || !std::isfinite(values[s].imag())) {
            std::ostringstream os;
            os << "non-finite field value at voxel " << s / freqs.size() << ", frequency "
               << s % freqs.size();
            throw Error(os.str());
        }
    }
}

DensityField::DensityField(SpatialGrid g) : grid(std::move(g)) {
    values.assign(grid.voxel_count(), 0.0);
}

DensityField::DensityField(SpatialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {}

void DensityField::validate() const {
    grid.validate();
    if (values.size() != grid.voxel_count()) {
        std::ostringstream os;
        os << "density has " << values.size() << " values, expected " << grid.voxel_count();
        throw Error(os.str());
    }
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (!std::isfinite(values[v]) || values[v] < 0.0) {
            std::ostringstream os;
            os << "density at voxel " << v << " must be finite and >= 0";
            throw Error(os.str());
        }
    }
}

double DensityField::total() const {
    return std::accumulate(values.begin(), values.end(), 0.0) * grid.voxel_volume();
}

void MediumConstants::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error("wave speed c must be positive");
}

double box_diagonal(const Vec3& extent) { return norm(extent); }

double domain_diameter(const SpatialGrid& grid) { return box_diagonal(grid.extent()); }

void require_same_support(const SampledField& a, const SampledField& b) {
    if (!(a.grid == b.grid)) throw Error("fields are defined on different spatial grids");
    if (!(a.freqs == b.freqs)) throw Error("fields are defined on different frequency grids");
}

}  // namespace metamat
