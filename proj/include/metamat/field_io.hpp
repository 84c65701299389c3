#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "metamat/fields.hpp"

namespace metamat {

/// Grid descriptor file: {origin, spacing, dims, frequencies}.
struct GridDescriptor {
    SpatialGrid grid;
    FrequencyGrid freqs;
};

GridDescriptor parse_descriptor(const nlohmann::json& j);
nlohmann::json descriptor_json(const SpatialGrid& grid, const FrequencyGrid& freqs);
GridDescriptor load_descriptor(const std::filesystem::path& path);

/// Reads the "voxel_index,freq_index,re,im" CSV. Rows must follow the
/// voxel-major, frequency-minor enumeration.
SampledField read_values_csv(std::istream& in, const GridDescriptor& desc);
void write_values_csv(std::ostream& out, const SampledField& field);

SampledField load_field(const std::filesystem::path& descriptor_path,
                        const std::filesystem::path& values_path);
void save_field(const SampledField& field, const std::filesystem::path& descriptor_path,
                const std::filesystem::path& values_path);

/// Density files are a single JSON document:
/// {schema_version, origin, spacing, dims, values:[...]}, values x-fastest.
nlohmann::json density_json(const DensityField& density);
DensityField parse_density(const nlohmann::json& j);
DensityField load_density(const std::filesystem::path& path);
void save_density(const DensityField& density, const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

nlohmann::json vec3_json(const Vec3& v);
Vec3 parse_vec3(const nlohmann::json& j, std::string_view what);

}  // namespace metamat
