#include "metamat/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metamat/error.hpp"

namespace metamat {

namespace {

constexpr std::string_view kValuesHeader = "voxel_index,freq_index,re,im";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t parse_index(std::string_view text) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw Error("invalid index '" + std::string(text) + "'");
    return v;
}

template <typename T>
std::array<T, 3> json_triple(const nlohmann::json& j, std::string_view key) {
    if (!j.contains(key)) throw Error("grid descriptor is missing '" + std::string(key) + "'");
    const auto& arr = j.at(std::string(key));
    if (!arr.is_array() || arr.size() != 3)
        throw Error("grid descriptor '" + std::string(key) + "' must be a 3-element array");
    std::array<T, 3> out{};
    for (std::size_t a = 0; a < 3; ++a) {
        if (!arr[a].is_number())
            throw Error("grid descriptor '" + std::string(key) + "' must hold numbers");
        if constexpr (std::is_integral_v<T>) {
            if (!arr[a].is_number_integer() || arr[a].get<long long>() < 1)
                throw Error("grid descriptor 'dims' must hold positive integers");
            out[a] = static_cast<T>(arr[a].get<long long>());
        } else {
            out[a] = arr[a].get<T>();
        }
    }
    return out;
}

SpatialGrid parse_grid(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("grid descriptor must be a JSON object");
    SpatialGrid grid;
    grid.origin = json_triple<double>(j, "origin");
    grid.spacing = json_triple<double>(j, "spacing");
    grid.dims = json_triple<std::size_t>(j, "dims");
    grid.validate();
    return grid;
}

nlohmann::json grid_json(const SpatialGrid& grid) {
    return {{"origin", vec3_json(grid.origin)},
            {"spacing", vec3_json(grid.spacing)},
            {"dims", {grid.dims[0], grid.dims[1], grid.dims[2]}}};
}

void write_stream_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error("invalid number '" + std::string(text) + "'");
    return v;
}

nlohmann::json vec3_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

Vec3 parse_vec3(const nlohmann::json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 3)
        throw Error(std::string(what) + " must be a 3-element array");
    Vec3 out{};
    for (std::size_t a = 0; a < 3; ++a) {
        if (!j[a].is_number()) throw Error(std::string(what) + " must hold numbers");
        out[a] = j[a].get<double>();
    }
    return out;
}

GridDescriptor parse_descriptor(const nlohmann::json& j) {
    GridDescriptor desc;
    desc.grid = parse_grid(j);
    if (!j.contains("frequencies") || !j.at("frequencies").is_array())
        throw Error("grid descriptor is missing 'frequencies' array");
    for (const auto& w : j.at("frequencies")) {
        if (!w.is_number()) throw Error("grid descriptor 'frequencies' must hold numbers");
        desc.freqs.samples.push_back(w.get<double>());
    }
    desc.freqs.validate();
    return desc;
}

nlohmann::json descriptor_json(const SpatialGrid& grid, const FrequencyGrid& freqs) {
    nlohmann::json j = grid_json(grid);
    j["frequencies"] = freqs.samples;
    return j;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    write_stream_file(path, std::string(text));
}

GridDescriptor load_descriptor(const std::filesystem::path& path) {
    try {
        return parse_descriptor(read_json_file(path));
    } catch (const Error& e) {
        throw Error("malformed descriptor '" + path.string() + "': " + e.what());
    }
}

SampledField read_values_csv(std::istream& in, const GridDescriptor& desc) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kValuesHeader)
        throw Error("values file must start with header '" + std::string(kValuesHeader) + "'");

    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) rows.push_back(line);
    }

    const std::size_t nf = desc.freqs.size();
    const std::size_t expected = desc.grid.voxel_count() * nf;
    if (rows.size() != expected) {
        std::ostringstream os;
        os << "expected " << expected << " rows, got " << rows.size();
        throw Error(os.str());
    }

    SampledField field(desc.grid, desc.freqs);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t row_number = r + 1;
        auto fail = [&](const std::string& why) {
            std::ostringstream os;
            os << "row " << row_number << ": " << why;
            throw Error(os.str());
        };
        const auto cols = split_commas(rows[r]);
        if (cols.size() != 4) fail("expected 4 columns");
        std::size_t voxel = 0;
        std::size_t freq = 0;
        double re = 0.0;
        double im = 0.0;
        try {
            voxel = parse_index(cols[0]);
            freq = parse_index(cols[1]);
            re = parse_double(cols[2]);
            im = parse_double(cols[3]);
        } catch (const Error& e) {
            fail(e.what());
        }
        if (voxel != r / nf || freq != r % nf) {
            std::ostringstream os;
            os << "out of order, expected voxel " << r / nf << " frequency " << r % nf;
            fail(os.str());
        }
        if (!std::isfinite(re) || !std::isfinite(im)) fail("non-finite value");
        field.values[r] = Complex(re, im);
    }
    return field;
}

void write_values_csv(std::ostream& out, const SampledField& field) {
    out << kValuesHeader << '\n';
    const std::size_t nf = field.freqs.size();
    for (std::size_t s = 0; s < field.values.size(); ++s) {
        out << s / nf << ',' << s % nf << ',' << format_double(field.values[s].real()) << ','
            << format_double(field.values[s].imag()) << '\n';
    }
}

SampledField load_field(const std::filesystem::path& descriptor_path,
                        const std::filesystem::path& values_path) {
    const GridDescriptor desc = load_descriptor(descriptor_path);
    std::ifstream in(values_path);
    if (!in) throw Error("cannot open '" + values_path.string() + "'");
    try {
        return read_values_csv(in, desc);
    } catch (const Error& e) {
        throw Error("'" + values_path.string() + "': " + e.what());
    }
}

void save_field(const SampledField& field, const std::filesystem::path& descriptor_path,
                const std::filesystem::path& values_path) {
    write_stream_file(descriptor_path, descriptor_json(field.grid, field.freqs).dump(2) + "\n");
    std::ostringstream os;
    write_values_csv(os, field);
    write_stream_file(values_path, os.str());
}

nlohmann::json density_json(const DensityField& density) {
    nlohmann::json j = grid_json(density.grid);
    j["schema_version"] = 1;
    j["values"] = density.values;
    return j;
}

DensityField parse_density(const nlohmann::json& j) {
    DensityField density(parse_grid(j));
    if (!j.contains("values") || !j.at("values").is_array())
        throw Error("density file is missing 'values' array");
    density.values.clear();
    for (const auto& v : j.at("values")) {
        if (!v.is_number()) throw Error("density values must be numbers");
        density.values.push_back(v.get<double>());
    }
    density.validate();
    return density;
}

DensityField load_density(const std::filesystem::path& path) {
    try {
        return parse_density(read_json_file(path));
    } catch (const Error& e) {
        throw Error("density file '" + path.string() + "': " + e.what());
    }
}

void save_density(const DensityField& density, const std::filesystem::path& path) {
    write_stream_file(path, density_json(density).dump(2) + "\n");
}

}  // namespace metamat
