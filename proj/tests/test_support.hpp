#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>

#include "metamat/fields.hpp"

namespace metamat::testing {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(std::string_view tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("metamat-" + std::string(tag) + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline SpatialGrid unit_grid(std::size_t n, double side = 1.0) {
    SpatialGrid g;
    g.dims = {n, n, n};
    const double h = side / static_cast<double>(n);
    g.spacing = {h, h, h};
    return g;
}

/// Random p with |p| in [0, max_modulus] and Im p <= 0.
inline Complex random_lower_half_plane(std::mt19937_64& rng, double max_modulus) {
    std::uniform_real_distribution<double> mod(0.0, max_modulus);
    std::uniform_real_distribution<double> ang(-3.141592653589793, 0.0);
    return std::polar(mod(rng), ang(rng));
}

}  // namespace metamat::testing
