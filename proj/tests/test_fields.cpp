#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "metamat/error.hpp"
#include "metamat/field_io.hpp"
#include "metamat/fields.hpp"
#include "test_support.hpp"

using namespace metamat;
using metamat::testing::TempDir;
using metamat::testing::write_file;

namespace {

const char* kSingleVoxelDescriptor =
    R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[1,1,1],"frequencies":[1.0]})";
const char* kTwoVoxelDescriptor =
    R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[2,1,1],"frequencies":[1.0,2.0]})";

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("load_field ingests a single value") {
    TempDir dir("fields");
    write_file(dir / "g.json", kSingleVoxelDescriptor);
    write_file(dir / "v.csv", "voxel_index,freq_index,re,im\n0,0,1.0,0.0\n");
    const SampledField f = load_field(dir / "g.json", dir / "v.csv");
    REQUIRE(f.values.size() == 1);
    CHECK(f.values[0] == Complex(1.0, 0.0));
}

TEST_CASE("load_field reports row-count mismatch") {
    TempDir dir("fields");
    write_file(dir / "g.json", kTwoVoxelDescriptor);
    write_file(dir / "v.csv", "voxel_index,freq_index,re,im\n0,0,1,0\n0,1,1,0\n1,0,1,0\n");
    const std::string msg = error_of([&] { load_field(dir / "g.json", dir / "v.csv"); });
    CHECK(msg.find("expected 4 rows, got 3") != std::string::npos);
}

TEST_CASE("load_field rejects non-finite values with the row number") {
    TempDir dir("fields");
    write_file(dir / "g.json", kTwoVoxelDescriptor);
    write_file(dir / "v.csv",
               "voxel_index,freq_index,re,im\n0,0,1,0\n0,1,nan,0\n1,0,1,0\n1,1,1,0\n");
    const std::string msg = error_of([&] { load_field(dir / "g.json", dir / "v.csv"); });
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("non-finite") != std::string::npos);
}

TEST_CASE("load_field rejects out-of-order rows and bad headers") {
    TempDir dir("fields");
    write_file(dir / "g.json", kTwoVoxelDescriptor);
    write_file(dir / "v.csv", "voxel_index,freq_index,re,im\n0,1,1,0\n0,0,1,0\n1,0,1,0\n1,1,1,0\n");
    CHECK(error_of([&] { load_field(dir / "g.json", dir / "v.csv"); }).find("row 1") !=
          std::string::npos);
    write_file(dir / "w.csv", "a,b,c,d\n0,0,1,0\n");
    CHECK_THROWS_AS(load_field(dir / "g.json", dir / "w.csv"), Error);
}

TEST_CASE("malformed descriptors are rejected") {
    TempDir dir("fields");
    const char* bad[] = {
        R"({"origin":[0,0,0],"spacing":[1,1,1],"frequencies":[1]})",
        R"({"origin":[0,0,0],"spacing":[1,-1,1],"dims":[1,1,1],"frequencies":[1]})",
        R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[1,0,1],"frequencies":[1]})",
        R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[1,1,1],"frequencies":[2,1]})",
        R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[1,1,1],"frequencies":[]})",
        R"({"origin":[0,0],"spacing":[1,1,1],"dims":[1,1,1],"frequencies":[1]})",
        R"(not json)",
    };
    for (const char* text : bad) {
        write_file(dir / "g.json", text);
        CHECK_THROWS_AS(load_descriptor(dir / "g.json"), Error);
    }
}

TEST_CASE("domain_diameter") {
    SpatialGrid unit;
    CHECK(domain_diameter(unit) == doctest::Approx(std::sqrt(3.0)));
    CHECK(box_diagonal({3.0, 4.0, 0.0}) == doctest::Approx(5.0));
    SpatialGrid two;
    two.spacing = {2.0, 2.0, 2.0};
    CHECK(domain_diameter(two) == doctest::Approx(2.0 * std::sqrt(3.0)));
}

TEST_CASE("voxel enumeration is x-fastest") {
    SpatialGrid g;
    g.origin = {1.0, 2.0, 3.0};
    g.spacing = {0.5, 1.0, 2.0};
    g.dims = {3, 2, 2};
    CHECK(g.flatten({1, 0, 0}) == 1);
    CHECK(g.flatten({0, 1, 0}) == 3);
    CHECK(g.flatten({0, 0, 1}) == 6);
    for (std::size_t v = 0; v < g.voxel_count(); ++v) CHECK(g.flatten(g.unflatten(v)) == v);
    const Vec3 c = g.voxel_center(g.flatten({2, 1, 1}));
    CHECK(c[0] == doctest::Approx(1.0 + 2.5 * 0.5));
    CHECK(c[1] == doctest::Approx(2.0 + 1.5));
    CHECK(c[2] == doctest::Approx(3.0 + 3.0));
}

TEST_CASE("save then load reproduces values bit-exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    TempDir dir("roundtrip");
    for (int trial = 0; trial < 20; ++trial) {
        SpatialGrid g;
        g.origin = {mant(rng), mant(rng), mant(rng)};
        g.spacing = {0.1 + std::abs(mant(rng)), 0.3, 1.0 / 3.0};
        g.dims = {2, 3, 1 + static_cast<std::size_t>(trial % 3)};
        FrequencyGrid fr{{0.1, 1.0 / 7.0, 2.5}};
        SampledField f(g, fr);
        for (auto& v : f.values)
            v = Complex(std::ldexp(mant(rng), expo(rng)), std::ldexp(mant(rng), expo(rng) / 10));
        f.values[0] = Complex(std::numeric_limits<double>::denorm_min(), -0.0);
        save_field(f, dir / "g.json", dir / "v.csv");
        const SampledField back = load_field(dir / "g.json", dir / "v.csv");
        REQUIRE(back.grid == f.grid);
        REQUIRE(back.freqs == f.freqs);
        REQUIRE(back.values.size() == f.values.size());
        CHECK(std::memcmp(back.values.data(), f.values.data(),
                          f.values.size() * sizeof(Complex)) == 0);
    }
}

TEST_CASE("density files round-trip and validate") {
    TempDir dir("density");
    DensityField d(metamat::testing::unit_grid(2), {0.0, 1.0 / 3.0, 2.0, 1e-300, 5.5, 6, 7, 8});
    save_density(d, dir / "n.json");
    const DensityField back = load_density(dir / "n.json");
    CHECK(back.grid == d.grid);
    CHECK(back.values == d.values);
    CHECK(d.total() == doctest::Approx((1.0 / 3.0 + 2.0 + 1e-300 + 5.5 + 6.0 + 7.0 + 8.0) / 8.0));

    write_file(dir / "bad.json",
               R"({"origin":[0,0,0],"spacing":[1,1,1],"dims":[1,1,1],"values":[-1]})");
    CHECK_THROWS_AS(load_density(dir / "bad.json"), Error);
}

TEST_CASE("format_double and parse_double") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 1e300, 6.02214076e23}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(parse_double(" +1.5 ") == 1.5);
    CHECK_THROWS_AS(parse_double("1.5x"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
}
