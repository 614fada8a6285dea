#include <doctest.h>

#include "gravnav/gravmap.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace gravnav;
using namespace gravnav::gravmap;

namespace {

GravityGradientGrid make_constant_grid(double value, double origin_lat,
                                       double origin_lon, double d, int n,
                                       int priority = 0) {
    GravityGradientGrid g;
    g.origin_lat_deg = origin_lat;
    g.origin_lon_deg = origin_lon;
    g.d_lat_deg = g.d_lon_deg = d;
    g.n_rows = g.n_cols = n;
    g.priority = priority;
    g.values.assign(static_cast<std::size_t>(n) * n, value);
    return g;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

constexpr double kG = 6.67430e-11;

/// Down-positive gravity from one point mass, used for the finite-difference
/// gradient oracle.
double g_down(double mass_kg, double horiz_m, double obs_alt_m, double depth_m) {
    const double zsep = obs_alt_m + depth_m;
    const double r2 = horiz_m * horiz_m + zsep * zsep;
    return kG * mass_kg * zsep / (r2 * std::sqrt(r2));
}

}  // namespace

TEST_SUITE("gravmap") {

TEST_CASE("bilinear is exact at nodes and averages at cell centres") {
    GravityGradientGrid g = make_constant_grid(0.0, 10.0, 20.0, 0.5, 3);
    g.at(0, 0) = 1e-8;
    g.at(0, 1) = 2e-8;
    g.at(1, 0) = 3e-8;
    g.at(1, 1) = 4e-8;
    CHECK(bilinear(g, 10.0, 20.0) == 1e-8);
    CHECK(bilinear(g, 10.5, 20.0) == 3e-8);
    CHECK(bilinear(g, 10.25, 20.25) == doctest::Approx(2.5e-8).epsilon(1e-14));
}

TEST_CASE("bilinear matches a two-pass linear interpolation oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GravityGradientGrid g = make_constant_grid(0.0, -5.0, 7.0, 0.125, 9);
    for (auto& v : g.values) v = (unit(rng) - 0.5) * 1e-7;
    for (int i = 0; i < 200; ++i) {
        const double lat = -5.0 + unit(rng) * 8 * 0.125;
        const double lon = 7.0 + unit(rng) * 8 * 0.125;
        const double fr = (lat - g.origin_lat_deg) / g.d_lat_deg;
        const double fc = (lon - g.origin_lon_deg) / g.d_lon_deg;
        const int r = std::min(static_cast<int>(fr), g.n_rows - 2);
        const int c = std::min(static_cast<int>(fc), g.n_cols - 2);
        const double a = fr - r, b = fc - c;
        const double top = g.at(r, c) + (g.at(r, c + 1) - g.at(r, c)) * b;
        const double bottom =
            g.at(r + 1, c) + (g.at(r + 1, c + 1) - g.at(r + 1, c)) * b;
        const double oracle = top + (bottom - top) * a;
        CHECK(std::abs(bilinear(g, lat, lon) - oracle) < 1e-18);
    }
}

TEST_CASE("map set priority and fallback") {
    MapSet maps;
    maps.add(make_constant_grid(3.0e-6, 40.0, -10.0, 0.5, 41, 0));   // fallback
    maps.add(make_constant_grid(3.5e-6, 47.0, -3.0, 0.01, 101, 1));  // hi-res
    SUBCASE("constant interior value") {
        CHECK(maps.query_gradient({42.2, -8.3, 0.0}) == doctest::Approx(3.0e-6));
    }
    SUBCASE("high-priority tile wins inside its footprint") {
        CHECK(maps.query_gradient({47.5, -2.5, 0.0}) == doctest::Approx(3.5e-6));
    }
    SUBCASE("just outside the tile falls back") {
        // 1 m south of the tile edge
        CHECK(maps.query_gradient({47.0 - 1.0 / 111000.0, -2.5, 0.0}) ==
              doctest::Approx(3.0e-6));
    }
    SUBCASE("no coverage raises OutOfCoverage") {
        CHECK_THROWS_AS(maps.query_gradient({10.0, 10.0, 0.0}), OutOfCoverage);
    }
}

TEST_CASE("synthesize_grid with no masses is the uniform background") {
    GridExtent e{49.0, -2.0, 0.01, 0.01, 11, 11, 0};
    const GravityGradientGrid g = synthesize_grid({}, e, 3000.0);
    for (double v : g.values) CHECK(v == kBackgroundGradient);
}

TEST_CASE("point mass directly overhead adds 2Gm/d^3") {
    const double depth = 2500.0;
    const double mass = 5.0e12;
    const std::vector<PointMassSpec> masses{{50.0, 1.0, depth, mass}};
    GridExtent e{49.95, 0.95, 0.005, 0.005, 21, 21, 0};
    const GravityGradientGrid g = synthesize_grid(masses, e, 0.0);
    const double overhead = bilinear(g, 50.0, 1.0);
    CHECK(overhead - kBackgroundGradient ==
          doctest::Approx(2.0 * kG * mass / (depth * depth * depth)).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches central differences of g_z") {
    const double mass = 3.0e12;
    const double depth = 1800.0;
    for (double horiz : {0.0, 500.0, 1500.0, 4000.0}) {
        for (double alt : {0.0, 1000.0, 3000.0}) {
            const double zsep = alt + depth;
            const double r2 = horiz * horiz + zsep * zsep;
            const double analytic =
                kG * mass * (3.0 * zsep * zsep - r2) / (r2 * r2 * std::sqrt(r2));
            const double h = 0.05;
            // gradient positive when gravity increases downward
            const double numeric =
                (g_down(mass, horiz, alt - h, depth) -
                 g_down(mass, horiz, alt + h, depth)) / (2.0 * h);
            CHECK(analytic == doctest::Approx(numeric).epsilon(1e-6));
        }
    }
}

TEST_CASE("mirrored mass pair gives an east/west symmetric field") {
    const std::vector<PointMassSpec> masses{
        {50.0, 0.9, 2000.0, 4.0e12},
        {50.0, 1.1, 2000.0, 4.0e12},
    };
    GridExtent e{49.9, 0.8, 0.004, 0.004, 51, 101, 0};
    const GravityGradientGrid g = synthesize_grid(masses, e, 0.0);
    for (int c = 0; c < 40; ++c) {
        for (int r = 0; r < g.n_rows; r += 10) {
            CHECK(g.at(r, c) ==
                  doctest::Approx(g.at(r, g.n_cols - 1 - c)).epsilon(1e-6));
        }
    }
}

TEST_CASE("synthesize rejects nodes touching a mass") {
    const std::vector<PointMassSpec> masses{{50.0, 1.0, 0.5, 1.0e9}};
    GridExtent e{49.99, 0.99, 0.001, 0.001, 21, 21, 0};
    CHECK_THROWS_AS(synthesize_grid(masses, e, 0.0), DegenerateGeometry);
}

TEST_CASE("interpolated synthetic map set tracks the direct analytic sum") {
    // grid spacing ~1/10 of the mass separation scale
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PointMassSpec> masses;
    for (int i = 0; i < 6; ++i) {
        masses.push_back({49.97 + 0.06 * unit(rng), 0.97 + 0.06 * unit(rng),
                          2000.0, (unit(rng) < 0.5 ? -1.0 : 1.0) * 4.0e12});
    }
    GridExtent e{49.9, 0.9, 0.0018, 0.0018, 112, 112, 0};
    MapSet maps;
    maps.add(synthesize_grid(masses, e, 0.0));

    double peak = 0.0;
    for (const auto& m : masses) {
        peak = std::max(peak, std::abs(2.0 * kG * m.mass_kg / std::pow(2000.0, 3)));
    }
    for (int i = 0; i < 300; ++i) {
        const geodesy::GeodeticPosition pos{49.92 + 0.15 * unit(rng),
                                            0.92 + 0.15 * unit(rng), 0.0};
        const double direct = kBackgroundGradient + point_mass_gradient(masses, pos);
        const double interp = maps.query_gradient(pos);
        CHECK(std::abs(interp - direct) < 0.02 * peak);
    }
}

TEST_CASE("anomaly mean tends to zero on a wide grid") {
    const std::vector<PointMassSpec> masses{{50.0, 1.0, 1500.0, 6.0e12}};
    // ~10x wider than the mass depth
    GridExtent e{49.93, 0.89, 0.0025, 0.0025, 57, 89, 0};
    const GravityGradientGrid g = synthesize_grid(masses, e, 0.0);
    double peak = 0.0, mean = 0.0;
    for (double v : g.values) {
        const double anomaly = v - kBackgroundGradient;
        peak = std::max(peak, std::abs(anomaly));
        mean += anomaly;
    }
    mean /= static_cast<double>(g.values.size());
    CHECK(std::abs(mean) < 0.10 * peak);
}

TEST_CASE("grid file save/load round trip is bit exact") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    GravityGradientGrid g = make_constant_grid(0.0, 12.25, -33.5, 0.0625, 17, 3);
    g.reference_altitude_m = 1234.5;
    for (auto& v : g.values) v = unit(rng) * 5e-7;
    const auto path = temp_file("gravnav_roundtrip.ggv");
    save_grid(g, path);
    const GravityGradientGrid back = load_grid(path);
    CHECK(back.origin_lat_deg == g.origin_lat_deg);
    CHECK(back.origin_lon_deg == g.origin_lon_deg);
    CHECK(back.d_lat_deg == g.d_lat_deg);
    CHECK(back.d_lon_deg == g.d_lon_deg);
    CHECK(back.n_rows == g.n_rows);
    CHECK(back.n_cols == g.n_cols);
    CHECK(back.priority == g.priority);
    CHECK(back.reference_altitude_m == g.reference_altitude_m);
    REQUIRE(back.values.size() == g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        CHECK(back.values[i] == g.values[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed grid files raise FormatError with a byte offset") {
    const auto path = temp_file("gravnav_badfile.ggv");
    SUBCASE("bad magic") {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
        out.close();
        CHECK_THROWS_AS(load_grid(path), FormatError);
    }
    SUBCASE("truncated values") {
        GravityGradientGrid g = make_constant_grid(1e-7, 0.0, 0.0, 0.1, 4);
        save_grid(g, path);
        std::filesystem::resize_file(path, 60);
        try {
            load_grid(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() > 0);
        }
    }
    SUBCASE("single-row grid rejected") {
        std::ofstream out(path, std::ios::binary);
        out << "GGV1";
        const double d = 0.1;
        const std::int32_t one = 1, many = 8;
        out.write(reinterpret_cast<const char*>(&d), 8);
        out.write(reinterpret_cast<const char*>(&d), 8);
        out.write(reinterpret_cast<const char*>(&d), 8);
        out.write(reinterpret_cast<const char*>(&d), 8);
        out.write(reinterpret_cast<const char*>(&one), 4);
        out.write(reinterpret_cast<const char*>(&many), 4);
        out.write(reinterpret_cast<const char*>(&one), 4);
        out.write(reinterpret_cast<const char*>(&d), 8);
        out.close();
        CHECK_THROWS_AS(load_grid(path), FormatError);
    }
    std::filesystem::remove(path);
}

TEST_CASE("mass list parser") {
    const auto path = temp_file("gravnav_masses.txt");
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "50.0 -1.0 2000.0 1.0e13\n";
        out << "\n";
        out << "49.5 -0.5 1500.0 -5.0e12\n";
    }
    const auto masses = load_mass_list(path);
    REQUIRE(masses.size() == 2);
    CHECK(masses[0].lat_deg == 50.0);
    CHECK(masses[1].mass_kg == -5.0e12);
    {
        std::ofstream out(path);
        out << "50.0 -1.0 0.0 1.0e13\n";  // zero depth
    }
    CHECK_THROWS_AS(load_mass_list(path), gravnav::Error);
    std::filesystem::remove(path);
}

}  // TEST_SUITE
