#include <doctest.h>

#include "gravnav/geodesy.hpp"

#include <cmath>
#include <random>

using namespace gravnav::geodesy;

namespace {
const GeodeticPosition kLiverpool{53.407579, -2.967853, 0.0};
const GeodeticPosition kToulouse{43.604652, 1.444209, 0.0};
}  // namespace

TEST_SUITE("geodesy") {

TEST_CASE("normal gravity matches the Somigliana constants") {
    CHECK(normal_gravity(0.0, 0.0) == doctest::Approx(9.7803253359).epsilon(1e-10));
    CHECK(std::abs(normal_gravity(90.0, 0.0) - 9.8321849379) < 1e-9);
    CHECK(std::abs(normal_gravity(-90.0, 0.0) - 9.8321849379) < 1e-9);
}

TEST_CASE("free-air correction is linear in altitude") {
    const double g0 = normal_gravity(45.0, 0.0);
    const double g3000 = normal_gravity(45.0, 3000.0);
    CHECK(g0 - g3000 == doctest::Approx(3.086e-6 * 3000.0).epsilon(1e-12));
}

TEST_CASE("normal gravity monotonic in |lat| and decreasing in altitude") {
    for (int lat = 0; lat < 90; lat += 5) {
        CHECK(normal_gravity(lat + 5.0, 0.0) > normal_gravity(lat, 0.0));
        CHECK(normal_gravity(-lat - 5.0, 0.0) > normal_gravity(-static_cast<double>(lat), 0.0));
    }
    for (double alt = 0.0; alt < 10000.0; alt += 1000.0) {
        CHECK(normal_gravity(37.0, alt + 1000.0) < normal_gravity(37.0, alt));
    }
}

TEST_CASE("radii of curvature at the equator and pole") {
    const auto [m0, p0] = radii_of_curvature(0.0);
    CHECK(p0 == doctest::Approx(6378137.0).epsilon(1e-12));
    CHECK(m0 == doctest::Approx(6335439.327).epsilon(1e-6));
    const auto [m90, p90] = radii_of_curvature(90.0);
    CHECK(m90 == doctest::Approx(p90).epsilon(1e-12));
    CHECK(m0 > 0.0);
    CHECK(p0 >= 6378137.0 - 1e-6);
}

TEST_CASE("geodetic_to_ned basics") {
    const GeodeticPosition origin{0.0, 10.0, 0.0};
    SUBCASE("identity") {
        const NedVector d = geodetic_to_ned(origin, origin);
        CHECK(d.north_m == 0.0);
        CHECK(d.east_m == 0.0);
        CHECK(d.down_m == 0.0);
    }
    SUBCASE("one degree north at the equator") {
        const GeodeticPosition north{1.0, 10.0, 0.0};
        const NedVector d = geodetic_to_ned(origin, north);
        const auto [rn, re] = radii_of_curvature(0.0);
        CHECK(d.north_m == doctest::Approx(rn * kDegToRad).epsilon(1e-12));
        CHECK(d.north_m == doctest::Approx(110574.39).epsilon(1e-4));
        CHECK(d.east_m == 0.0);
    }
    SUBCASE("down sign convention") {
        GeodeticPosition lower = origin;
        lower.altitude_m = -10.0;
        CHECK(geodetic_to_ned(origin, lower).down_m == doctest::Approx(10.0));
    }
}

TEST_CASE("ned_to_geodetic basics") {
    const GeodeticPosition origin{48.5, -2.0, 250.0};
    SUBCASE("zero delta returns the origin") {
        const GeodeticPosition p = ned_to_geodetic(origin, {0.0, 0.0, 0.0});
        CHECK(p.latitude_deg == origin.latitude_deg);
        CHECK(p.longitude_deg == origin.longitude_deg);
        CHECK(p.altitude_m == origin.altitude_m);
    }
    SUBCASE("down -100 raises altitude by 100") {
        CHECK(ned_to_geodetic(origin, {0.0, 0.0, -100.0}).altitude_m ==
              doctest::Approx(350.0));
    }
}

TEST_CASE("geodetic/NED round trip residual below 1e-6 m for 10 km offsets") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> lat(-60.0, 60.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    std::uniform_real_distribution<double> offset(-10000.0, 10000.0);
    for (int i = 0; i < 200; ++i) {
        const GeodeticPosition origin{lat(rng), lon(rng), 1000.0};
        const NedVector d{offset(rng), offset(rng), offset(rng) / 10.0};
        const GeodeticPosition p = ned_to_geodetic(origin, d);
        const NedVector back = geodetic_to_ned(origin, p);
        CHECK(std::abs(back.north_m - d.north_m) < 1e-6);
        CHECK(std::abs(back.east_m - d.east_m) < 1e-6);
        CHECK(std::abs(back.down_m - d.down_m) < 1e-6);
    }
}

TEST_CASE("earth rate geometry") {
    const double omega = EllipsoidModel::wgs84().earth_rotation_rate_rad_s;
    const Eigen::Vector3d pole = earth_rate_ned(90.0);
    CHECK(pole.x() == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(pole.z() == doctest::Approx(-omega).epsilon(1e-15));
    const Eigen::Vector3d equator = earth_rate_ned(0.0);
    CHECK(equator.x() == doctest::Approx(omega));
    CHECK(equator.z() == doctest::Approx(0.0));
    for (double lat = -90.0; lat <= 90.0; lat += 7.5) {
        CHECK(earth_rate_ned(lat).norm() == doctest::Approx(omega).epsilon(1e-14));
    }
}

TEST_CASE("transport rate") {
    SUBCASE("stationary platform") {
        CHECK(transport_rate_ned(Eigen::Vector3d::Zero(), 33.0, 5000.0).norm() ==
              0.0);
    }
    SUBCASE("northbound at the equator") {
        const Eigen::Vector3d v{100.0, 0.0, 0.0};
        const auto [rn, re] = radii_of_curvature(0.0);
        const Eigen::Vector3d w = transport_rate_ned(v, 0.0, 3000.0);
        CHECK(w.x() == 0.0);
        CHECK(w.y() == doctest::Approx(-100.0 / (rn + 3000.0)).epsilon(1e-12));
        CHECK(w.z() == 0.0);
    }
    SUBCASE("eastbound at the equator has no z component") {
        const Eigen::Vector3d w =
            transport_rate_ned({0.0, 120.0, 0.0}, 0.0, 0.0);
        CHECK(w.z() == doctest::Approx(0.0));
    }
    SUBCASE("linearity in velocity") {
        const Eigen::Vector3d v{37.0, -12.0, 4.0};
        const Eigen::Vector3d w1 = transport_rate_ned(v, 51.0, 2000.0);
        const Eigen::Vector3d w2 = transport_rate_ned(2.0 * v, 51.0, 2000.0);
        CHECK((w2 - 2.0 * w1).norm() < 1e-18);
    }
}

TEST_CASE("route distance Liverpool-Toulouse is about 1137 km") {
    const double d = route_distance(kLiverpool, kToulouse);
    CHECK(std::abs(d - 1.137e6) < 0.005 * 1.137e6);
    // frozen ellipsoid great-ellipse value for regression
    CHECK(d == doctest::Approx(1137226.3).epsilon(2e-5));
    CHECK(route_distance(kToulouse, kLiverpool) == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("route distance degenerate and equatorial cases") {
    CHECK(route_distance(kLiverpool, kLiverpool) == 0.0);
    const GeodeticPosition a{0.0, 0.0, 0.0};
    const GeodeticPosition b{0.0, 1.0, 0.0};
    CHECK(route_distance(a, b) ==
          doctest::Approx(6378137.0 * kDegToRad).epsilon(1e-6));
}

TEST_CASE("body/NED attitude helpers round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-179.0, 179.0);
    std::uniform_real_distribution<double> pitch(-89.0, 89.0);
    for (int i = 0; i < 100; ++i) {
        const EulerDeg e{angle(rng), pitch(rng), angle(rng)};
        const EulerDeg back = euler_from_body_to_ned(body_to_ned(e));
        CHECK(back.heading_deg == doctest::Approx(e.heading_deg).epsilon(1e-10));
        CHECK(back.pitch_deg == doctest::Approx(e.pitch_deg).epsilon(1e-10));
        CHECK(back.roll_deg == doctest::Approx(e.roll_deg).epsilon(1e-10));
    }
}

}  // TEST_SUITE
