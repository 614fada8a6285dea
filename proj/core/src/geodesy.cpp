#include "gravnav/geodesy.hpp"

#include <algorithm>
#include <cmath>

namespace gravnav::geodesy {

const EllipsoidModel& EllipsoidModel::wgs84() {
    static const EllipsoidModel model{
        6378137.0,            // semi-major axis
        1.0 / 298.257223563,  // flattening
        7.292115e-5,          // earth rotation rate
        9.7803253359,         // Somigliana equatorial gravity
        1.93185265241e-3,     // Somigliana k
        3.086e-6,             // free-air gradient
    };
    return model;
}

double normal_gravity(double latitude_deg, double altitude_m,
                      const EllipsoidModel& ell) {
    const double s = std::sin(latitude_deg * kDegToRad);
    const double s2 = s * s;
    const double g0 = ell.equatorial_gravity_ms2 * (1.0 + ell.somigliana_k * s2) /
                      std::sqrt(1.0 - ell.eccentricity_sq() * s2);
    return g0 - ell.free_air_gradient_s2 * altitude_m;
}

std::pair<double, double> radii_of_curvature(double latitude_deg,
                                             const EllipsoidModel& ell) {
    const double e2 = ell.eccentricity_sq();
    const double s = std::sin(latitude_deg * kDegToRad);
    const double w2 = 1.0 - e2 * s * s;
    const double w = std::sqrt(w2);
    const double meridian = ell.semi_major_axis_m * (1.0 - e2) / (w2 * w);
    const double prime_vertical = ell.semi_major_axis_m / w;
    return {meridian, prime_vertical};
}

NedVector geodetic_to_ned(const GeodeticPosition& origin,
                          const GeodeticPosition& point,
                          const EllipsoidModel& ell) {
    const auto [rn, re] = radii_of_curvature(origin.latitude_deg, ell);
    const double dlat = (point.latitude_deg - origin.latitude_deg) * kDegToRad;
    double dlon = point.longitude_deg - origin.longitude_deg;
    // shortest-way wrap for longitudes straddling the antimeridian
    if (dlon > 180.0) dlon -= 360.0;
    if (dlon <= -180.0) dlon += 360.0;
    dlon *= kDegToRad;
    const double clat = std::cos(origin.latitude_deg * kDegToRad);
    return {
        dlat * (rn + origin.altitude_m),
        dlon * (re + origin.altitude_m) * clat,
        origin.altitude_m - point.altitude_m,
    };
}

GeodeticPosition ned_to_geodetic(const GeodeticPosition& origin,
                                 const NedVector& delta,
                                 const EllipsoidModel& ell) {
    const auto [rn, re] = radii_of_curvature(origin.latitude_deg, ell);
    const double clat = std::cos(origin.latitude_deg * kDegToRad);
    GeodeticPosition out;
    out.latitude_deg =
        origin.latitude_deg + delta.north_m / (rn + origin.altitude_m) * kRadToDeg;
    out.longitude_deg =
        origin.longitude_deg +
        delta.east_m / ((re + origin.altitude_m) * clat) * kRadToDeg;
    if (out.longitude_deg > 180.0) out.longitude_deg -= 360.0;
    if (out.longitude_deg <= -180.0) out.longitude_deg += 360.0;
    out.altitude_m = origin.altitude_m - delta.down_m;
    return out;
}

Eigen::Vector3d earth_rate_ned(double latitude_deg, const EllipsoidModel& ell) {
    const double lat = latitude_deg * kDegToRad;
    const double omega = ell.earth_rotation_rate_rad_s;
    return {omega * std::cos(lat), 0.0, -omega * std::sin(lat)};
}

Eigen::Vector3d transport_rate_ned(const Eigen::Vector3d& v_ned,
                                   double latitude_deg, double altitude_m,
                                   const EllipsoidModel& ell) {
    const auto [rn, re] = radii_of_curvature(latitude_deg, ell);
    const double lat = latitude_deg * kDegToRad;
    return {
        v_ned.y() / (re + altitude_m),
        -v_ned.x() / (rn + altitude_m),
        -v_ned.y() * std::tan(lat) / (re + altitude_m),
    };
}

Eigen::Vector3d geodetic_to_ecef(const GeodeticPosition& p,
                                 const EllipsoidModel& ell) {
    const double lat = p.latitude_deg * kDegToRad;
    const double lon = p.longitude_deg * kDegToRad;
    const double s = std::sin(lat);
    const double c = std::cos(lat);
    const double n = ell.semi_major_axis_m /
                     std::sqrt(1.0 - ell.eccentricity_sq() * s * s);
    return {
        (n + p.altitude_m) * c * std::cos(lon),
        (n + p.altitude_m) * c * std::sin(lon),
        (n * (1.0 - ell.eccentricity_sq()) + p.altitude_m) * s,
    };
}

// ---------------------------------------------------------------------------
// Attitude helpers
// ---------------------------------------------------------------------------

Eigen::Matrix3d body_to_ned(const EulerDeg& euler) {
    const double psi = euler.heading_deg * kDegToRad;
    const double theta = euler.pitch_deg * kDegToRad;
    const double phi = euler.roll_deg * kDegToRad;
    return (Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

EulerDeg euler_from_body_to_ned(const Eigen::Matrix3d& c_nb) {
    EulerDeg e;
    // asin argument clamped: orthonormal drift can push it past 1 by ~1e-16
    const double s = std::clamp(-c_nb(2, 0), -1.0, 1.0);
    e.pitch_deg = std::asin(s) * kRadToDeg;
    e.heading_deg = std::atan2(c_nb(1, 0), c_nb(0, 0)) * kRadToDeg;
    e.roll_deg = std::atan2(c_nb(2, 1), c_nb(2, 2)) * kRadToDeg;
    return e;
}

// ---------------------------------------------------------------------------
// Great-ellipse path
// ---------------------------------------------------------------------------

GreatEllipse::GreatEllipse(const GeodeticPosition& a, const GeodeticPosition& b,
                           const EllipsoidModel& ell)
    : ell_(ell), alt0_(a.altitude_m), alt1_(b.altitude_m) {
    GeodeticPosition sa = a, sb = b;
    sa.altitude_m = 0.0;
    sb.altitude_m = 0.0;
    u0_ = geodetic_to_ecef(sa, ell).normalized();
    u1_ = geodetic_to_ecef(sb, ell).normalized();
    sweep_ = std::atan2(u0_.cross(u1_).norm(), u0_.dot(u1_));
}

Eigen::Vector3d GreatEllipse::surface_point(double t) const {
    // slerp of the geocentric directions, then project the ray onto the
    // ellipsoid surface: the curve stays in the endpoints' plane, so it is
    // the great ellipse.
    const double sw = std::sin(sweep_);
    Eigen::Vector3d u;
    if (sw < 1e-12) {
        u = ((1.0 - t) * u0_ + t * u1_).normalized();
    } else {
        u = (std::sin((1.0 - t) * sweep_) * u0_ + std::sin(t * sweep_) * u1_) / sw;
    }
    const double a2 = ell_.semi_major_axis_m * ell_.semi_major_axis_m;
    const double b = ell_.semi_minor_axis_m();
    const double q = (u.x() * u.x() + u.y() * u.y()) / a2 + u.z() * u.z() / (b * b);
    return u / std::sqrt(q);
}

GeodeticPosition GreatEllipse::position(double t) const {
    const Eigen::Vector3d g = surface_point(t);
    // exact geodetic latitude for a point on the ellipsoid surface
    const double hyp = std::hypot(g.x(), g.y());
    const double lat = std::atan2(g.z(), (1.0 - ell_.eccentricity_sq()) * hyp);
    const double lon = std::atan2(g.y(), g.x());
    return {lat * kRadToDeg, lon * kRadToDeg, alt0_ + t * (alt1_ - alt0_)};
}

Eigen::Vector3d GreatEllipse::ecef(double t) const {
    return geodetic_to_ecef(position(t), ell_);
}

double GreatEllipse::speed(double t) const {
    const double h = 1e-4;
    if (t >= h && t <= 1.0 - h) {
        return (ecef(t + h) - ecef(t - h)).norm() / (2.0 * h);
    }
    // one-sided near the ends, second order
    const double dir = (t < h) ? 1.0 : -1.0;
    const Eigen::Vector3d p0 = ecef(t);
    const Eigen::Vector3d p1 = ecef(t + dir * h);
    const Eigen::Vector3d p2 = ecef(t + dir * 2.0 * h);
    return ((-3.0 * p0 + 4.0 * p1 - p2) * (dir / (2.0 * h))).norm();
}

double GreatEllipse::length(double t) const {
    // composite Simpson; the integrand varies on the scale of the whole
    // path so a few hundred panels give ~1e-12 relative accuracy.
    const int panels = 512;
    const double h = t / panels;
    double sum = speed(0.0) + speed(t);
    for (int i = 1; i < panels; ++i) {
        sum += speed(i * h) * ((i % 2) ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

double route_distance(const GeodeticPosition& a, const GeodeticPosition& b,
                      const EllipsoidModel& ell) {
    if (a.latitude_deg == b.latitude_deg && a.longitude_deg == b.longitude_deg) {
        return std::abs(a.altitude_m - b.altitude_m);
    }
    return GreatEllipse(a, b, ell).length(1.0);
}

}  // namespace gravnav::geodesy
