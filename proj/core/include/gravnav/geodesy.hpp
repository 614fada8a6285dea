// WGS84 ellipsoid model, local NED frames, normal gravity and the
// rotation-rate terms used by trajectory synthesis and INS mechanization.
//
// Convention: angles are degrees at every public API boundary (matching the
// navigation state definition); radians only appear inside this module.
// NED is North-East-Down with down positive toward the Earth.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <utility>

namespace gravnav::geodesy {

/// Geodetic position relative to the WGS84 ellipsoid.
struct GeodeticPosition {
    double latitude_deg = 0.0;   ///< [-90, 90]
    double longitude_deg = 0.0;  ///< (-180, 180]
    double altitude_m = 0.0;     ///< height above the ellipsoid
};

/// Local offset from a stated geodetic origin, metres.
struct NedVector {
    double north_m = 0.0;
    double east_m = 0.0;
    double down_m = 0.0;
};

/// Reference ellipsoid constants plus the closed-form gravity constants.
struct EllipsoidModel {
    double semi_major_axis_m;
    double flattening;
    double earth_rotation_rate_rad_s;
    double equatorial_gravity_ms2;  ///< Somigliana g_e
    double somigliana_k;            ///< Somigliana k
    double free_air_gradient_s2;    ///< linear altitude correction

    double eccentricity_sq() const {
        return flattening * (2.0 - flattening);
    }
    double semi_minor_axis_m() const {
        return semi_major_axis_m * (1.0 - flattening);
    }

    static const EllipsoidModel& wgs84();
};

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.29577951308232;

/// Downward normal gravity magnitude [m/s^2]: Somigliana closed form at the
/// ellipsoid surface plus a linear free-air height correction.
double normal_gravity(double latitude_deg, double altitude_m,
                      const EllipsoidModel& ell = EllipsoidModel::wgs84());

/// (meridian radius, prime-vertical radius) of curvature [m].
std::pair<double, double> radii_of_curvature(
    double latitude_deg, const EllipsoidModel& ell = EllipsoidModel::wgs84());

/// Local linearization of `point` about `origin`. Exact inverse of
/// ned_to_geodetic for the same origin; valid for offsets of a few tens
/// of km.
NedVector geodetic_to_ned(const GeodeticPosition& origin,
                          const GeodeticPosition& point,
                          const EllipsoidModel& ell = EllipsoidModel::wgs84());

GeodeticPosition ned_to_geodetic(
    const GeodeticPosition& origin, const NedVector& delta,
    const EllipsoidModel& ell = EllipsoidModel::wgs84());

/// Earth rotation rate resolved in NED: (O cos lat, 0, -O sin lat).
Eigen::Vector3d earth_rate_ned(
    double latitude_deg, const EllipsoidModel& ell = EllipsoidModel::wgs84());

/// Angular rate of the NED frame due to vehicle motion over the curved
/// ellipsoid: (v_E/(R_E+h), -v_N/(R_N+h), -v_E tan(lat)/(R_E+h)).
Eigen::Vector3d transport_rate_ned(
    const Eigen::Vector3d& v_ned, double latitude_deg, double altitude_m,
    const EllipsoidModel& ell = EllipsoidModel::wgs84());

/// Path length [m] between two positions along the great-ellipse track used
/// by the trajectory generator (numerical integration, not a geodesic
/// library call), with altitude interpolated linearly along the path.
double route_distance(const GeodeticPosition& a, const GeodeticPosition& b,
                      const EllipsoidModel& ell = EllipsoidModel::wgs84());

// ---------------------------------------------------------------------------
// Attitude helpers (body <-> NED, Z-Y-X Euler: heading, pitch, roll)
// ---------------------------------------------------------------------------

/// Euler angles in degrees, NED-referenced.
struct EulerDeg {
    double heading_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

/// Rotation matrix mapping body-frame vectors into NED.
Eigen::Matrix3d body_to_ned(const EulerDeg& euler);

/// Euler angles (degrees) from a body-to-NED rotation matrix.
EulerDeg euler_from_body_to_ned(const Eigen::Matrix3d& c_nb);

// ---------------------------------------------------------------------------
// Great-ellipse path (plane through the Earth's centre and both endpoints)
// ---------------------------------------------------------------------------

/// Constant-altitude track along the intersection of the ellipsoid with the
/// plane spanned by the endpoints' geocentric directions. Parametrized by
/// t in [0, 1]; positions are evaluated at the altitude interpolated
/// linearly between the endpoint altitudes.
class GreatEllipse {
  public:
    GreatEllipse(const GeodeticPosition& a, const GeodeticPosition& b,
                 const EllipsoidModel& ell = EllipsoidModel::wgs84());

    GeodeticPosition position(double t) const;

    /// ECEF point at parameter t (includes altitude).
    Eigen::Vector3d ecef(double t) const;

    /// |d ecef / dt| via Richardson-safe central differences; the path is
    /// analytic so a fixed step of 1e-4 keeps the relative error ~1e-10.
    double speed(double t) const;

    /// Arc length of [0, t], composite Simpson on `speed`.
    double length(double t = 1.0) const;

    /// Total swept geocentric angle [rad].
    double sweep_angle() const { return sweep_; }

  private:
    Eigen::Vector3d surface_point(double t) const;

    const EllipsoidModel& ell_;
    Eigen::Vector3d u0_, u1_;  // unit geocentric directions of the endpoints
    double sweep_ = 0.0;
    double alt0_ = 0.0, alt1_ = 0.0;
};

/// ECEF coordinates of a geodetic position.
Eigen::Vector3d geodetic_to_ecef(
    const GeodeticPosition& p, const EllipsoidModel& ell = EllipsoidModel::wgs84());

}  // namespace gravnav::geodesy
