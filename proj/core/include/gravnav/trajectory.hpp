// Truth motion generation: great-ellipse waypoint routes and the full
// 15-state kinematic series at the INS rate for constant-speed,
// constant-altitude flight between two geodetic endpoints.
#pragma once

#include "gravnav/errors.hpp"
#include "gravnav/geodesy.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gravnav::trajectory {

/// Truth/navigation state. Field order matches the CSV export column order.
/// Angles are degrees; attitude is NED-referenced Z-Y-X Euler; u,v,w and
/// P,Q,R are body-axis quantities.
struct StateVector {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;
    double u_mps = 0.0;  ///< body x velocity
    double v_mps = 0.0;  ///< body y velocity
    double w_mps = 0.0;  ///< body z velocity
    double a_x_mps2 = 0.0;
    double a_y_mps2 = 0.0;
    double a_z_mps2 = 0.0;
    double psi_deg = 0.0;    ///< heading
    double theta_deg = 0.0;  ///< pitch
    double phi_deg = 0.0;    ///< roll
    double p_dps = 0.0;      ///< body x angle rate, deg/s
    double q_dps = 0.0;
    double r_dps = 0.0;

    geodesy::GeodeticPosition position() const {
        return {latitude_deg, longitude_deg, altitude_m};
    }
    geodesy::EulerDeg euler() const { return {psi_deg, theta_deg, phi_deg}; }
};

/// Constant-speed route between two endpoints with waypoints at 1 s spacing
/// along the at-altitude great-ellipse path.
struct Route {
    geodesy::GeodeticPosition start;
    geodesy::GeodeticPosition end;
    double speed_mps = 0.0;
    double altitude_m = 0.0;
    std::vector<geodesy::GeodeticPosition> waypoints;

    /// Route duration in whole seconds (= waypoint count - 1).
    double duration_s() const {
        return static_cast<double>(waypoints.size()) - 1.0;
    }
};

/// Body-axis vibration disturbance model: independent per-axis Gaussian
/// processes, band-limited by a single-pole low-pass.
struct VibrationConfig {
    double sigma_mps2 = 5e-3;
    double corner_hz = 2.0;
};

struct TruthOptions {
    double rate_hz = 100.0;
    VibrationConfig vibration;
    std::uint64_t seed = 0;
};

/// Truth state series at fixed rate, plus the vibration magnitude channel
/// consumed by the gradiometer failure model.
struct TruthSeries {
    double dt_s = 0.01;
    std::vector<StateVector> states;
    std::vector<double> vibration_mps2;  ///< |body vibration accel| per sample

    double time_of(std::size_t index) const { return dt_s * index; }
    std::size_t size() const { return states.size(); }
};

/// Build the waypoint route. Throws DegenerateRoute when the endpoints are
/// closer than two waypoint spacings.
Route build_route(const geodesy::GeodeticPosition& start,
                  const geodesy::GeodeticPosition& end, double speed_mps,
                  double altitude_m);

/// Generate the full truth series for `route` at `options.rate_hz`.
/// Positions, velocities and attitude follow the smooth path exactly; the
/// vibration disturbance appears in the acceleration states and in the
/// vibration channel only.
TruthSeries truth_states(const Route& route, const TruthOptions& options = {});

/// One row per sample, columns in StateVector field order, preceded by time.
void export_truth_csv(const TruthSeries& truth, const std::filesystem::path& path);

}  // namespace gravnav::trajectory
