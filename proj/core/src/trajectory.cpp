#include "gravnav/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace gravnav::trajectory {

using geodesy::GeodeticPosition;
using geodesy::GreatEllipse;

namespace {

/// Arc-length parametrization of a great-ellipse path: waypoint parameters
/// are advanced with RK4 on dt/ds = 1/|dr/dt| so consecutive waypoints are
/// equally spaced in arc length to well below 1e-3 m.
class ArcLengthPath {
  public:
    ArcLengthPath(const GeodeticPosition& a, const GeodeticPosition& b,
                  double spacing_m)
        : path_(a, b), spacing_m_(spacing_m) {
        total_length_m_ = path_.length(1.0);
        const auto count = static_cast<std::size_t>(
            std::floor(total_length_m_ / spacing_m_)) + 1;
        params_.reserve(count);
        speeds_.reserve(count);
        double t = 0.0;
        params_.push_back(t);
        speeds_.push_back(path_.speed(0.0));
        const int substeps = 4;
        const double h = spacing_m_ / substeps;
        for (std::size_t k = 1; k < count; ++k) {
            for (int i = 0; i < substeps; ++i) {
                const double k1 = 1.0 / path_.speed(t);
                const double k2 = 1.0 / path_.speed(t + 0.5 * h * k1);
                const double k3 = 1.0 / path_.speed(t + 0.5 * h * k2);
                const double k4 = 1.0 / path_.speed(t + h * k3);
                t += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            }
            params_.push_back(t);
            speeds_.push_back(path_.speed(t));
        }
    }

    double total_length_m() const { return total_length_m_; }
    std::size_t waypoint_count() const { return params_.size(); }

    /// Path parameter at arc length s; linear within a waypoint interval
    /// (the parameter speed varies on the scale of the whole route).
    double param_at(double s) const {
        const auto last = params_.size() - 1;
        if (s <= 0.0) return params_.front();
        auto k = static_cast<std::size_t>(s / spacing_m_);
        if (k >= last) k = last - 1;
        const double ds = s - static_cast<double>(k) * spacing_m_;
        return params_[k] + ds / speeds_[k];
    }

    GeodeticPosition position_at(double s) const {
        return path_.position(param_at(s));
    }

    /// NED-frame track heading [rad] at arc length s.
    double heading_at(double s) const {
        const double dt = 1e-4;
        const double t = param_at(s);
        const Eigen::Vector3d d = path_.ecef(t + dt) - path_.ecef(t - dt);
        const GeodeticPosition p = path_.position(t);
        const double lat = p.latitude_deg * geodesy::kDegToRad;
        const double lon = p.longitude_deg * geodesy::kDegToRad;
        const Eigen::Vector3d north{-std::sin(lat) * std::cos(lon),
                                    -std::sin(lat) * std::sin(lon),
                                    std::cos(lat)};
        const Eigen::Vector3d east{-std::sin(lon), std::cos(lon), 0.0};
        return std::atan2(d.dot(east), d.dot(north));
    }

  private:
    GreatEllipse path_;
    double spacing_m_;
    double total_length_m_ = 0.0;
    std::vector<double> params_;
    std::vector<double> speeds_;  // |dr/dt| at each waypoint parameter
};

double wrap_angle_rad(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

Route build_route(const GeodeticPosition& start, const GeodeticPosition& end,
                  double speed_mps, double altitude_m) {
    if (!(speed_mps > 0.0)) {
        throw DegenerateRoute("route speed must be positive");
    }
    GeodeticPosition a = start, b = end;
    a.altitude_m = altitude_m;
    b.altitude_m = altitude_m;
    ArcLengthPath path(a, b, speed_mps);
    if (path.total_length_m() < 2.0 * speed_mps) {
        throw DegenerateRoute("route shorter than two waypoint spacings");
    }
    Route route;
    route.start = a;
    route.end = b;
    route.speed_mps = speed_mps;
    route.altitude_m = altitude_m;
    route.waypoints.reserve(path.waypoint_count());
    for (std::size_t k = 0; k < path.waypoint_count(); ++k) {
        route.waypoints.push_back(
            path.position_at(static_cast<double>(k) * speed_mps));
    }
    // pin the first waypoint to the exact requested start
    route.waypoints.front() = a;
    return route;
}

TruthSeries truth_states(const Route& route, const TruthOptions& options) {
    const double dt = 1.0 / options.rate_hz;
    const double duration = route.duration_s();
    const auto n_samples = static_cast<std::size_t>(
        std::llround(duration * options.rate_hz)) + 1;

    ArcLengthPath path(route.start, route.end, route.speed_mps);

    TruthSeries truth;
    truth.dt_s = dt;
    truth.states.resize(n_samples);
    truth.vibration_mps2.resize(n_samples, 0.0);

    // pass 1: positions and headings along the path
    std::vector<double> headings(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double s = route.speed_mps * (dt * static_cast<double>(i));
        StateVector& x = truth.states[i];
        const GeodeticPosition p = path.position_at(s);
        x.latitude_deg = p.latitude_deg;
        x.longitude_deg = p.longitude_deg;
        x.altitude_m = route.altitude_m;
        x.u_mps = route.speed_mps;
        x.v_mps = 0.0;
        x.w_mps = 0.0;
        headings[i] = path.heading_at(s);
        x.psi_deg = headings[i] * geodesy::kRadToDeg;
        x.theta_deg = 0.0;
        x.phi_deg = 0.0;
    }

    // pass 2: heading rate by central differences of the heading series
    for (std::size_t i = 0; i < n_samples; ++i) {
        double dpsi;
        if (i == 0) {
            dpsi = wrap_angle_rad(headings[1] - headings[0]) / dt;
        } else if (i + 1 == n_samples) {
            dpsi = wrap_angle_rad(headings[i] - headings[i - 1]) / dt;
        } else {
            dpsi = wrap_angle_rad(headings[i + 1] - headings[i - 1]) / (2.0 * dt);
        }
        StateVector& x = truth.states[i];
        x.p_dps = 0.0;
        x.q_dps = 0.0;
        x.r_dps = dpsi * geodesy::kRadToDeg;
        // level constant-speed flight: only the lateral centripetal term
        x.a_x_mps2 = 0.0;
        x.a_y_mps2 = route.speed_mps * dpsi;
        x.a_z_mps2 = 0.0;
    }

    // pass 3: vibration disturbance (single-pole low-passed white noise per
    // body axis); informational in the acceleration states, and the
    // magnitude feeds the gradiometer failure model.
    if (options.vibration.sigma_mps2 > 0.0) {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double rho =
            std::exp(-2.0 * M_PI * options.vibration.corner_hz * dt);
        const double scale = options.vibration.sigma_mps2 *
                             std::sqrt(1.0 - rho * rho);
        Eigen::Vector3d vib = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n_samples; ++i) {
            vib = rho * vib +
                  scale * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            StateVector& x = truth.states[i];
            x.a_x_mps2 += vib.x();
            x.a_y_mps2 += vib.y();
            x.a_z_mps2 += vib.z();
            truth.vibration_mps2[i] = vib.norm();
        }
    }
    return truth;
}

void export_truth_csv(const TruthSeries& truth, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << "time_s,latitude_deg,longitude_deg,altitude_m,u_mps,v_mps,w_mps,"
           "a_x_mps2,a_y_mps2,a_z_mps2,psi_deg,theta_deg,phi_deg,"
           "p_dps,q_dps,r_dps\n";
    out.precision(12);
    for (std::size_t i = 0; i < truth.states.size(); ++i) {
        const StateVector& x = truth.states[i];
        out << truth.time_of(i) << ',' << x.latitude_deg << ','
            << x.longitude_deg << ',' << x.altitude_m << ',' << x.u_mps << ','
            << x.v_mps << ',' << x.w_mps << ',' << x.a_x_mps2 << ','
            << x.a_y_mps2 << ',' << x.a_z_mps2 << ',' << x.psi_deg << ','
            << x.theta_deg << ',' << x.phi_deg << ',' << x.p_dps << ','
            << x.q_dps << ',' << x.r_dps << '\n';
    }
}

}  // namespace gravnav::trajectory
