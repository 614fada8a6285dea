#include "gravnav/ins.hpp"

#include <cmath>
#include <random>

namespace gravnav::ins {

using geodesy::kDegToRad;
using geodesy::kRadToDeg;

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& rotvec) {
    const double angle = rotvec.norm();
    double half_sinc;  // sin(angle/2)/angle
    if (angle < 1e-8) {
        half_sinc = 0.5 - angle * angle / 48.0;
    } else {
        half_sinc = std::sin(0.5 * angle) / angle;
    }
    Eigen::Quaterniond q;
    q.w() = std::cos(0.5 * angle);
    q.vec() = half_sinc * rotvec;
    return q;
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
    Eigen::Quaterniond q = q_in;
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();  // shortest arc
    }
    const double vnorm = q.vec().norm();
    if (vnorm < 1e-12) {
        return 2.0 * q.vec();
    }
    const double angle = 2.0 * std::atan2(vnorm, q.w());
    return (angle / vnorm) * q.vec();
}

NavState NavState::from_state_vector(const trajectory::StateVector& x) {
    NavState s;
    s.position = x.position();
    const Eigen::Matrix3d c_nb = geodesy::body_to_ned(x.euler());
    s.q_nb = Eigen::Quaterniond(c_nb);
    s.v_ned = c_nb * Eigen::Vector3d(x.u_mps, x.v_mps, x.w_mps);
    return s;
}

trajectory::StateVector NavState::to_state_vector() const {
    trajectory::StateVector x;
    x.latitude_deg = position.latitude_deg;
    x.longitude_deg = position.longitude_deg;
    x.altitude_m = position.altitude_m;
    const Eigen::Matrix3d c_nb = q_nb.toRotationMatrix();
    const Eigen::Vector3d v_body = c_nb.transpose() * v_ned;
    x.u_mps = v_body.x();
    x.v_mps = v_body.y();
    x.w_mps = v_body.z();
    const geodesy::EulerDeg e = geodesy::euler_from_body_to_ned(c_nb);
    x.psi_deg = e.heading_deg;
    x.theta_deg = e.pitch_deg;
    x.phi_deg = e.roll_deg;
    return x;
}

namespace {

/// Frame rates and gravity evaluated at one navigation state.
struct LocalTerms {
    Eigen::Vector3d omega_ie_n;
    Eigen::Vector3d omega_en_n;
    Eigen::Vector3d omega_in_n;
    Eigen::Vector3d gravity_ned;
    Eigen::Vector3d coriolis_rate;  // omega_en + 2*omega_ie
    double meridian_radius;
    double prime_vertical_radius;
};

LocalTerms local_terms(const NavState& s) {
    LocalTerms t;
    t.omega_ie_n = geodesy::earth_rate_ned(s.position.latitude_deg);
    t.omega_en_n = geodesy::transport_rate_ned(s.v_ned, s.position.latitude_deg,
                                               s.position.altitude_m);
    t.omega_in_n = t.omega_ie_n + t.omega_en_n;
    t.gravity_ned = Eigen::Vector3d(
        0.0, 0.0,
        geodesy::normal_gravity(s.position.latitude_deg, s.position.altitude_m));
    t.coriolis_rate = t.omega_en_n + 2.0 * t.omega_ie_n;
    const auto [rn, re] = geodesy::radii_of_curvature(s.position.latitude_deg);
    t.meridian_radius = rn;
    t.prime_vertical_radius = re;
    return t;
}

}  // namespace

InsMechanizer::InsMechanizer(const NavState& initial,
                             const MechanizerOptions& options)
    : state_(initial), options_(options) {}

void InsMechanizer::step(const ImuSample& imu) {
    const double dt = options_.dt_s;
    const LocalTerms terms = local_terms(state_);

    // attitude: C_new = Exp(-w_in dt) C_old Exp(w_ib dt)
    const Eigen::Quaterniond q_old = state_.q_nb;
    Eigen::Quaterniond q_new = quat_exp(-terms.omega_in_n * dt) * q_old *
                               quat_exp(imu.angular_rate_rps * dt);
    q_new.normalize();

    // velocity: implicit-midpoint Coriolis, attitude-averaged force;
    // solving (I + (dt/2)[w x]) v_new = v - (dt/2) w x v + dt (f + g)
    const Eigen::Matrix3d c_avg =
        0.5 * (q_old.toRotationMatrix() + q_new.toRotationMatrix());
    const Eigen::Vector3d f_ned = c_avg * imu.specific_force_mps2;
    const Eigen::Vector3d& w = terms.coriolis_rate;
    Eigen::Matrix3d skew;
    skew << 0.0, -w.z(), w.y(),
            w.z(), 0.0, -w.x(),
            -w.y(), w.x(), 0.0;
    const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() + 0.5 * dt * skew;
    const Eigen::Vector3d rhs = state_.v_ned -
                                0.5 * dt * w.cross(state_.v_ned) +
                                dt * (f_ned + terms.gravity_ned);
    const Eigen::Vector3d v_new = m.inverse() * rhs;

    const double guard =
        options_.divergence_speed_factor * options_.configured_speed_mps;
    if (!v_new.allFinite() || v_new.norm() > guard) {
        throw Divergence("mechanization velocity exceeded " +
                         std::to_string(guard) + " m/s at t=" +
                         std::to_string(t_ + dt));
    }

    // position: trapezoidal velocity, curvature radii at the old state
    const Eigen::Vector3d v_avg = 0.5 * (state_.v_ned + v_new);
    const double h_new = state_.position.altitude_m - dt * v_avg.z();
    const double h_avg = 0.5 * (state_.position.altitude_m + h_new);
    const double lat_rad = state_.position.latitude_deg * kDegToRad;
    const double dlat = dt * v_avg.x() / (terms.meridian_radius + h_avg);
    const double dlon =
        dt * v_avg.y() / ((terms.prime_vertical_radius + h_avg) * std::cos(lat_rad));

    state_.position.latitude_deg += dlat * kRadToDeg;
    state_.position.longitude_deg += dlon * kRadToDeg;
    if (state_.position.longitude_deg > 180.0) state_.position.longitude_deg -= 360.0;
    if (state_.position.longitude_deg <= -180.0) state_.position.longitude_deg += 360.0;
    state_.position.altitude_m = h_new;
    state_.v_ned = v_new;
    state_.q_nb = q_new;
    t_ += dt;

    last_accel_ned_ = f_ned + terms.gravity_ned - w.cross(v_avg);
    last_rate_body_ = imu.angular_rate_rps -
                      q_new.toRotationMatrix().transpose() * terms.omega_in_n;
}

void InsMechanizer::aid_altimeter(double measured_alt_m,
                                  const AltimeterConfig& cfg) {
    const double err = state_.position.altitude_m - measured_alt_m;
    state_.position.altitude_m -= cfg.position_gain * err;
    // estimated too high -> integrate downward faster (down positive)
    state_.v_ned.z() += cfg.velocity_gain_per_s * err;
}

NavSolution InsMechanizer::solution() const {
    NavSolution sol;
    sol.state = state_.to_state_vector();
    sol.t_s = t_;
    const Eigen::Matrix3d c_bn = state_.q_nb.toRotationMatrix().transpose();
    const Eigen::Vector3d a_body = c_bn * last_accel_ned_;
    sol.state.a_x_mps2 = a_body.x();
    sol.state.a_y_mps2 = a_body.y();
    sol.state.a_z_mps2 = a_body.z();
    sol.state.p_dps = last_rate_body_.x() * kRadToDeg;
    sol.state.q_dps = last_rate_body_.y() * kRadToDeg;
    sol.state.r_dps = last_rate_body_.z() * kRadToDeg;
    return sol;
}

NavSolution mechanize(const NavSolution& prev, const ImuSample& imu,
                      const MechanizerOptions& options) {
    InsMechanizer mech(NavState::from_state_vector(prev.state), options);
    mech.set_time(prev.t_s);
    mech.step(imu);
    return mech.solution();
}

NavSolution altimeter_aid(const NavSolution& solution, double measured_alt_m,
                          const AltimeterConfig& cfg) {
    InsMechanizer mech(NavState::from_state_vector(solution.state), {});
    mech.set_time(solution.t_s);
    mech.aid_altimeter(measured_alt_m, cfg);
    return NavSolution{mech.state().to_state_vector(), solution.t_s};
}

std::vector<ImuSample> synthesize_imu(const trajectory::TruthSeries& truth) {
    const double dt = truth.dt_s;
    std::vector<ImuSample> samples;
    if (truth.states.size() < 2) return samples;
    samples.reserve(truth.states.size() - 1);

    NavState prev = NavState::from_state_vector(truth.states.front());
    for (std::size_t k = 1; k < truth.states.size(); ++k) {
        const NavState next = NavState::from_state_vector(truth.states[k]);
        const LocalTerms terms = local_terms(prev);

        ImuSample imu;
        imu.timestamp_s = truth.time_of(k);

        // attitude inverse: Exp(w_ib dt) = C_old^T Exp(w_in dt) C_new
        const Eigen::Quaterniond body_inc = prev.q_nb.conjugate() *
                                            quat_exp(terms.omega_in_n * dt) *
                                            next.q_nb;
        imu.angular_rate_rps = quat_log(body_inc) / dt;

        // velocity inverse of the implicit-midpoint update
        const Eigen::Vector3d v_avg = 0.5 * (prev.v_ned + next.v_ned);
        const Eigen::Vector3d f_ned = (next.v_ned - prev.v_ned) / dt -
                                      terms.gravity_ned +
                                      terms.coriolis_rate.cross(v_avg);
        const Eigen::Quaterniond q_new = quat_exp(-terms.omega_in_n * dt) *
                                         prev.q_nb *
                                         quat_exp(imu.angular_rate_rps * dt);
        const Eigen::Matrix3d c_avg =
            0.5 * (prev.q_nb.toRotationMatrix() + q_new.toRotationMatrix());
        imu.specific_force_mps2 = c_avg.inverse() * f_ned;

        samples.push_back(imu);
        prev = next;
    }
    return samples;
}

std::vector<ImuSample> corrupt_imu(const std::vector<ImuSample>& imu,
                                   const SensorErrorBudget& budget,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto draw_vec = [&](double sigma) {
        return Eigen::Vector3d(sigma * gauss(rng), sigma * gauss(rng),
                               sigma * gauss(rng));
    };
    // diagonals 1 + scale draw, off-diagonals one nonorthogonality draw each
    auto draw_matrix = [&](double scale_sigma, double nonorth_sigma) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        for (int i = 0; i < 3; ++i) {
            m(i, i) += scale_sigma * gauss(rng);
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) m(i, j) = nonorth_sigma * gauss(rng);
            }
        }
        return m;
    };

    const Eigen::Vector3d accel_bias = draw_vec(budget.accel_bias_mps2);
    const Eigen::Matrix3d accel_map =
        draw_matrix(budget.accel_scale, budget.accel_nonorthogonality_rad);
    const Eigen::Vector3d gyro_bias = draw_vec(budget.gyro_bias_rps);
    const Eigen::Matrix3d gyro_map =
        draw_matrix(budget.gyro_scale, budget.gyro_nonorthogonality_rad);

    double rate_hz = 100.0;
    if (imu.size() >= 2) {
        rate_hz = 1.0 / (imu[1].timestamp_s - imu[0].timestamp_s);
    }
    const double accel_noise = budget.accel_noise_density * std::sqrt(rate_hz);
    const double gyro_noise = budget.gyro_noise_density * std::sqrt(rate_hz);

    std::vector<ImuSample> out;
    out.reserve(imu.size());
    for (const ImuSample& s : imu) {
        ImuSample c = s;
        c.specific_force_mps2 =
            accel_map * s.specific_force_mps2 + accel_bias + draw_vec(accel_noise);
        c.angular_rate_rps =
            gyro_map * s.angular_rate_rps + gyro_bias + draw_vec(gyro_noise);
        out.push_back(c);
    }
    return out;
}

}  // namespace gravnav::ins
