// Strapdown INS simulation: IMU synthesis from truth kinematics, the
// aviation-grade error model, local-navigation-frame mechanization and
// altimeter aiding of the vertical channel.
//
// The discrete step and the IMU synthesizer are exact inverses of each
// other: mechanizing the error-free synthetic IMU reproduces the truth
// series to floating-point accuracy, which pins the closed-loop contract
// independent of integration-scheme truncation error.
#pragma once

#include "gravnav/errors.hpp"
#include "gravnav/geodesy.hpp"
#include "gravnav/trajectory.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <vector>

namespace gravnav::ins {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2 per g0

/// One IMU epoch: average specific force and angular rate over the step
/// ending at `timestamp_s`.
struct ImuSample {
    Eigen::Vector3d specific_force_mps2 = Eigen::Vector3d::Zero();
    Eigen::Vector3d angular_rate_rps = Eigen::Vector3d::Zero();
    double timestamp_s = 0.0;
};

/// Aviation-grade 1-sigma error budget.
struct SensorErrorBudget {
    double accel_bias_mps2 = 30e-6 * kStandardGravity;
    double accel_nonorthogonality_rad = 10e-6;
    double accel_scale = 10e-6;
    double accel_noise_density = 15e-6 * kStandardGravity;  // (m/s^2)/sqrt(Hz)
    double gyro_bias_rps = 0.05e-6;
    double gyro_nonorthogonality_rad = 10e-6;
    double gyro_scale = 10e-6;
    double gyro_noise_density = 2.0e-6;  // (rad/s)/sqrt(Hz)

    static SensorErrorBudget aviation_grade() { return {}; }
    static SensorErrorBudget zero() {
        return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    }
};

/// Navigation solution: the state vector at a solution timestamp.
struct NavSolution {
    trajectory::StateVector state;
    double t_s = 0.0;
};

/// Internal mechanization state (position, NED velocity, body-to-NED
/// attitude quaternion).
struct NavState {
    geodesy::GeodeticPosition position;
    Eigen::Vector3d v_ned = Eigen::Vector3d::Zero();
    Eigen::Quaterniond q_nb = Eigen::Quaterniond::Identity();

    static NavState from_state_vector(const trajectory::StateVector& x);
    trajectory::StateVector to_state_vector() const;
};

struct AltimeterConfig {
    double sigma_m = 5.0;
    double rate_hz = 1.0;
    double position_gain = 0.1;        // per update
    double velocity_gain_per_s = 0.05;  // damping on the vertical channel
};

struct MechanizerOptions {
    double dt_s = 0.01;
    /// Divergence guard: |v| above this factor times the configured speed
    /// raises Divergence.
    double divergence_speed_factor = 10.0;
    double configured_speed_mps = 100.0;
};

/// Sequential strapdown mechanization in the local NED frame.
class InsMechanizer {
  public:
    InsMechanizer(const NavState& initial, const MechanizerOptions& options);

    /// Advance one step with the given IMU sample. Throws Divergence when
    /// the velocity guard trips.
    void step(const ImuSample& imu);

    /// First-order altimeter blend of the vertical channel; horizontal
    /// states untouched.
    void aid_altimeter(double measured_alt_m, const AltimeterConfig& cfg);

    const NavState& state() const { return state_; }
    void set_state(const NavState& state) { state_ = state; }
    double time_s() const { return t_; }
    void set_time(double t) { t_ = t; }

    NavSolution solution() const;

  private:
    NavState state_;
    MechanizerOptions options_;
    double t_ = 0.0;
    // last-step derived quantities, reported in the solution state vector
    Eigen::Vector3d last_accel_ned_ = Eigen::Vector3d::Zero();
    Eigen::Vector3d last_rate_body_ = Eigen::Vector3d::Zero();
};

/// One mechanization step as a free function (constructs a mechanizer from
/// `prev`, applies `imu`, returns the updated solution).
NavSolution mechanize(const NavSolution& prev, const ImuSample& imu,
                      const MechanizerOptions& options);

/// Altimeter aiding as a free function on a solution.
NavSolution altimeter_aid(const NavSolution& solution, double measured_alt_m,
                          const AltimeterConfig& cfg = {});

/// Error-free IMU stream whose mechanization reproduces `truth` exactly:
/// sample k is the discrete inverse of the mechanization step from truth
/// state k-1 to k. Output has truth.size()-1 samples, timestamps k*dt.
std::vector<ImuSample> synthesize_imu(const trajectory::TruthSeries& truth);

/// Apply the error budget: one fixed bias triple and one misalignment/scale
/// matrix per sensor triad per run, plus per-sample white noise with the
/// stated density scaled by sqrt(rate). Deterministic per seed.
std::vector<ImuSample> corrupt_imu(const std::vector<ImuSample>& imu,
                                   const SensorErrorBudget& budget,
                                   std::uint64_t seed);

/// Rotation-vector exponential/logarithm helpers (stable at small angles).
Eigen::Quaterniond quat_exp(const Eigen::Vector3d& rotvec);
Eigen::Vector3d quat_log(const Eigen::Quaterniond& q);

}  // namespace gravnav::ins
