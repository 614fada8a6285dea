// Paired cold-atom interferometer simulation: normalized two-channel
// signals with shot noise, phase noise and the unknown common Raman phase;
// the candidate-ellipse geometry; and the failed-measurement model.
#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace gravnav::gradiometer {

inline constexpr double kReducedPlanck = 1.054571817e-34;  // J s

/// Sensor and noise parameters of the two-interferometer gradiometer.
struct GradiometerConfig {
    double f_meas_hz = 1.0;
    double atom_mass_kg = 2.20693925e-25;  // caesium-133
    double pulse_interval_s = 0.16;        // T, pi/2 to pi
    double recoil_velocity_mps = 7.0e-3;
    double delta_z_m = 0.5;  ///< vertical interferometer separation
    double n_bar = 1e6;      ///< mean atoms per cloud
    double eta = 0.5;        ///< fringe contrast
    double sigma_phi_rad = 0.0;
    double s0_bias = 0.0;  ///< raw signal biases of Eqs. (1)-(2); default 0
    double s1_bias = 0.0;
    double failure_probability = 0.0;
    double beam_radius_m = 5e-3;
    /// Random-walk intensity of the cloud centroid, m/sqrt(s), at unit
    /// vibration scale.
    double random_walk_intensity = 1.5e-3;

    /// Effective Raman wave number k_eff = m v_rec / hbar [1/m].
    double k_eff() const {
        return atom_mass_kg * recoil_velocity_mps / kReducedPlanck;
    }

    /// Phase per unit gradient: k_eff * dz * T^2 [rad / s^-2].
    double phase_scale() const {
        return k_eff() * delta_z_m * pulse_interval_s * pulse_interval_s;
    }

    /// Expected signal-measurement error, sqrt(1/N + sigma_phi^2).
    double sigma_s() const;
};

/// One normalized measurement pair (S~0, S~1). Failed measurements carry
/// valid = false and are data, not errors.
struct PairSample {
    double s0_norm = 0.0;
    double s1_norm = 0.0;
    bool valid = true;
    double timestamp_s = 0.0;
};

/// Candidate measurement-pair locus: (sin psi, sin(psi - delta_phi)) as the
/// common phase psi sweeps. The shape depends only on the phase difference,
/// so no absolute-phase field is needed.
struct CandidateEllipse {
    double delta_phi_rad = 0.0;
};

/// delta_phi = k_eff * dz * gradient * T^2.
double gradient_to_delta_phi(double gradient_s2, const GradiometerConfig& cfg);

/// Inverse of gradient_to_delta_phi.
double delta_phi_to_gradient(double delta_phi_rad, const GradiometerConfig& cfg);

/// Point on the candidate ellipse at parameter psi.
std::pair<double, double> ellipse_point(const CandidateEllipse& ellipse,
                                        double psi_rad);

/// Minimum Euclidean distance from the pair to the candidate ellipse:
/// 64-point coarse scan plus golden-section refinement (deterministic,
/// derivative-free), refined to |delta d| < 1e-10.
double min_distance(const PairSample& pair, const CandidateEllipse& ellipse);

/// Draw one measurement pair at the given true gradient and upper-cloud
/// gravity. The RNG stream consumption is fixed (all noise variates are
/// drawn regardless of their sigmas) so runs with different noise settings
/// stay draw-for-draw comparable.
PairSample sample_pair(double gradient_s2, double g_upper_mps2,
                       const GradiometerConfig& cfg, std::mt19937_64& rng,
                       double vibration_scale = 1.0);

/// Failed-measurement model: a 2-D random walk of the cloud centroid over
/// the 2T measurement, scaled by the vibration level, fails when it leaves
/// the beam radius at a pulse time; plus an independent failure draw with
/// `failure_probability`. Consumes a fixed five-variate block of the stream.
bool failure_model(const GradiometerConfig& cfg, std::mt19937_64& rng,
                   double vibration_scale = 1.0);

}  // namespace gravnav::gradiometer
