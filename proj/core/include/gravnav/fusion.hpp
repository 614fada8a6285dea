// Bootstrap particle filter over INS correction vectors. Each particle is a
// candidate NED-frame correction to the navigation solution; particles are
// reweighted by the distance between the measured signal pair and the
// candidate ellipse implied by the map gradient at the corrected position,
// and fed back through a fixed-gain correction with recentering.
#pragma once

#include "gravnav/geodesy.hpp"
#include "gravnav/gradiometer.hpp"
#include "gravnav/gravmap.hpp"
#include "gravnav/ins.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gravnav::fusion {

/// Correction to the INS solution: horizontal position in NED metres,
/// body-axis velocity in m/s, NED-referenced attitude in degrees.
struct CorrectionVector {
    double d_north_m = 0.0;
    double d_east_m = 0.0;
    double d_u_mps = 0.0;
    double d_v_mps = 0.0;
    double d_w_mps = 0.0;
    double d_psi_deg = 0.0;
    double d_theta_deg = 0.0;
    double d_phi_deg = 0.0;

    CorrectionVector& operator+=(const CorrectionVector& o);
    CorrectionVector& operator-=(const CorrectionVector& o);
    CorrectionVector operator*(double k) const;
};

struct Particle {
    CorrectionVector correction;
    double weight = 0.0;
};

using Ensemble = std::vector<Particle>;

struct FilterConfig {
    int n_particles = 500;
    double resample_threshold_fraction = 0.5;  ///< of N_p, on N_eff
    double alpha = 0.05;                       ///< fixed correction gain
    /// Reweighting width. Non-positive means "derive from the gradiometer
    /// noise model", sqrt(1/N + sigma_phi^2).
    double sigma_s = 0.0;
    double sigma_pos_m = 25.0;     ///< process noise per axis per step
    double sigma_vel_mps = 0.05;
    double sigma_att_deg = 0.005;
    double delta_t_s = 1.0;
    /// Initial correction spread, as a multiple of the per-axis process
    /// noise sigma.
    double initial_spread_factor = 3.0;

    double effective_sigma_s(const gradiometer::GradiometerConfig& g) const {
        return sigma_s > 0.0 ? sigma_s : g.sigma_s();
    }
};

/// Per-epoch diagnostics for the CSV record.
struct StepDiagnostics {
    double n_eff = 0.0;
    bool resampled = false;
    bool weight_underflow = false;
    CorrectionVector mean_correction;     ///< before the gain
    CorrectionVector applied_correction;  ///< alpha * mean
    /// Full filter position estimate (nav plus residual mean correction).
    geodesy::GeodeticPosition estimate_position;
    double gradient_at_mean_s2 = 0.0;  ///< map value at estimate_position
    bool measurement_used = false;
};

/// Gaussian-initialized ensemble with uniform weights.
Ensemble init_particles(const FilterConfig& cfg, std::mt19937_64& rng);

/// Reweighting kernel: exp(-d^2 / (2 sigma_s^2)).
double likelihood(double distance, double sigma_s);

/// Eq.-style reweighting: w ~ exp(-d^2 / 2 sigma_S^2) * w, then normalize.
/// If every unnormalized weight underflows to zero the ensemble is reset to
/// uniform (model mismatch); the return value reports that reset.
bool reweight(Ensemble& ensemble, const gradiometer::PairSample& pair,
              const ins::NavSolution& nav, const gravmap::MapSet& maps,
              const FilterConfig& cfg, const gradiometer::GradiometerConfig& g);

/// N_eff = 1 / sum(w^2).
double effective_particle_count(const Ensemble& ensemble);

/// Systematic (low-variance) resampling; output weights uniform.
void resample(Ensemble& ensemble, std::mt19937_64& rng);

/// Weight-weighted component-wise mean correction.
CorrectionVector mean_correction(const Ensemble& ensemble);

/// Shift the navigation solution by alpha times the mean correction and
/// subtract the applied correction from every particle, so each particle's
/// absolute hypothesis is preserved. Position and velocity components feed
/// back into the solution; attitude components remain estimate-only (an
/// applied attitude shift has no observable signature afterwards, so
/// feeding it back accumulates attribution noise in the INS attitude).
void apply_and_recenter(ins::NavSolution& nav, Ensemble& ensemble,
                        const FilterConfig& cfg);

/// Kinematic prediction over delta_t: velocity corrections integrate into
/// position through the nav attitude, heading error couples into
/// cross-track drift at ground speed, then Gaussian process noise.
void predict(Ensemble& ensemble, const ins::NavSolution& nav,
             const FilterConfig& cfg, std::mt19937_64& rng);

/// One full fusion epoch: reweight (valid pairs only), conditional
/// resample, mean, apply_and_recenter, predict.
StepDiagnostics fusion_step(ins::NavSolution& nav, Ensemble& ensemble,
                            const gradiometer::PairSample& pair,
                            const gravmap::MapSet& maps,
                            const FilterConfig& cfg,
                            const gradiometer::GradiometerConfig& g,
                            std::mt19937_64& rng);

}  // namespace gravnav::fusion
