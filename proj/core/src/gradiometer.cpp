#include "gravnav/gradiometer.hpp"

#include <cmath>

namespace gravnav::gradiometer {

double GradiometerConfig::sigma_s() const {
    return std::sqrt(1.0 / n_bar + sigma_phi_rad * sigma_phi_rad);
}

double gradient_to_delta_phi(double gradient_s2, const GradiometerConfig& cfg) {
    return cfg.phase_scale() * gradient_s2;
}

double delta_phi_to_gradient(double delta_phi_rad, const GradiometerConfig& cfg) {
    return delta_phi_rad / cfg.phase_scale();
}

std::pair<double, double> ellipse_point(const CandidateEllipse& ellipse,
                                        double psi_rad) {
    return {std::sin(psi_rad), std::sin(psi_rad - ellipse.delta_phi_rad)};
}

namespace {

/// Squared distance from (x, y) to the ellipse point at psi, written with
/// the angle-addition identity so refinement needs one sincos per call.
struct DistanceField {
    double x, y, cos_dphi, sin_dphi;

    double operator()(double psi) const {
        const double s = std::sin(psi);
        const double c = std::cos(psi);
        const double dx = s - x;
        const double dy = s * cos_dphi - c * sin_dphi - y;
        return dx * dx + dy * dy;
    }
};

}  // namespace

double min_distance(const PairSample& pair, const CandidateEllipse& ellipse) {
    const DistanceField d2{pair.s0_norm, pair.s1_norm,
                           std::cos(ellipse.delta_phi_rad),
                           std::sin(ellipse.delta_phi_rad)};

    // coarse scan
    constexpr int kCoarse = 64;
    constexpr double kStep = 2.0 * M_PI / kCoarse;
    int best = 0;
    double best_val = d2(0.0);
    for (int i = 1; i < kCoarse; ++i) {
        const double v = d2(i * kStep);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    // golden-section refinement inside the bracketing neighbours
    const double inv_phi = 0.6180339887498949;
    double a = (best - 1) * kStep;
    double b = (best + 1) * kStep;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = d2(x1);
    double f2 = d2(x2);
    // interval shrink 0.618^60 ~ 3e-13 rad; distance converges far earlier
    for (int iter = 0; iter < 60; ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = d2(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = d2(x2);
        }
        if (std::abs(f1 - f2) < 1e-21 && (b - a) < 1e-7) break;
    }
    return std::sqrt(std::min(f1, f2));
}

bool failure_model(const GradiometerConfig& cfg, std::mt19937_64& rng,
                   double vibration_scale) {
    // fixed stream block: 4 gaussians (walk) + 1 uniform (random failure)
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double g1 = gauss(rng);
    const double g2 = gauss(rng);
    const double g3 = gauss(rng);
    const double g4 = gauss(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);

    bool ok = true;
    const double step_sigma = cfg.random_walk_intensity * vibration_scale *
                              std::sqrt(cfg.pulse_interval_s);
    if (step_sigma > 0.0) {
        // centroid displacement at the pi and final pi/2 pulses
        const double x1 = step_sigma * g1;
        const double y1 = step_sigma * g2;
        const double x2 = x1 + step_sigma * g3;
        const double y2 = y1 + step_sigma * g4;
        const double r2 = cfg.beam_radius_m * cfg.beam_radius_m;
        if (x1 * x1 + y1 * y1 > r2 || x2 * x2 + y2 * y2 > r2) {
            ok = false;
        }
    }
    if (u < cfg.failure_probability) {
        ok = false;
    }
    return ok;
}

PairSample sample_pair(double gradient_s2, double g_upper_mps2,
                       const GradiometerConfig& cfg, std::mt19937_64& rng,
                       double vibration_scale) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double raman_phase = phase(rng);
    const double dn0 = gauss(rng) * std::sqrt(cfg.n_bar);
    const double dn1 = gauss(rng) * std::sqrt(cfg.n_bar);
    // lower-interferometer phase noise; the upper channel's is subsumed in
    // the common Raman phase
    const double dphi_noise = gauss(rng) * cfg.sigma_phi_rad;

    const double phi0 = cfg.k_eff() * g_upper_mps2 * cfg.pulse_interval_s *
                        cfg.pulse_interval_s;
    const double delta_phi = gradient_to_delta_phi(gradient_s2, cfg);

    PairSample out;
    const double denom = cfg.eta * cfg.n_bar;
    out.s0_norm = (1.0 + dn0 / cfg.n_bar) * std::sin(phi0 + raman_phase) +
                  cfg.s0_bias / denom;
    out.s1_norm = (1.0 + dn1 / cfg.n_bar) *
                      std::sin(phi0 - delta_phi + raman_phase + dphi_noise) +
                  cfg.s1_bias / denom;
    out.valid = failure_model(cfg, rng, vibration_scale);
    return out;
}

}  // namespace gravnav::gradiometer
