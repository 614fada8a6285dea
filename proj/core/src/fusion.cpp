#include "gravnav/fusion.hpp"

#include <cmath>

namespace gravnav::fusion {

using geodesy::kDegToRad;

CorrectionVector& CorrectionVector::operator+=(const CorrectionVector& o) {
    d_north_m += o.d_north_m;
    d_east_m += o.d_east_m;
    d_u_mps += o.d_u_mps;
    d_v_mps += o.d_v_mps;
    d_w_mps += o.d_w_mps;
    d_psi_deg += o.d_psi_deg;
    d_theta_deg += o.d_theta_deg;
    d_phi_deg += o.d_phi_deg;
    return *this;
}

CorrectionVector& CorrectionVector::operator-=(const CorrectionVector& o) {
    d_north_m -= o.d_north_m;
    d_east_m -= o.d_east_m;
    d_u_mps -= o.d_u_mps;
    d_v_mps -= o.d_v_mps;
    d_w_mps -= o.d_w_mps;
    d_psi_deg -= o.d_psi_deg;
    d_theta_deg -= o.d_theta_deg;
    d_phi_deg -= o.d_phi_deg;
    return *this;
}

CorrectionVector CorrectionVector::operator*(double k) const {
    CorrectionVector out = *this;
    out.d_north_m *= k;
    out.d_east_m *= k;
    out.d_u_mps *= k;
    out.d_v_mps *= k;
    out.d_w_mps *= k;
    out.d_psi_deg *= k;
    out.d_theta_deg *= k;
    out.d_phi_deg *= k;
    return out;
}

Ensemble init_particles(const FilterConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Ensemble ensemble(static_cast<std::size_t>(cfg.n_particles));
    const double k = cfg.initial_spread_factor;
    for (Particle& p : ensemble) {
        p.correction.d_north_m = k * cfg.sigma_pos_m * gauss(rng);
        p.correction.d_east_m = k * cfg.sigma_pos_m * gauss(rng);
        p.correction.d_u_mps = k * cfg.sigma_vel_mps * gauss(rng);
        p.correction.d_v_mps = k * cfg.sigma_vel_mps * gauss(rng);
        p.correction.d_w_mps = k * cfg.sigma_vel_mps * gauss(rng);
        p.correction.d_psi_deg = k * cfg.sigma_att_deg * gauss(rng);
        p.correction.d_theta_deg = k * cfg.sigma_att_deg * gauss(rng);
        p.correction.d_phi_deg = k * cfg.sigma_att_deg * gauss(rng);
        p.weight = 1.0 / cfg.n_particles;
    }
    return ensemble;
}

double likelihood(double distance, double sigma_s) {
    return std::exp(-distance * distance / (2.0 * sigma_s * sigma_s));
}

bool reweight(Ensemble& ensemble, const gradiometer::PairSample& pair,
              const ins::NavSolution& nav, const gravmap::MapSet& maps,
              const FilterConfig& cfg,
              const gradiometer::GradiometerConfig& g) {
    if (!pair.valid) return false;
    const double sigma = cfg.effective_sigma_s(g);
    const geodesy::GeodeticPosition nav_pos = nav.state.position();

    double total = 0.0;
    for (Particle& p : ensemble) {
        const geodesy::GeodeticPosition candidate = geodesy::ned_to_geodetic(
            nav_pos, {p.correction.d_north_m, p.correction.d_east_m, 0.0});
        const double gradient = maps.query_gradient(candidate);
        const gradiometer::CandidateEllipse ellipse{
            gradiometer::gradient_to_delta_phi(gradient, g)};
        const double d = gradiometer::min_distance(pair, ellipse);
        p.weight *= likelihood(d, sigma);
        total += p.weight;
    }
    if (total <= 0.0) {
        // model mismatch: every likelihood underflowed; reset to uniform
        const double w = 1.0 / static_cast<double>(ensemble.size());
        for (Particle& p : ensemble) p.weight = w;
        return true;
    }
    for (Particle& p : ensemble) p.weight /= total;
    return false;
}

double effective_particle_count(const Ensemble& ensemble) {
    double sum_sq = 0.0;
    for (const Particle& p : ensemble) sum_sq += p.weight * p.weight;
    return 1.0 / sum_sq;
}

void resample(Ensemble& ensemble, std::mt19937_64& rng) {
    const std::size_t n = ensemble.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double start = unit(rng) / static_cast<double>(n);

    Ensemble out;
    out.reserve(n);
    double cumulative = ensemble.front().weight;
    std::size_t i = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double target = start + static_cast<double>(k) / static_cast<double>(n);
        while (cumulative < target && i + 1 < n) {
            ++i;
            cumulative += ensemble[i].weight;
        }
        Particle p = ensemble[i];
        p.weight = 1.0 / static_cast<double>(n);
        out.push_back(p);
    }
    ensemble = std::move(out);
}

CorrectionVector mean_correction(const Ensemble& ensemble) {
    CorrectionVector mean;
    for (const Particle& p : ensemble) {
        mean += p.correction * p.weight;
    }
    return mean;
}

void apply_and_recenter(ins::NavSolution& nav, Ensemble& ensemble,
                        const FilterConfig& cfg) {
    // Position and velocity corrections feed back into the solution.
    // Attitude corrections stay estimate-only: applied attitude shifts are
    // unobservable afterwards (recentering erases the ensemble's memory of
    // them and level flight gives a wrong heading no dynamic signature), so
    // feeding them back lets attribution noise ratchet the INS attitude
    // until the filter loses lock.
    CorrectionVector applied = mean_correction(ensemble) * cfg.alpha;
    applied.d_psi_deg = 0.0;
    applied.d_theta_deg = 0.0;
    applied.d_phi_deg = 0.0;

    const geodesy::GeodeticPosition shifted = geodesy::ned_to_geodetic(
        nav.state.position(), {applied.d_north_m, applied.d_east_m, 0.0});
    nav.state.latitude_deg = shifted.latitude_deg;
    nav.state.longitude_deg = shifted.longitude_deg;
    nav.state.u_mps += applied.d_u_mps;
    nav.state.v_mps += applied.d_v_mps;
    nav.state.w_mps += applied.d_w_mps;

    for (Particle& p : ensemble) {
        p.correction -= applied;
    }
}

void predict(Ensemble& ensemble, const ins::NavSolution& nav,
             const FilterConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = cfg.delta_t_s;

    const Eigen::Matrix3d c_nb = geodesy::body_to_ned(nav.state.euler());
    const double psi_rad = nav.state.psi_deg * kDegToRad;
    const double sin_psi = std::sin(psi_rad);
    const double cos_psi = std::cos(psi_rad);
    const Eigen::Vector3d v_ned =
        c_nb * Eigen::Vector3d(nav.state.u_mps, nav.state.v_mps, nav.state.w_mps);
    const double ground_speed = std::hypot(v_ned.x(), v_ned.y());
    const double gravity = geodesy::normal_gravity(nav.state.latitude_deg,
                                                   nav.state.altitude_m);

    for (Particle& p : ensemble) {
        CorrectionVector& c = p.correction;
        // velocity corrections integrate into horizontal position
        const Eigen::Vector3d dv_ned =
            c_nb * Eigen::Vector3d(c.d_u_mps, c.d_v_mps, c.d_w_mps);
        c.d_north_m += dv_ned.x() * dt;
        c.d_east_m += dv_ned.y() * dt;
        // heading correction rotates the true velocity relative to the nav
        // estimate: cross-track growth at ground speed
        const double dpsi_rad = c.d_psi_deg * kDegToRad;
        c.d_north_m += -sin_psi * ground_speed * dpsi_rad * dt;
        c.d_east_m += cos_psi * ground_speed * dpsi_rad * dt;
        // tilt corrections claim the nav mis-resolves gravity: the implied
        // velocity error grows at g times the tilt, which is what makes
        // pitch/roll hypotheses observable at all
        const double dphi_rad = c.d_phi_deg * kDegToRad;
        const double dtheta_rad = c.d_theta_deg * kDegToRad;
        const double tilt_n = dphi_rad * cos_psi - dtheta_rad * sin_psi;
        const double tilt_e = dphi_rad * sin_psi + dtheta_rad * cos_psi;
        const Eigen::Vector3d dv_growth_body =
            c_nb.transpose() *
            Eigen::Vector3d(-gravity * tilt_e, gravity * tilt_n, 0.0) * dt;
        c.d_u_mps += dv_growth_body.x();
        c.d_v_mps += dv_growth_body.y();
        c.d_w_mps += dv_growth_body.z();
        // process noise
        c.d_north_m += cfg.sigma_pos_m * gauss(rng);
        c.d_east_m += cfg.sigma_pos_m * gauss(rng);
        c.d_u_mps += cfg.sigma_vel_mps * gauss(rng);
        c.d_v_mps += cfg.sigma_vel_mps * gauss(rng);
        c.d_w_mps += cfg.sigma_vel_mps * gauss(rng);
        c.d_psi_deg += cfg.sigma_att_deg * gauss(rng);
        c.d_theta_deg += cfg.sigma_att_deg * gauss(rng);
        c.d_phi_deg += cfg.sigma_att_deg * gauss(rng);
    }
}

StepDiagnostics fusion_step(ins::NavSolution& nav, Ensemble& ensemble,
                            const gradiometer::PairSample& pair,
                            const gravmap::MapSet& maps,
                            const FilterConfig& cfg,
                            const gradiometer::GradiometerConfig& g,
                            std::mt19937_64& rng) {
    StepDiagnostics diag;
    diag.measurement_used = pair.valid;
    if (pair.valid) {
        diag.weight_underflow = reweight(ensemble, pair, nav, maps, cfg, g);
    }
    diag.n_eff = effective_particle_count(ensemble);
    if (diag.n_eff <
        cfg.resample_threshold_fraction * static_cast<double>(ensemble.size())) {
        resample(ensemble, rng);
        diag.resampled = true;
    }
    diag.mean_correction = mean_correction(ensemble);
    diag.applied_correction = diag.mean_correction * cfg.alpha;
    apply_and_recenter(nav, ensemble, cfg);
    // full filter estimate: nav plus the residual mean correction
    const CorrectionVector residual = mean_correction(ensemble);
    diag.estimate_position = geodesy::ned_to_geodetic(
        nav.state.position(), {residual.d_north_m, residual.d_east_m, 0.0});
    diag.gradient_at_mean_s2 = maps.query_gradient(diag.estimate_position);
    predict(ensemble, nav, cfg, rng);
    return diag;
}

}  // namespace gravnav::fusion
