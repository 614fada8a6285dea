#include "gravnav/ellipsefit.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace gravnav::ellipsefit {

ConicCoefficients fit_conic(std::span<const gradiometer::PairSample> samples) {
    std::size_t n_valid = 0;
    for (const auto& s : samples) {
        if (s.valid) ++n_valid;
    }
    if (n_valid < 6) {
        throw DegenerateFit("ellipse fit needs at least 6 valid samples, got " +
                            std::to_string(n_valid));
    }

    // Partitioned scatter matrices (Halir-Flusser form of the direct
    // ellipse-specific fit): D1 = [x^2 xy y^2], D2 = [x y 1].
    Eigen::Matrix3d s1 = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d s2 = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d s3 = Eigen::Matrix3d::Zero();
    for (const auto& s : samples) {
        if (!s.valid) continue;
        const double x = s.s0_norm;
        const double y = s.s1_norm;
        const Eigen::Vector3d d1(x * x, x * y, y * y);
        const Eigen::Vector3d d2(x, y, 1.0);
        s1 += d1 * d1.transpose();
        s2 += d1 * d2.transpose();
        s3 += d2 * d2.transpose();
    }

    const Eigen::FullPivLU<Eigen::Matrix3d> s3_lu(s3);
    if (!s3_lu.isInvertible()) {
        throw DegenerateFit("singular linear block (collinear samples)");
    }
    const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
    const Eigen::Matrix3d m_full = s1 + s2 * t;
    // premultiply by C1^-1 for the constraint matrix C1 = [[0,0,2],[0,-1,0],[2,0,0]]
    Eigen::Matrix3d m_reduced;
    m_reduced.row(0) = m_full.row(2) / 2.0;
    m_reduced.row(1) = -m_full.row(1);
    m_reduced.row(2) = m_full.row(0) / 2.0;

    const Eigen::EigenSolver<Eigen::Matrix3d> eig(m_reduced);
    ConicCoefficients out;
    bool found = false;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(eig.eigenvalues()[i].imag()) > 0.0) continue;
        Eigen::Vector3d v = eig.eigenvectors().col(i).real();
        const double norm = v.norm();
        if (!(norm > 0.0)) continue;
        v /= norm;
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        // conditioning threshold: near-degenerate (segment-like) windows
        // report DegenerateFit instead of returning garbage
        if (cond > 1e-10) {
            v /= std::sqrt(cond);
            const Eigen::Vector3d rest = t * v;
            out.a = v(0);
            out.b = v(1);
            out.c = v(2);
            out.d = rest(0);
            out.e = rest(1);
            out.f = rest(2);
            found = true;
            break;
        }
    }
    if (!found) {
        throw DegenerateFit("no well-conditioned ellipse solution");
    }
    if (out.a < 0.0) {
        out.a = -out.a;
        out.b = -out.b;
        out.c = -out.c;
        out.d = -out.d;
        out.e = -out.e;
        out.f = -out.f;
    }
    return out;
}

double phase_from_conic(const ConicCoefficients& conic) {
    const double disc = 4.0 * conic.a * conic.c - conic.b * conic.b;
    if (!(disc > 0.0)) {
        throw NotAnEllipse("4AC - B^2 must be positive, got " +
                           std::to_string(disc));
    }
    const double u = -conic.b / (2.0 * std::sqrt(conic.a * conic.c));
    return std::acos(std::clamp(u, -1.0, 1.0));
}

std::vector<GradientEstimate> sliding_gradient_estimate(
    std::span<const gradiometer::PairSample> stream,
    const gradiometer::GradiometerConfig& cfg, std::size_t window) {
    std::vector<GradientEstimate> estimates;
    std::vector<gradiometer::PairSample> buffer;
    buffer.reserve(window);
    for (const auto& s : stream) {
        if (!s.valid) continue;
        buffer.push_back(s);
        if (buffer.size() < window) continue;
        try {
            const ConicCoefficients conic = fit_conic(buffer);
            const double dphi = phase_from_conic(conic);
            estimates.push_back(
                {buffer.back().timestamp_s, delta_phi_to_gradient(dphi, cfg)});
        } catch (const DegenerateFit&) {
            // gap in the series
        } catch (const NotAnEllipse&) {
            // gap in the series
        }
        buffer.clear();  // non-overlapping windows
    }
    return estimates;
}

}  // namespace gravnav::ellipsefit
