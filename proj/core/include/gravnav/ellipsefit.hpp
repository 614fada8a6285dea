// Conventional gradient extraction: batch conic least-squares ellipse
// fitting over windows of measurement pairs, phase extraction via
// arccos(-B / 2 sqrt(AC)), and the sliding-window gradient estimator the
// partial-measurement method is compared against.
#pragma once

#include "gravnav/errors.hpp"
#include "gravnav/gradiometer.hpp"

#include <span>
#include <vector>

namespace gravnav::ellipsefit {

/// General-conic coefficients A x^2 + B xy + C y^2 + D x + E y + F = 0,
/// normalized to 4AC - B^2 = 1 with the sign fixed by A > 0.
struct ConicCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double f = 0.0;
};

/// Direct least-squares conic fit constrained to ellipses (4AC - B^2 = 1).
/// Requires at least 6 valid samples; throws DegenerateFit for collinear or
/// otherwise singular sample sets (conditioning threshold 1e-10).
ConicCoefficients fit_conic(std::span<const gradiometer::PairSample> samples);

/// Phase difference in [0, pi] from a fitted conic.
/// Throws NotAnEllipse when 4AC - B^2 <= 0.
double phase_from_conic(const ConicCoefficients& conic);

/// One sliding-window gradient estimate.
struct GradientEstimate {
    double timestamp_s = 0.0;  ///< time of the window's last sample
    double gradient_s2 = 0.0;
};

/// Non-overlapping windows of `window` valid samples (failed samples are
/// skipped); each window is fitted and inverted through the phase scale.
/// Windows that fail to fit are dropped, leaving a gap in the series.
std::vector<GradientEstimate> sliding_gradient_estimate(
    std::span<const gradiometer::PairSample> stream,
    const gradiometer::GradiometerConfig& cfg, std::size_t window = 20);

}  // namespace gravnav::ellipsefit
