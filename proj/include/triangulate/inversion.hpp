#ifndef TRIANGULATE_INVERSION_HPP
#define TRIANGULATE_INVERSION_HPP

#include <cmath>
#include <string>

#include "triangulate/errors.hpp"

namespace triangulate {

/// Precision ratios backed out of observed combining weights:
/// ratio_c = sigma_c / sigma_p, ratio_i = sigma_i / sigma_p.
struct ImpliedPrecisions {
    double ratio_c = 0.0;
    double ratio_i = 0.0;
};

/// Invert observed interior weights (kappa_i on the intrinsic leg,
/// kappa_c on the comparables leg) into the sigma ratios that would
/// make them the minimum-variance choice at correlation rho.  Assumes
/// the intrinsic error is uncorrelated with market noise.
inline ImpliedPrecisions implied_ratios(double kappa_i, double kappa_c, double rho) {
    if (!std::isfinite(kappa_i) || !std::isfinite(kappa_c) || !std::isfinite(rho))
        throw InfeasibleWeights("weights and rho must be finite");
    if (rho <= -1.0 || rho >= 1.0)
        throw InfeasibleWeights("rho must lie strictly inside (-1, 1)");
    if (kappa_i <= 0.0)
        throw InfeasibleWeights(
            "kappa_i on the boundary: zero intrinsic weight implies sigma_i -> infinity");
    if (kappa_c <= 0.0)
        throw InfeasibleWeights(
            "kappa_c on the boundary: zero comparables weight implies sigma_c -> infinity");
    if (kappa_i + kappa_c >= 1.0)
        throw InfeasibleWeights(
            "price weight on the boundary: zero market weight implies sigma_p -> infinity");

    const double wp = 1.0 - kappa_i - kappa_c;
    const double b = 1.0 - kappa_i - 2.0 * kappa_c;
    const double disc = b * b * rho * rho + 4.0 * wp * kappa_c;
    if (disc < 0.0)
        throw InfeasibleWeights("negative discriminant: no real sigma ratio matches these weights");

    const double ratio_c = (b * rho + std::sqrt(disc)) / (2.0 * kappa_c);
    const double ratio_i =
        std::sqrt((1.0 - rho * rho) * kappa_c / ((1.0 + ratio_c * rho) * kappa_i)) * ratio_c;
    return ImpliedPrecisions{ratio_c, ratio_i};
}

}  // namespace triangulate

#endif
