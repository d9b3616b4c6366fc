#ifndef TRIANGULATE_CORE_HPP
#define TRIANGULATE_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "triangulate/errors.hpp"

namespace triangulate {

/// Noise model of the three value estimates: market price P with error
/// std dev sigma_p, intrinsic estimate V_I with sigma_i, comparables
/// estimate V_C with sigma_c. rho is corr(market noise, comparables
/// error); rho_i is corr(market noise, intrinsic error), zero in the
/// baseline model.
struct TriangulationParams {
    double sigma_p = 0.0;
    double sigma_i = 0.0;
    double sigma_c = 0.0;
    double rho = 0.0;
    double rho_i = 0.0;
};

/// Combining weights on (P, V_I, V_C). Always sum to one.
struct Weights {
    double w_price = 0.0;
    double w_intrinsic = 0.0;
    double w_comparables = 0.0;

    double sum() const { return w_price + w_intrinsic + w_comparables; }
};

struct EstimateTriple {
    double price = 0.0;
    double intrinsic = 0.0;
    double comparables = 0.0;
};

struct CombinedValue {
    double value = 0.0;
    double variance = 0.0;
};

/// N-way error covariance of deviations (estimate - V).
struct CovarianceSpec {
    std::vector<std::string> labels;
    Eigen::MatrixXd matrix;
};

namespace detail {

inline void check_finite(double x, const char* name) {
    if (!std::isfinite(x))
        throw InvalidParam(std::string(name) + " must be finite");
}

inline int count_zero_sigmas(const TriangulationParams& p) {
    return (p.sigma_p == 0.0) + (p.sigma_i == 0.0) + (p.sigma_c == 0.0);
}

}  // namespace detail

inline void validate(const TriangulationParams& p) {
    detail::check_finite(p.sigma_p, "sigma_p");
    detail::check_finite(p.sigma_i, "sigma_i");
    detail::check_finite(p.sigma_c, "sigma_c");
    detail::check_finite(p.rho, "rho");
    detail::check_finite(p.rho_i, "rho_i");
    if (p.sigma_p < 0.0 || p.sigma_i < 0.0 || p.sigma_c < 0.0)
        throw InvalidParam("standard errors must be non-negative");
    if (p.rho < -1.0 || p.rho > 1.0)
        throw InvalidParam("rho must lie in [-1, 1]");
    if (p.rho_i < -1.0 || p.rho_i > 1.0)
        throw InvalidParam("rho_i must lie in [-1, 1]");
}

/// Variance of the combined estimate V-hat - V under the full noise
/// model.  Expanding V-hat = V - w_p e + k_I e_I + k_C e_C (errors of
/// the intrinsic and comparables legs are mutually uncorrelated) gives
///   var = w_p^2 s^2 + k_I^2 s_I^2 + k_C^2 s_C^2
///       - 2 w_p k_C rho s s_C - 2 w_p k_I rho_i s s_I.
/// At rho_i = 0 this is the two-correlation expression the closed-form
/// weights minimize.
inline double combined_variance(const Weights& w, const TriangulationParams& p) {
    const double wp = w.w_price, ki = w.w_intrinsic, kc = w.w_comparables;
    return wp * wp * p.sigma_p * p.sigma_p + ki * ki * p.sigma_i * p.sigma_i +
           kc * kc * p.sigma_c * p.sigma_c -
           2.0 * wp * kc * p.rho * p.sigma_p * p.sigma_c -
           2.0 * wp * ki * p.rho_i * p.sigma_p * p.sigma_i;
}

namespace detail {

// Exact zero sigmas short-circuit to the degenerate weight vector; two
// zeros leave the minimizer undefined.
inline bool degenerate_weights(const TriangulationParams& p, Weights& out) {
    const int zeros = count_zero_sigmas(p);
    if (zeros >= 2)
        throw ZeroDenominator("two or more estimates are exact; weights are ill-defined");
    if (zeros == 0) return false;
    if (p.sigma_p == 0.0)
        out = Weights{1.0, 0.0, 0.0};
    else if (p.sigma_i == 0.0)
        out = Weights{0.0, 1.0, 0.0};
    else
        out = Weights{0.0, 0.0, 1.0};
    return true;
}

}  // namespace detail

/// Minimum-variance combining weights when the intrinsic error is
/// uncorrelated with market noise (rho_i = 0).
inline Weights theorem1_weights(const TriangulationParams& params) {
    validate(params);
    Weights degenerate;
    if (detail::degenerate_weights(params, degenerate)) return degenerate;

    const double s = params.sigma_p, si = params.sigma_i, sc = params.sigma_c;
    const double r = params.rho;
    const double den =
        (1.0 - r * r) * s * s * sc * sc + (s * s + sc * sc + 2.0 * r * s * sc) * si * si;
    if (den <= 0.0)
        throw ZeroDenominator("weight denominator is not positive");
    const double ki = (1.0 - r * r) * s * s * sc * sc / den;
    const double kc = (s + r * sc) * s * si * si / den;
    return Weights{1.0 - ki - kc, ki, kc};
}

/// Minimum-variance combining weights allowing corr(intrinsic error,
/// market noise) = rho_i.  Reduces to theorem1_weights at rho_i = 0.
inline Weights generalized_weights(const TriangulationParams& params) {
    validate(params);
    Weights degenerate;
    if (detail::degenerate_weights(params, degenerate)) return degenerate;

    const double s = params.sigma_p, si = params.sigma_i, sc = params.sigma_c;
    const double r = params.rho, ri = params.rho_i;
    const double den = (1.0 - r * r) * s * s * sc * sc +
                       2.0 * (r * s + sc) * ri * s * sc * si +
                       ((1.0 - ri * ri) * s * s + 2.0 * r * s * sc + sc * sc) * si * si;
    if (den <= 0.0)
        throw ZeroDenominator("weight denominator is not positive");
    const double ki = ((1.0 - r * r) * s * sc + (r * s + sc) * ri * si) * s * sc / den;
    const double kc = ((1.0 - ri * ri) * s * si + (ri * s + si) * r * sc) * s * si / den;
    return Weights{1.0 - ki - kc, ki, kc};
}

/// Weighted combination of the three observed estimates plus the
/// analytic variance of the combination under the noise model.
inline CombinedValue combine(const EstimateTriple& triple, const Weights& weights,
                             const TriangulationParams& params) {
    validate(params);
    detail::check_finite(triple.price, "price");
    detail::check_finite(triple.intrinsic, "intrinsic");
    detail::check_finite(triple.comparables, "comparables");
    if (std::abs(weights.sum() - 1.0) > 1e-9)
        throw InvalidWeights("combining weights must sum to 1");
    const double value = weights.w_price * triple.price +
                         weights.w_intrinsic * triple.intrinsic +
                         weights.w_comparables * triple.comparables;
    return CombinedValue{value, combined_variance(weights, params)};
}

/// Minimum-variance unbiased weights for N estimates with error
/// covariance spec.matrix: solve Sigma x = 1 and normalize so the
/// weights sum to one.
inline Eigen::VectorXd blue_weights(const CovarianceSpec& spec) {
    const Eigen::MatrixXd& m = spec.matrix;
    const Eigen::Index n = m.rows();
    if (n == 0 || m.cols() != n)
        throw InvalidParam("covariance matrix must be square and non-empty");
    if (!spec.labels.empty() && static_cast<Eigen::Index>(spec.labels.size()) != n)
        throw InvalidParam("label count must match matrix dimension");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidParam("covariance matrix must be symmetric");
    if (m.diagonal().minCoeff() < 0.0)
        throw InvalidParam("covariance diagonal must be non-negative");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const double scale = m.diagonal().maxCoeff();
    if (eig.eigenvalues().minCoeff() <= 1e-10 * scale)
        throw SingularCovariance("covariance matrix is not positive definite to working precision");

    const Eigen::VectorXd x = m.ldlt().solve(Eigen::VectorXd::Ones(n));
    const double total = x.sum();
    if (total == 0.0 || !std::isfinite(total))
        throw SingularCovariance("covariance matrix is not invertible to working precision");
    return x / total;
}

/// The 3x3 covariance of deviations (estimate - V) implied by the
/// triangulation noise model, ordered (price, intrinsic, comparables).
/// The price deviation P - V equals -e, so its cross-covariances with
/// the other legs flip sign relative to corr(e, .).
inline CovarianceSpec triangulation_covariance(const TriangulationParams& p) {
    validate(p);
    Eigen::MatrixXd m(3, 3);
    const double s = p.sigma_p, si = p.sigma_i, sc = p.sigma_c;
    m << s * s, -p.rho_i * s * si, -p.rho * s * sc,
        -p.rho_i * s * si, si * si, 0.0,
        -p.rho * s * sc, 0.0, sc * sc;
    return CovarianceSpec{{"price", "intrinsic", "comparables"}, m};
}

}  // namespace triangulate

#endif
