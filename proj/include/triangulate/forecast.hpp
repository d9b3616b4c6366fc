#ifndef TRIANGULATE_FORECAST_HPP
#define TRIANGULATE_FORECAST_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "triangulate/csv.hpp"
#include "triangulate/errors.hpp"

namespace triangulate {

/// Time-indexed realizations plus one column of forecasts per
/// forecaster, row-aligned.
struct ForecastPanel {
    std::vector<std::string> dates;
    Eigen::VectorXd realizations;
    std::vector<std::string> forecaster_names;
    Eigen::MatrixXd forecasts;  // rows x forecasters
    std::string horizon_label;
};

struct CombineOptions {
    bool include_intercept = false;
    bool constrain_sum_to_one = false;
    std::optional<Eigen::Index> window;
    std::optional<double> shrink_lambda;
    std::optional<Eigen::VectorXd> prior_weights;
    bool centered_moments = false;
};

inline void validate(const ForecastPanel& p) {
    if (p.realizations.size() != p.forecasts.rows())
        throw LengthMismatch("realizations and forecast rows must align");
    if (p.realizations.size() < 2)
        throw TooFewRows("panel needs at least 2 rows");
    if (p.forecasts.cols() < 1)
        throw InputError("panel needs at least one forecast column");
    if (!p.realizations.allFinite() || !p.forecasts.allFinite())
        throw InputError("panel contains non-finite values");
}

/// Optimal weight on forecast 1 of two, from the error variances and
/// covariance: omega = (var2 - cov) / (var1 + var2 - 2 cov).
inline double vc_weight(double var1, double var2, double cov12) {
    if (!std::isfinite(var1) || !std::isfinite(var2) || !std::isfinite(cov12))
        throw InvalidParam("variances and covariance must be finite");
    if (var1 < 0.0 || var2 < 0.0)
        throw InvalidParam("variances must be non-negative");
    const double den = var1 + var2 - 2.0 * cov12;
    if (den <= 0.0)
        throw DegenerateDenominator("forecast errors are indistinguishable: zero variance of the difference");
    return (var2 - cov12) / den;
}

/// Variance of the omega-weighted combination of two forecast errors.
inline double combined_forecast_variance(double omega, double var1, double var2, double cov12) {
    return omega * omega * var1 + (1.0 - omega) * (1.0 - omega) * var2 +
           2.0 * omega * (1.0 - omega) * cov12;
}

/// Sample version of vc_weight.  Moments are uncentered averages
/// (1/L) sum e_i e_j by default, matching the unbiased-forecast
/// estimator; centered=true subtracts sample means first.
inline double estimate_vc_weight(const std::vector<double>& errors1,
                                 const std::vector<double>& errors2,
                                 bool centered = false) {
    if (errors1.size() != errors2.size())
        throw LengthMismatch("error sequences differ in length");
    const std::size_t n = errors1.size();
    if (n < 2)
        throw TooFewRows("need at least 2 error observations");
    double m1 = 0.0, m2 = 0.0;
    if (centered) {
        for (std::size_t t = 0; t < n; ++t) {
            m1 += errors1[t];
            m2 += errors2[t];
        }
        m1 /= static_cast<double>(n);
        m2 /= static_cast<double>(n);
    }
    double v1 = 0.0, v2 = 0.0, c12 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double e1 = errors1[t] - m1, e2 = errors2[t] - m2;
        v1 += e1 * e1;
        v2 += e2 * e2;
        c12 += e1 * e2;
    }
    const double L = static_cast<double>(n);
    return vc_weight(v1 / L, v2 / L, c12 / L);
}

/// Combining-regression output.  `weights` has one entry per forecast
/// column; the intercept is meaningful only when fitted.
struct CombineFit {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    bool has_intercept = false;
    double residual_ss = 0.0;
};

namespace detail {

inline void check_rank(const Eigen::MatrixXd& x) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols())
        throw RankDeficient("regressor matrix is rank deficient");
}

}  // namespace detail

/// Regress realizations on forecasts.  Unconstrained mode is plain
/// least squares (optionally with intercept); constrained mode
/// minimizes the residual sum of squares subject to the weights
/// summing to one with no intercept, via the stationarity system of
/// the equality-constrained problem.
inline CombineFit combining_regression(const ForecastPanel& panel, const CombineOptions& opts) {
    validate(panel);
    const Eigen::Index n = panel.forecasts.rows();
    const Eigen::Index k = panel.forecasts.cols();
    if (n < k + 2)
        throw TooFewRows("panel needs at least forecasters + 2 rows");
    if (opts.constrain_sum_to_one && opts.include_intercept)
        throw InvalidParam("sum-to-one combining excludes an intercept");

    const Eigen::VectorXd& y = panel.realizations;
    const Eigen::MatrixXd& f = panel.forecasts;
    CombineFit fit;

    if (opts.constrain_sum_to_one) {
        detail::check_rank(f);
        // KKT system of min ||y - Fw||^2 s.t. 1'w = 1.
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
        kkt.topLeftCorner(k, k) = 2.0 * f.transpose() * f;
        kkt.topRightCorner(k, 1).setOnes();
        kkt.bottomLeftCorner(1, k).setOnes();
        Eigen::VectorXd rhs(k + 1);
        rhs.head(k) = 2.0 * f.transpose() * y;
        rhs(k) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible())
            throw RankDeficient("constrained combining system is singular");
        fit.weights = lu.solve(rhs).head(k);
    } else if (opts.include_intercept) {
        Eigen::MatrixXd x(n, k + 1);
        x.col(0).setOnes();
        x.rightCols(k) = f;
        detail::check_rank(x);
        const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
        fit.intercept = beta(0);
        fit.has_intercept = true;
        fit.weights = beta.tail(k);
    } else {
        detail::check_rank(f);
        fit.weights = f.colPivHouseholderQr().solve(y);
    }

    Eigen::VectorXd resid = y - f * fit.weights;
    if (fit.has_intercept) resid.array() -= fit.intercept;
    fit.residual_ss = resid.squaredNorm();
    return fit;
}

/// Result for one rolling window ending at row `end_index` (inclusive,
/// 0-based).  Windows that fail to fit carry the error text instead.
struct RollingFit {
    Eigen::Index end_index = 0;
    std::optional<CombineFit> fit;
    std::string error;
};

/// Rolling combining regressions: the fit reported at row t uses only
/// rows (t - window + 1 .. t).
inline std::vector<RollingFit> rolling_weights(const ForecastPanel& panel,
                                               const CombineOptions& opts) {
    validate(panel);
    if (!opts.window)
        throw InvalidParam("rolling_weights requires a window length");
    const Eigen::Index w = *opts.window;
    const Eigen::Index n = panel.forecasts.rows();
    const Eigen::Index k = panel.forecasts.cols();
    if (w < k + 2)
        throw InvalidParam("window must be at least forecasters + 2");
    if (w > n)
        throw TooFewRows("window exceeds panel length");

    CombineOptions window_opts = opts;
    window_opts.window.reset();
    std::vector<RollingFit> out;
    for (Eigen::Index end = w - 1; end < n; ++end) {
        ForecastPanel slice;
        slice.realizations = panel.realizations.segment(end - w + 1, w);
        slice.forecasts = panel.forecasts.middleRows(end - w + 1, w);
        slice.forecaster_names = panel.forecaster_names;
        slice.horizon_label = panel.horizon_label;
        RollingFit rf;
        rf.end_index = end;
        try {
            rf.fit = combining_regression(slice, window_opts);
        } catch (const Error& e) {
            rf.error = e.what();
        }
        out.push_back(std::move(rf));
    }
    return out;
}

/// Convex combination lambda * prior + (1 - lambda) * ls, elementwise.
inline Eigen::VectorXd shrink_weights(const Eigen::VectorXd& ls_weights,
                                      const Eigen::VectorXd& prior_weights, double lambda) {
    if (ls_weights.size() != prior_weights.size())
        throw LengthMismatch("weight vectors differ in length");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw LambdaOutOfRange("lambda must lie in [0, 1]");
    return lambda * prior_weights + (1.0 - lambda) * ls_weights;
}

/// Next-period-price regression P_{t+1} ~ a_P P_t + a_b b_t + a_E E_t.
/// A coefficient sum away from one indicates a systematically biased
/// input column.
struct ValuationFit {
    double a_price = 0.0;
    double a_asset = 0.0;
    double a_earnings = 0.0;
    double coefficient_sum = 0.0;
    double sum_threshold = 0.0;
    bool bias_flagged = false;
};

inline ValuationFit valuation_regression(const std::vector<double>& prices_next,
                                         const std::vector<double>& prices,
                                         const std::vector<double>& net_assets,
                                         const std::vector<double>& cap_earnings,
                                         const CombineOptions& opts = {},
                                         double sum_threshold = 0.05) {
    const std::size_t n = prices_next.size();
    if (prices.size() != n || net_assets.size() != n || cap_earnings.size() != n)
        throw LengthMismatch("valuation regression columns differ in length");
    if (n < 5)
        throw TooFewRows("valuation regression needs at least 5 rows");
    if (!(sum_threshold >= 0.0))
        throw InvalidParam("sum threshold must be non-negative");

    ForecastPanel panel;
    panel.realizations = Eigen::Map<const Eigen::VectorXd>(prices_next.data(), n);
    panel.forecasts.resize(n, 3);
    panel.forecasts.col(0) = Eigen::Map<const Eigen::VectorXd>(prices.data(), n);
    panel.forecasts.col(1) = Eigen::Map<const Eigen::VectorXd>(net_assets.data(), n);
    panel.forecasts.col(2) = Eigen::Map<const Eigen::VectorXd>(cap_earnings.data(), n);
    panel.forecaster_names = {"price", "net_asset", "cap_earnings"};

    CombineOptions reg_opts = opts;
    reg_opts.window.reset();
    const CombineFit fit = combining_regression(panel, reg_opts);

    ValuationFit out;
    out.a_price = fit.weights(0);
    out.a_asset = fit.weights(1);
    out.a_earnings = fit.weights(2);
    out.coefficient_sum = fit.weights.sum();
    out.sum_threshold = sum_threshold;
    out.bias_flagged = std::abs(out.coefficient_sum - 1.0) > sum_threshold;
    return out;
}

/// Reads a forecast panel: header `date,realization,forecast_<name>...`.
inline ForecastPanel load_panel(std::istream& in) {
    const auto rows = csv::read(in);
    if (rows.empty())
        throw EmptyTable("panel file has no rows");
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "date" || header[1] != "realization")
        throw InputError("panel header must be date,realization,forecast_<name>...");
    ForecastPanel panel;
    for (std::size_t j = 2; j < header.size(); ++j) {
        const std::string& h = header[j];
        if (h.rfind("forecast_", 0) != 0)
            throw InputError("forecast columns must be named forecast_<name>, got '" + h + "'");
        panel.forecaster_names.push_back(h.substr(9));
    }
    const std::size_t n = rows.size() - 1;
    const std::size_t k = panel.forecaster_names.size();
    panel.realizations.resize(n);
    panel.forecasts.resize(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i + 1];
        if (r.size() != header.size())
            throw InputError("panel row " + std::to_string(i + 1) + " has wrong field count");
        const std::string ctx = "panel row " + std::to_string(i + 1);
        panel.dates.push_back(r[0]);
        panel.realizations(i) = csv::to_double(r[1], ctx);
        for (std::size_t j = 0; j < k; ++j)
            panel.forecasts(i, j) = csv::to_double(r[j + 2], ctx);
    }
    validate(panel);
    return panel;
}

inline ForecastPanel load_panel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open panel file: " + path);
    return load_panel(in);
}

/// Columns of a valuation panel `date,price_next,price,net_asset,cap_earnings`.
struct ValuationPanel {
    std::vector<std::string> dates;
    std::vector<double> prices_next;
    std::vector<double> prices;
    std::vector<double> net_assets;
    std::vector<double> cap_earnings;
};

inline ValuationPanel load_valuation_panel(std::istream& in) {
    const auto rows = csv::read(in);
    if (rows.empty())
        throw EmptyTable("valuation panel has no rows");
    const std::vector<std::string> expected{"date", "price_next", "price", "net_asset",
                                            "cap_earnings"};
    if (rows.front() != expected)
        throw InputError("valuation panel header must be date,price_next,price,net_asset,cap_earnings");
    ValuationPanel panel;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5)
            throw InputError("valuation panel row " + std::to_string(i) + " has wrong field count");
        const std::string ctx = "valuation panel row " + std::to_string(i);
        panel.dates.push_back(r[0]);
        panel.prices_next.push_back(csv::to_double(r[1], ctx));
        panel.prices.push_back(csv::to_double(r[2], ctx));
        panel.net_assets.push_back(csv::to_double(r[3], ctx));
        panel.cap_earnings.push_back(csv::to_double(r[4], ctx));
    }
    return panel;
}

inline ValuationPanel load_valuation_panel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open valuation panel file: " + path);
    return load_valuation_panel(in);
}

}  // namespace triangulate

#endif
