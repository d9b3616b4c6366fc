// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "triangulate/core.hpp"
#include "triangulate/delaware.hpp"
#include "triangulate/forecast.hpp"
#include "triangulate/inversion.hpp"
#include "triangulate/simulate.hpp"

using namespace triangulate;
using test_helpers::random_params;
using test_helpers::uniform;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = {}) {
    std::printf("%s  criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

// 1. Closed forms vs brute-force oracle over 1,000 random parameter
//    sets, within 1e-6 per weight component.
void criterion1() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const bool with_rho_i = i % 2 == 1;
        const TriangulationParams p = random_params(rng, with_rho_i);
        const Weights closed = with_rho_i ? generalized_weights(p) : theorem1_weights(p);
        const Weights oracle = oracle_min_weights(p);
        worst = std::max({worst, std::abs(closed.w_price - oracle.w_price),
                          std::abs(closed.w_intrinsic - oracle.w_intrinsic),
                          std::abs(closed.w_comparables - oracle.w_comparables)});
    }
    report(1, "closed-form weights match the variance-grid oracle", worst < 1e-6,
           "max component error " + std::to_string(worst));
}

// 2. The six degenerate-sigma limits at ratio 1e6 (tolerance 1e-4) and
//    the rho -> 1 two-estimate formula at rho = 1 - 1e-8 (tolerance 1e-3).
void criterion2() {
    const double big = 1e6;
    bool pass = true;
    const auto close1 = [&](double x) { return std::abs(x - 1.0) < 1e-4; };
    pass &= close1(theorem1_weights({1.0 / big, 1.0, 1.0, 0.3, 0.0}).w_price);
    pass &= close1(theorem1_weights({1.0, 1.0 / big, 1.0, 0.3, 0.0}).w_intrinsic);
    pass &= close1(theorem1_weights({1.0, 1.0, 1.0 / big, 0.3, 0.0}).w_comparables);
    pass &= std::abs(theorem1_weights({big, 1.0, 1.0, 0.3, 0.0}).w_price) < 1e-4;
    pass &= std::abs(theorem1_weights({1.0, big, 1.0, 0.3, 0.0}).w_intrinsic) < 1e-4;
    pass &= std::abs(theorem1_weights({1.0, 1.0, big, 0.3, 0.0}).w_comparables) < 1e-4;

    const double s = 1.3, sc = 0.7;
    const Weights w = theorem1_weights({s, 1.0, sc, 1.0 - 1e-8, 0.0});
    pass &= w.w_intrinsic < 1e-3;
    pass &= std::abs(w.w_price - sc / (s + sc)) < 1e-3;
    pass &= std::abs(w.w_comparables - s / (s + sc)) < 1e-3;
    report(2, "degenerate-sigma limit suite and the rho -> 1 formula", pass);
}

// 3. Inversion: the printed worked example at four rho values within
//    1e-12, plus 1,000 round trips within 1e-8.
void criterion3() {
    bool pass = true;
    for (double rho : {0.0, 0.25, 0.5, 0.9}) {
        const ImpliedPrecisions r = implied_ratios(0.5, 0.25, rho);
        pass &= std::abs(r.ratio_c - 1.0) < 1e-12;
        pass &= std::abs(r.ratio_i - std::sqrt((1.0 - rho) / 2.0)) < 1e-12;
    }
    std::mt19937_64 rng(1003);
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
        const TriangulationParams p = random_params(rng);
        const Weights w = theorem1_weights(p);
        if (w.w_intrinsic <= 0.0 || w.w_comparables <= 0.0 ||
            w.w_intrinsic + w.w_comparables >= 1.0)
            continue;
        const ImpliedPrecisions r = implied_ratios(w.w_intrinsic, w.w_comparables, p.rho);
        worst = std::max({worst, std::abs(r.ratio_c - p.sigma_c / p.sigma_p),
                          std::abs(r.ratio_i - p.sigma_i / p.sigma_p)});
        ++done;
    }
    pass &= worst < 1e-8;
    report(3, "inversion worked example and 1,000 round trips", pass,
           "max round-trip error " + std::to_string(worst));
}

// 4. Bundled case table reproduces the printed means and sample
//    standard deviations at two decimals.
void criterion4() {
    bool pass = true;
    try {
        const auto cases =
            load_cases_file(std::string(TRIANGULATE_DATA_DIR) + "/delaware_block_cases.csv");
        pass &= cases.size() == 12;
        const ColumnStats stats = case_table_stats(cases);
        const auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
        pass &= round2(stats.mean[0]) == 0.27 && round2(stats.mean[1]) == 0.46 &&
                round2(stats.mean[2]) == 0.27;
        pass &= round2(stats.stddev[0]) == 0.18 && round2(stats.stddev[1]) == 0.26 &&
                round2(stats.stddev[2]) == 0.17;
    } catch (const std::exception&) {
        pass = false;
    }
    report(4, "bundled case table reproduces the printed summary rows", pass);
}

// 5. generalized_weights reduces to theorem1_weights at rho_i = 0
//    (1e-12) and blue_weights on the sign-corrected covariance matches
//    generalized_weights (1e-10), over 1,000 draws each.
void criterion5() {
    std::mt19937_64 rng(1005);
    double worst_reduce = 0.0, worst_blue = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const TriangulationParams p0 = random_params(rng);
        const Weights a = theorem1_weights(p0);
        const Weights b = generalized_weights(p0);
        worst_reduce = std::max({worst_reduce, std::abs(a.w_price - b.w_price),
                                 std::abs(a.w_intrinsic - b.w_intrinsic),
                                 std::abs(a.w_comparables - b.w_comparables)});

        const TriangulationParams p1 = random_params(rng, true);
        const Weights g = generalized_weights(p1);
        const Eigen::VectorXd w = blue_weights(triangulation_covariance(p1));
        worst_blue = std::max({worst_blue, std::abs(w(0) - g.w_price),
                               std::abs(w(1) - g.w_intrinsic),
                               std::abs(w(2) - g.w_comparables)});
    }
    report(5, "reduction at rho_i = 0 and N-way combiner equivalence",
           worst_reduce < 1e-12 && worst_blue < 1e-10,
           "reduction " + std::to_string(worst_reduce) + ", blue " + std::to_string(worst_blue));
}

// 6. Monte Carlo optimality at n = 1e6: empirical variance of the
//    optimal combination within 1% of the analytic value and below
//    every one of 100 random sum-to-one weightings (3-sigma margin).
void criterion6() {
    const TriangulationParams p{2.0, 1.0, 1.5, 0.3, 0.0};
    const std::size_t n = 1000000;
    const SampleTable t = generate({p, 100.0, n, 20260826});
    const Weights opt = theorem1_weights(p);
    const double analytic = combined_variance(opt, p);
    const double emp = empirical_variance(t, opt);
    bool pass = std::abs(emp - analytic) / analytic < 0.01;

    std::mt19937_64 rng(1006);
    const double se = emp * std::sqrt(2.0 / static_cast<double>(n));
    for (int i = 0; i < 100; ++i) {
        const double ki = uniform(rng, -0.5, 1.5);
        const double kc = uniform(rng, -0.5, 1.5);
        const double at_random = empirical_variance(t, {1.0 - ki - kc, ki, kc});
        const double se_r = at_random * std::sqrt(2.0 / static_cast<double>(n));
        // the optimal combination may not sit above any random one by
        // more than 3 Monte Carlo standard errors
        pass &= emp < at_random + 3.0 * (se + se_r);
    }
    report(6, "Monte Carlo variance matches and random weightings lose", pass,
           "analytic " + std::to_string(analytic) + ", empirical " + std::to_string(emp));
}

// 7. vc_weight dominance over random sweeps, constrained regression vs
//    an independent substitution oracle (1e-8), shrinkage polar cases.
void criterion7() {
    bool pass = true;
    std::mt19937_64 rng(1007);
    for (int i = 0; i < 2000; ++i) {
        const double v1 = uniform(rng, 0.01, 9.0), v2 = uniform(rng, 0.01, 9.0);
        const double c = uniform(rng, -0.99, 0.99) * std::sqrt(v1 * v2);
        if (v1 + v2 - 2.0 * c <= 1e-9) continue;
        const double omega = vc_weight(v1, v2, c);
        pass &= combined_forecast_variance(omega, v1, v2, c) <= std::min(v1, v2) + 1e-12;
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int rows = 50;
        ForecastPanel panel;
        panel.realizations.resize(rows);
        panel.forecasts.resize(rows, 2);
        panel.forecaster_names = {"a", "b"};
        for (int t = 0; t < rows; ++t) {
            panel.forecasts(t, 0) = 100.0 + 5.0 * normal(rng);
            panel.forecasts(t, 1) = 100.0 + 5.0 * normal(rng);
            panel.realizations(t) =
                0.6 * panel.forecasts(t, 0) + 0.4 * panel.forecasts(t, 1) + normal(rng);
        }
        CombineOptions opts;
        opts.constrain_sum_to_one = true;
        const CombineFit fit = combining_regression(panel, opts);
        pass &= std::abs(fit.weights.sum() - 1.0) < 1e-10;

        // independent route: substitute the constraint and solve the
        // reduced unconstrained problem
        const Eigen::VectorXd diff = panel.forecasts.col(0) - panel.forecasts.col(1);
        const Eigen::VectorXd rhs = panel.realizations - panel.forecasts.col(1);
        const double w0 = diff.dot(rhs) / diff.squaredNorm();
        pass &= std::abs(fit.weights(0) - w0) < 1e-8;
        pass &= std::abs(fit.weights(1) - (1.0 - w0)) < 1e-8;
    }

    Eigen::Vector2d ls(0.9, 0.1), prior(0.5, 0.5);
    pass &= (shrink_weights(ls, prior, 0.0) - ls).norm() == 0.0;
    pass &= (shrink_weights(ls, prior, 1.0) - prior).norm() == 0.0;
    report(7, "forecast-combination estimators and their oracles", pass);
}

// 8. Valuation regression: exact reconstruction to 1e-9 with sum
//    diagnostic 1, and a biased panel is flagged.
void criterion8() {
    std::mt19937_64 rng(1008);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = 80;
    std::vector<double> pn(n), p(n), b(n), e(n);
    for (std::size_t t = 0; t < n; ++t) {
        p[t] = 100.0 + 10.0 * normal(rng);
        b[t] = 95.0 + 8.0 * normal(rng);
        e[t] = 105.0 + 12.0 * normal(rng);
        pn[t] = 0.2 * p[t] + 0.5 * b[t] + 0.3 * e[t];
    }
    const ValuationFit exact = valuation_regression(pn, p, b, e);
    bool pass = std::abs(exact.a_price - 0.2) < 1e-9 && std::abs(exact.a_asset - 0.5) < 1e-9 &&
                std::abs(exact.a_earnings - 0.3) < 1e-9 &&
                std::abs(exact.coefficient_sum - 1.0) < 1e-9 && !exact.bias_flagged;

    std::vector<double> e_biased(e);
    for (double& x : e_biased) x += 30.0;
    const ValuationFit biased = valuation_regression(pn, p, b, e_biased);
    pass &= biased.bias_flagged && std::abs(biased.coefficient_sum - 1.0) > biased.sum_threshold;
    report(8, "valuation regression recovery and bias flag", pass,
           "sum diagnostic " + std::to_string(exact.coefficient_sum));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures == 0)
        std::printf("all 8 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
