#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "triangulate/core.hpp"
#include "triangulate/simulate.hpp"

using namespace triangulate;

TEST_CASE("generate: no noise means every column equals the true value") {
    const SampleTable t = generate({{0.0, 0.0, 0.0, 0.0, 0.0}, 42.0, 100, 7});
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t.v[i] == 42.0);
        CHECK(t.price[i] == 42.0);
        CHECK(t.v_i[i] == 42.0);
        CHECK(t.v_c[i] == 42.0);
    }
}

TEST_CASE("generate: marginals and correlations match the model") {
    const TriangulationParams p{2.0, 1.0, 1.5, 0.3, 0.0};
    const std::size_t n = 200000;
    const SampleTable t = generate({p, 100.0, n, 12345});

    double se = 0.0, si = 0.0, sc = 0.0, cec = 0.0, cei = 0.0, cic = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = t.v[k] - t.price[k];
        const double e_i = t.v_i[k] - t.v[k];
        const double e_c = t.v_c[k] - t.v[k];
        se += e * e;
        si += e_i * e_i;
        sc += e_c * e_c;
        cec += e * e_c;
        cei += e * e_i;
        cic += e_i * e_c;
    }
    const double dn = static_cast<double>(n);
    CHECK_THAT(std::sqrt(se / dn), Catch::Matchers::WithinRel(2.0, 0.01));
    CHECK_THAT(std::sqrt(si / dn), Catch::Matchers::WithinRel(1.0, 0.01));
    CHECK_THAT(std::sqrt(sc / dn), Catch::Matchers::WithinRel(1.5, 0.01));
    CHECK_THAT(cec / dn / (2.0 * 1.5), Catch::Matchers::WithinAbs(0.3, 0.01));
    CHECK_THAT(cei / dn / (2.0 * 1.0), Catch::Matchers::WithinAbs(0.0, 0.01));
    CHECK_THAT(cic / dn / (1.0 * 1.5), Catch::Matchers::WithinAbs(0.0, 0.01));
}

TEST_CASE("generate: V = P + e holds by construction") {
    const SampleTable t = generate({{2.0, 1.0, 1.5, 0.3, 0.2}, 50.0, 1000, 9});
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = t.v[k] - t.price[k];
        CHECK(t.price[k] + e == t.v[k]);
    }
}

TEST_CASE("generate: infeasible correlation pair is rejected") {
    CHECK_THROWS_AS(generate({{1.0, 1.0, 1.0, 0.9, 0.9}, 0.0, 10, 1}), NotPSD);
    // boundary rho^2 + rho_i^2 = 1 stays feasible
    CHECK_NOTHROW(generate({{1.0, 1.0, 1.0, 0.6, 0.8}, 0.0, 10, 1}));
}

TEST_CASE("generate: identical config gives identical samples") {
    const SimConfig cfg{{2.0, 1.0, 1.5, 0.3, 0.1}, 100.0, 5000, 77};
    const SampleTable a = generate(cfg);
    const SampleTable b = generate(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.price[k] == b.price[k]);
        CHECK(a.v_i[k] == b.v_i[k]);
        CHECK(a.v_c[k] == b.v_c[k]);
    }
    const SampleTable c = generate({cfg.params, cfg.true_value, cfg.n, 78});
    CHECK(c.price[0] != a.price[0]);
}

TEST_CASE("empirical_variance: price-only weights recover sigma squared") {
    const TriangulationParams p{2.0, 1.0, 1.5, 0.3, 0.0};
    const SampleTable t = generate({p, 100.0, 200000, 31});
    CHECK_THAT(empirical_variance(t, {1.0, 0.0, 0.0}), Catch::Matchers::WithinRel(4.0, 0.02));
}

TEST_CASE("empirical_variance: optimal weights match the analytic variance") {
    const TriangulationParams p{2.0, 1.0, 1.5, 0.3, 0.0};
    const Weights opt = theorem1_weights(p);
    const SampleTable t = generate({p, 100.0, 1000000, 4242});
    const double emp = empirical_variance(t, opt);
    CHECK_THAT(emp, Catch::Matchers::WithinRel(0.5043103448275861, 0.01));

    // any perturbation away from the optimum raises the variance
    const Weights off{opt.w_price - 0.0, opt.w_intrinsic + 0.1, opt.w_comparables - 0.1};
    CHECK(empirical_variance(t, off) > emp);
}

TEST_CASE("empirical_variance: input checks") {
    CHECK_THROWS_AS(empirical_variance(SampleTable{}, {1.0, 0.0, 0.0}), EmptySample);
    const SampleTable t = generate({{1.0, 1.0, 1.0, 0.0, 0.0}, 0.0, 10, 1});
    CHECK_THROWS_AS(empirical_variance(t, {0.5, 0.5, 0.5}), InvalidWeights);
}

TEST_CASE("oracle_min_weights: symmetric case") {
    const Weights w = oracle_min_weights({1.0, 1.0, 1.0, 0.0, 0.0});
    CHECK_THAT(w.w_price, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-7));
    CHECK_THAT(w.w_intrinsic, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-7));
    CHECK_THAT(w.w_comparables, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-7));
}

TEST_CASE("oracle_min_weights: agrees with both closed forms") {
    const TriangulationParams base{2.0, 1.0, 1.5, 0.3, 0.0};
    const Weights a = oracle_min_weights(base);
    const Weights ta = theorem1_weights(base);
    CHECK(std::abs(a.w_intrinsic - ta.w_intrinsic) < 1e-6);
    CHECK(std::abs(a.w_comparables - ta.w_comparables) < 1e-6);

    const TriangulationParams gen{2.0, 1.0, 1.5, 0.3, 0.4};
    const Weights b = oracle_min_weights(gen);
    const Weights tb = generalized_weights(gen);
    CHECK(std::abs(b.w_intrinsic - tb.w_intrinsic) < 1e-6);
    CHECK(std::abs(b.w_comparables - tb.w_comparables) < 1e-6);
}

TEST_CASE("oracle weights beat random sum-to-one weights empirically") {
    const TriangulationParams p{2.0, 1.0, 1.5, 0.3, 0.0};
    const SampleTable t = generate({p, 100.0, 100000, 555});
    const double at_oracle = empirical_variance(t, oracle_min_weights(p));
    std::mt19937_64 rng(556);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double ki = u(rng), kc = u(rng);
        const Weights w{1.0 - ki - kc, ki, kc};
        const double at_random = empirical_variance(t, w);
        // allow 3 Monte Carlo standard errors of slack
        const double se = (at_random + at_oracle) * std::sqrt(2.0 / t.size());
        CHECK(at_random >= at_oracle - 3.0 * se);
    }
}

TEST_CASE("write_samples emits the documented CSV layout") {
    const SampleTable t = generate({{1.0, 1.0, 1.0, 0.0, 0.0}, 10.0, 2, 3});
    std::ostringstream out;
    write_samples(out, t);
    const std::string text = out.str();
    CHECK(text.rfind("v,price,v_i,v_c\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
