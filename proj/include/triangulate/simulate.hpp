#ifndef TRIANGULATE_SIMULATE_HPP
#define TRIANGULATE_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "triangulate/core.hpp"
#include "triangulate/errors.hpp"

namespace triangulate {

struct SimConfig {
    TriangulationParams params;
    double true_value = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// Columns of one Monte Carlo run.
struct SampleTable {
    std::vector<double> v;
    std::vector<double> price;
    std::vector<double> v_i;
    std::vector<double> v_c;

    std::size_t size() const { return v.size(); }
};

namespace detail {

// Pinned generator: mt19937_64 -> 53-bit uniforms -> Box-Muller.
// Keeps runs reproducible per seed without depending on the standard
// library's unspecified normal_distribution algorithm.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        const double angle = 2.0 * pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr double pi = 3.141592653589793238462643383279502884;

    double uniform01() {
        // in [0, 1): log1p(-u) stays finite
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Lower-triangular factor of the (e, e_I, e_C) correlation matrix with
// corr(e, e_I) = rho_i, corr(e, e_C) = rho, corr(e_I, e_C) = 0.  The
// matrix is PSD iff rho^2 + rho_i^2 <= 1.
struct ErrorFactor {
    double a22, a32, a33;
};

inline ErrorFactor error_factor(double rho, double rho_i) {
    if (rho * rho + rho_i * rho_i > 1.0 + 1e-12)
        throw NotPSD("correlation matrix of (e, e_I, e_C) has a negative eigenvalue");
    ErrorFactor f;
    f.a22 = std::sqrt(std::max(0.0, 1.0 - rho_i * rho_i));
    f.a32 = f.a22 > 0.0 ? -rho * rho_i / f.a22 : 0.0;
    f.a33 = std::sqrt(std::max(0.0, 1.0 - rho * rho - f.a32 * f.a32));
    return f;
}

}  // namespace detail

/// Draws jointly Gaussian errors (e, e_I, e_C) and emits the observed
/// estimates P = V - e (so V = P + e), V_I = V + e_I, V_C = V + e_C.
/// Identical config gives identical output bit for bit.
inline SampleTable generate(const SimConfig& config) {
    validate(config.params);
    if (config.n < 1)
        throw InvalidParam("n must be at least 1");
    if (!std::isfinite(config.true_value))
        throw InvalidParam("true_value must be finite");
    const detail::ErrorFactor f = detail::error_factor(config.params.rho, config.params.rho_i);

    const double s = config.params.sigma_p;
    const double si = config.params.sigma_i;
    const double sc = config.params.sigma_c;
    const double r = config.params.rho;
    const double ri = config.params.rho_i;

    detail::NormalSource rng(config.seed);
    SampleTable out;
    out.v.reserve(config.n);
    out.price.reserve(config.n);
    out.v_i.reserve(config.n);
    out.v_c.reserve(config.n);
    for (std::size_t t = 0; t < config.n; ++t) {
        const double z1 = rng.next(), z2 = rng.next(), z3 = rng.next();
        const double e = s * z1;
        const double e_i = si * (ri * z1 + f.a22 * z2);
        const double e_c = sc * (r * z1 + f.a32 * z2 + f.a33 * z3);
        out.v.push_back(config.true_value);
        out.price.push_back(config.true_value - e);
        out.v_i.push_back(config.true_value + e_i);
        out.v_c.push_back(config.true_value + e_c);
    }
    return out;
}

/// Sample variance (n-1 divisor) of the combined estimate's deviation
/// from the true value.
inline double empirical_variance(const SampleTable& samples, const Weights& weights) {
    if (samples.size() == 0)
        throw EmptySample("no samples");
    if (std::abs(weights.sum() - 1.0) > 1e-9)
        throw InvalidWeights("combining weights must sum to 1");
    const std::size_t n = samples.size();
    std::vector<double> dev(n);
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        dev[t] = weights.w_price * samples.price[t] + weights.w_intrinsic * samples.v_i[t] +
                 weights.w_comparables * samples.v_c[t] - samples.v[t];
        mean += dev[t];
    }
    mean /= static_cast<double>(n);
    if (n == 1) return 0.0;
    double ss = 0.0;
    for (double d : dev) ss += (d - mean) * (d - mean);
    return ss / static_cast<double>(n - 1);
}

/// Brute-force minimizer of the analytic variance over (k_I, k_C) in
/// [-1, 2]^2: coarse grid with `resolution` points per axis, then
/// iterative local refinement.  Independent of the closed-form weight
/// expressions.
inline Weights oracle_min_weights(const TriangulationParams& params, int resolution = 61) {
    validate(params);
    if (resolution < 3)
        throw InvalidParam("resolution must be at least 3");

    const auto var_at = [&](double ki, double kc) {
        return combined_variance(Weights{1.0 - ki - kc, ki, kc}, params);
    };

    const double lo = -1.0, hi = 2.0;
    double best_ki = 0.0, best_kc = 0.0;
    double best = var_at(best_ki, best_kc);
    const double step0 = (hi - lo) / (resolution - 1);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const double ki = lo + i * step0, kc = lo + j * step0;
            const double v = var_at(ki, kc);
            if (v < best) {
                best = v;
                best_ki = ki;
                best_kc = kc;
            }
        }
    }

    // Local refinement: Newton steps with finite-difference gradient
    // and Hessian.  The surface is quadratic in (k_I, k_C), so central
    // differences are exact up to rounding and one step lands on the
    // stationary point; a couple more polish it.
    const double h = 1e-3;
    for (int iter = 0; iter < 3; ++iter) {
        const double gi =
            (var_at(best_ki + h, best_kc) - var_at(best_ki - h, best_kc)) / (2.0 * h);
        const double gc =
            (var_at(best_ki, best_kc + h) - var_at(best_ki, best_kc - h)) / (2.0 * h);
        const double hii = (var_at(best_ki + h, best_kc) - 2.0 * var_at(best_ki, best_kc) +
                            var_at(best_ki - h, best_kc)) /
                           (h * h);
        const double hcc = (var_at(best_ki, best_kc + h) - 2.0 * var_at(best_ki, best_kc) +
                            var_at(best_ki, best_kc - h)) /
                           (h * h);
        const double hic = (var_at(best_ki + h, best_kc + h) - var_at(best_ki + h, best_kc - h) -
                            var_at(best_ki - h, best_kc + h) + var_at(best_ki - h, best_kc - h)) /
                           (4.0 * h * h);
        const double det = hii * hcc - hic * hic;
        if (!(det > 0.0) || !(hii > 0.0)) break;  // not a strict minimum; keep the grid point
        const double ki = best_ki - (hcc * gi - hic * gc) / det;
        const double kc = best_kc - (hii * gc - hic * gi) / det;
        if (var_at(ki, kc) <= best) {
            best_ki = ki;
            best_kc = kc;
            best = var_at(ki, kc);
        }
    }
    return Weights{1.0 - best_ki - best_kc, best_ki, best_kc};
}

/// Sample dump, one row per draw: `v,price,v_i,v_c`.
inline void write_samples(std::ostream& out, const SampleTable& samples) {
    out << "v,price,v_i,v_c\n";
    const std::streamsize prec = out.precision(17);
    for (std::size_t t = 0; t < samples.size(); ++t) {
        out << samples.v[t] << ',' << samples.price[t] << ',' << samples.v_i[t] << ','
            << samples.v_c[t] << '\n';
    }
    out.precision(prec);
}

}  // namespace triangulate

#endif
