#ifndef TRIANGULATE_TEST_HELPERS_HPP
#define TRIANGULATE_TEST_HELPERS_HPP

#include <random>

#include "triangulate/core.hpp"

namespace test_helpers {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random parameter draw over the documented sweep ranges.  rho/rho_i
// are kept jointly feasible (rho^2 + rho_i^2 < 1) so that the same
// draws also work for the Monte Carlo error model.
inline triangulate::TriangulationParams random_params(std::mt19937_64& rng,
                                                      bool with_rho_i = false) {
    triangulate::TriangulationParams p;
    p.sigma_p = uniform(rng, 0.1, 10.0);
    p.sigma_i = uniform(rng, 0.1, 10.0);
    p.sigma_c = uniform(rng, 0.1, 10.0);
    for (;;) {
        p.rho = uniform(rng, -0.9, 0.9);
        p.rho_i = with_rho_i ? uniform(rng, -0.9, 0.9) : 0.0;
        if (p.rho * p.rho + p.rho_i * p.rho_i < 0.95) return p;
    }
}

}  // namespace test_helpers

#endif
