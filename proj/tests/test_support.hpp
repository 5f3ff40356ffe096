#pragma once

#include "lomboost/objective.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using Rng = std::mt19937_64;

inline std::vector<double> dirichlet(Rng& rng, std::size_t k, double shape = 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    std::vector<double> x(k);
    double sum = 0.0;
    for (auto& v : x) sum += (v = g(rng));
    if (sum == 0.0) x[0] = sum = 1.0;
    for (auto& v : x) v /= sum;
    return x;
}

inline std::vector<double> uniform_vector(Rng& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(k);
    for (auto& v : x) v = u(rng);
    return x;
}

// Reference implementations written straight from the definitions.
inline double ref_objective(const std::vector<double>& pi, const std::vector<double>& p) {
    double beta = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) beta += pi[i] * p[i];
    double j = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) j += pi[i] * std::fabs(beta - p[i]);
    return 2.0 * j;
}

inline double ref_purity(const std::vector<double>& pi, const std::vector<double>& p) {
    double a = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) a += pi[i] * (p[i] < 0.5 ? p[i] : 1.0 - p[i]);
    return a;
}

inline double ref_beta(const std::vector<double>& pi, const std::vector<double>& p) {
    double beta = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) beta += pi[i] * p[i];
    return beta;
}

}  // namespace testing
