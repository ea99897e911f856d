#pragma once

#include <vector>

namespace rsmimo {

/// Gauss-Hermite rule for the physicists' weight exp(-x^2) on the real line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Computes an n-point rule, nodes ascending: Jacobi-matrix eigenvalues polished by Newton
/// steps on the orthonormal Hermite recurrence. Stable for n up to several hundred.
GaussHermiteRule compute_gauss_hermite(int n);

/// Cached rule; thread-safe. Throws std::invalid_argument for n < 1.
const GaussHermiteRule& gauss_hermite(int n);

/// E[f(Z)] for Z ~ N(0,1) using an n-point Gauss-Hermite rule.
template <typename F>
double expect_standard_normal(F&& f, int n) {
    const auto& rule = gauss_hermite(n);
    constexpr double kSqrt2 = 1.4142135623730950488;
    constexpr double kInvSqrtPi = 0.56418958354775628695;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(kSqrt2 * rule.nodes[i]);
    return acc * kInvSqrtPi;
}

}  // namespace rsmimo
