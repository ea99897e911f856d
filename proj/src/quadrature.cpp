#include "rsmimo/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace rsmimo {

namespace {

// Orthonormal Hermite recurrence at z: returns (p_n, p_n') up to the weight factor.
std::pair<double, double> orthonormal_hermite(int n, double z) {
    constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
    double p1 = kPiM4;
    double p2 = 0.0;
    for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
    }
    return {p1, std::sqrt(2.0 * n) * p2};
}

}  // namespace

GaussHermiteRule compute_gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("Gauss-Hermite rule needs at least one node");

    // Nodes: eigenvalues of the Jacobi matrix, then Newton-polished on the recurrence.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    for (int j = 1; j < n; ++j) off(j - 1) = std::sqrt(j / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = eig.eigenvalues()(i);
        double deriv = 0.0;
        for (int it = 0; it < 3; ++it) {
            const auto [p, dp] = orthonormal_hermite(n, z);
            deriv = dp;
            z -= p / dp;
        }
        deriv = orthonormal_hermite(n, z).second;
        rule.nodes[i] = z;
        rule.weights[i] = 2.0 / (deriv * deriv);
    }
    // Exact symmetry.
    for (int i = 0; i < n / 2; ++i) {
        const double z = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

const GaussHermiteRule& gauss_hermite(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(compute_gauss_hermite(n));
    return *slot;
}

}  // namespace rsmimo
