#include "rsmimo/priors.hpp"

#include "rsmimo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rsmimo {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_power(double power, const char* what) {
    if (!std::isfinite(power) || power < 0.0)
        throw std::invalid_argument(std::string(what) + " power must be finite and >= 0, got " +
                                    std::to_string(power));
}

void check_qtilde(double qtilde) {
    if (std::isnan(qtilde) || qtilde < 0.0)
        throw std::domain_error("effective SNR must be >= 0, got " + std::to_string(qtilde));
}

// log(cosh(x)) without overflow.
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double discrete_mmse(const DiscretePrior& p, double qtilde, int nodes) {
    const auto& rule = gauss_hermite(nodes);
    const double sq = std::sqrt(qtilde);
    const std::size_t m = p.points.size();
    std::vector<double> expo(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (p.probs[i] <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
            for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                const cplx w(rule.nodes[a], rule.nodes[b]);
                double peak = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < m; ++j) {
                    if (p.probs[j] <= 0.0) {
                        expo[j] = -std::numeric_limits<double>::infinity();
                        continue;
                    }
                    expo[j] = std::log(p.probs[j]) - std::norm(sq * (p.points[i] - p.points[j]) + w);
                    peak = std::max(peak, expo[j]);
                }
                double norm = 0.0;
                cplx mean{0.0, 0.0};
                for (std::size_t j = 0; j < m; ++j) {
                    const double e = std::exp(expo[j] - peak);
                    norm += e;
                    mean += e * p.points[j];
                }
                acc += rule.weights[a] * rule.weights[b] * std::norm(p.points[i] - mean / norm);
            }
        }
        total += p.probs[i] * acc;
    }
    return total / std::numbers::pi;
}

double discrete_mi(const DiscretePrior& p, double qtilde, int nodes) {
    const auto& rule = gauss_hermite(nodes);
    const double sq = std::sqrt(qtilde);
    const std::size_t m = p.points.size();
    std::vector<double> expo(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (p.probs[i] <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
            for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                const cplx w(rule.nodes[a], rule.nodes[b]);
                double peak = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < m; ++j) {
                    if (p.probs[j] <= 0.0) {
                        expo[j] = -std::numeric_limits<double>::infinity();
                        continue;
                    }
                    expo[j] = std::log(p.probs[j]) - std::norm(sq * (p.points[i] - p.points[j]) + w);
                    peak = std::max(peak, expo[j]);
                }
                double norm = 0.0;
                for (std::size_t j = 0; j < m; ++j) norm += std::exp(expo[j] - peak);
                acc += rule.weights[a] * rule.weights[b] * (peak + std::log(norm));
            }
        }
        total += p.probs[i] * acc;
    }
    // I = E[-|W|^2] - E[log sum_j p_j exp(-|Y - sqrt(q) x_j|^2)], E|W|^2 = 1.
    return std::max(0.0, -1.0 - total / std::numbers::pi);
}

cplx mean_of(const DiscretePrior& p) {
    cplx mean{0.0, 0.0};
    for (std::size_t i = 0; i < p.points.size(); ++i) mean += p.probs[i] * p.points[i];
    return mean;
}

double entropy(const DiscretePrior& p) {
    double h = 0.0;
    for (double pr : p.probs)
        if (pr > 0.0) h -= pr * std::log(pr);
    return h;
}

}  // namespace

Prior Prior::gaussian(double power) {
    check_power(power, "Gaussian");
    return Prior(GaussianPrior{power});
}

Prior Prior::qpsk(double power) {
    check_power(power, "QPSK");
    return Prior(QpskPrior{power});
}

Prior Prior::known(double power) {
    check_power(power, "known-symbol");
    return Prior(KnownPrior{power});
}

Prior Prior::discrete(std::vector<cplx> points, std::vector<double> probs) {
    if (points.empty()) throw std::invalid_argument("discrete prior needs at least one point");
    if (points.size() != probs.size())
        throw std::invalid_argument("discrete prior: " + std::to_string(points.size()) + " points but " +
                                    std::to_string(probs.size()) + " probabilities");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
            throw std::invalid_argument("discrete prior: probability " + std::to_string(i) +
                                        " is negative or not finite");
        if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
            throw std::invalid_argument("discrete prior: point " + std::to_string(i) + " is not finite");
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("discrete prior: probabilities sum to " + std::to_string(sum) + ", not 1");
    return Prior(DiscretePrior{std::move(points), std::move(probs)});
}

std::string Prior::name() const {
    return std::visit(overloaded{[](const GaussianPrior&) { return std::string("gaussian"); },
                                 [](const QpskPrior&) { return std::string("qpsk"); },
                                 [](const DiscretePrior&) { return std::string("discrete"); },
                                 [](const KnownPrior&) { return std::string("known"); }},
                      kind_);
}

Prior Prior::with_power(double power) const {
    check_power(power, name().c_str());
    return std::visit(
        overloaded{[&](const GaussianPrior&) { return Prior(GaussianPrior{power}); },
                   [&](const QpskPrior&) { return Prior(QpskPrior{power}); },
                   [&](const KnownPrior&) { return Prior(KnownPrior{power}); },
                   [&](const DiscretePrior& d) {
                       const double m2 = second_moment(*this);
                       if (m2 <= 0.0) throw std::invalid_argument("cannot rescale a zero-power discrete prior");
                       const double scale = std::sqrt(power / m2);
                       DiscretePrior out = d;
                       for (auto& x : out.points) x *= scale;
                       return Prior(std::move(out));
                   }},
        kind_);
}

bool Prior::operator==(const Prior& other) const {
    if (kind_.index() != other.kind_.index()) return false;
    return std::visit(
        overloaded{[&](const GaussianPrior& a) { return a.power == std::get<GaussianPrior>(other.kind_).power; },
                   [&](const QpskPrior& a) { return a.power == std::get<QpskPrior>(other.kind_).power; },
                   [&](const KnownPrior& a) { return a.power == std::get<KnownPrior>(other.kind_).power; },
                   [&](const DiscretePrior& a) {
                       const auto& b = std::get<DiscretePrior>(other.kind_);
                       return a.points == b.points && a.probs == b.probs;
                   }},
        kind_);
}

double second_moment(const Prior& prior) {
    return std::visit(overloaded{[](const GaussianPrior& p) { return p.power; },
                                 [](const QpskPrior& p) { return p.power; },
                                 [](const KnownPrior& p) { return p.power; },
                                 [](const DiscretePrior& p) {
                                     double m2 = 0.0;
                                     for (std::size_t i = 0; i < p.points.size(); ++i)
                                         m2 += p.probs[i] * std::norm(p.points[i]);
                                     return m2;
                                 }},
                      prior.kind());
}

double binary_mmse(double snr, int nodes) {
    if (snr == 0.0) return 1.0;
    if (std::isinf(snr)) return 0.0;
    const double root = std::sqrt(snr);
    const double mean_tanh =
        expect_standard_normal([&](double z) { return std::tanh(snr + root * z); }, nodes);
    return std::clamp(1.0 - mean_tanh, 0.0, 1.0);
}

double binary_mi(double snr, int nodes) {
    if (snr == 0.0) return 0.0;
    if (std::isinf(snr)) return std::numbers::ln2;
    const double root = std::sqrt(snr);
    const double mean_lc = expect_standard_normal([&](double z) { return log_cosh(snr + root * z); }, nodes);
    return std::clamp(snr - mean_lc, 0.0, std::numbers::ln2);
}

double scalar_mmse(const Prior& prior, double qtilde, const QuadratureOptions& quad) {
    check_qtilde(qtilde);
    const double m2 = second_moment(prior);
    if (std::isinf(qtilde)) return 0.0;
    const double mse = std::visit(
        overloaded{[&](const GaussianPrior& p) { return p.power / (1.0 + p.power * qtilde); },
                   // Real and imaginary parts are independent antipodal channels, each at SNR qtilde*power.
                   [&](const QpskPrior& p) { return p.power * binary_mmse(qtilde * p.power, quad.hermite_nodes); },
                   [&](const KnownPrior&) { return 0.0; },
                   [&](const DiscretePrior& p) {
                       if (qtilde == 0.0) return m2 - std::norm(mean_of(p));
                       return discrete_mmse(p, qtilde, quad.discrete_nodes);
                   }},
        prior.kind());
    return std::clamp(mse, 0.0, m2);
}

double scalar_mi(const Prior& prior, double qtilde, const QuadratureOptions& quad) {
    check_qtilde(qtilde);
    return std::visit(
        overloaded{[&](const GaussianPrior& p) {
                       return std::isinf(qtilde) ? (p.power > 0.0 ? qtilde : 0.0) : std::log1p(p.power * qtilde);
                   },
                   [&](const QpskPrior& p) {
                       if (p.power == 0.0) return 0.0;
                       return 2.0 * binary_mi(qtilde * p.power, quad.hermite_nodes);
                   },
                   [&](const KnownPrior&) { return 0.0; },
                   [&](const DiscretePrior& p) {
                       if (qtilde == 0.0) return 0.0;
                       if (std::isinf(qtilde)) return entropy(p);
                       return std::min(discrete_mi(p, qtilde, quad.discrete_nodes), entropy(p));
                   }},
        prior.kind());
}

}  // namespace rsmimo
