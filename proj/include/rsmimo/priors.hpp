#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace rsmimo {

using cplx = std::complex<double>;

struct GaussianPrior {
    double power = 1.0;
};

/// Uniform over the four points sqrt(power/2) * (+-1 +- j).
struct QpskPrior {
    double power = 1.0;
};

struct DiscretePrior {
    std::vector<cplx> points;
    std::vector<double> probs;
};

/// Pilot symbols: known at the receiver, so the scalar MMSE is zero.
/// The power is still needed for the interference terms.
struct KnownPrior {
    double power = 1.0;
};

/// Scalar source distribution for one block of channel or symbol entries.
class Prior {
public:
    using Kind = std::variant<GaussianPrior, QpskPrior, DiscretePrior, KnownPrior>;

    Prior() = default;

    static Prior gaussian(double power);
    static Prior qpsk(double power);
    static Prior discrete(std::vector<cplx> points, std::vector<double> probs);
    static Prior known(double power);

    const Kind& kind() const { return kind_; }
    bool is_known() const { return std::holds_alternative<KnownPrior>(kind_); }
    bool is_gaussian() const { return std::holds_alternative<GaussianPrior>(kind_); }

    /// "gaussian", "qpsk", "discrete" or "known".
    std::string name() const;

    /// Same family rescaled to the given second moment.
    Prior with_power(double power) const;

    bool operator==(const Prior& other) const;

private:
    explicit Prior(Kind kind) : kind_(std::move(kind)) {}

    Kind kind_{GaussianPrior{1.0}};
};

/// Node counts used by the numerical kernels.
struct QuadratureOptions {
    int hermite_nodes = 256;   // 1-D rule for the decoupled QPSK channel
    int discrete_nodes = 64;   // per axis of the 2-D rule for generic discrete priors
};

double second_moment(const Prior& prior);

/// E|X - E[X|Y]|^2 for Y = sqrt(qtilde) X + W, W ~ CN(0,1).
/// qtilde = +inf is accepted and maps to 0. Negative or NaN qtilde throws std::domain_error.
double scalar_mmse(const Prior& prior, double qtilde, const QuadratureOptions& quad = {});

/// I(X; sqrt(qtilde) X + W) in nats. Known priors carry no uncertainty and return 0.
double scalar_mi(const Prior& prior, double qtilde, const QuadratureOptions& quad = {});

/// Real binary-antipodal channel Y = sqrt(snr) S + N(0,1), S = +-1 equiprobable.
double binary_mmse(double snr, int nodes);
double binary_mi(double snr, int nodes);

}  // namespace rsmimo
