#include "nbcr/nbd_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nbcr/error.hpp"

namespace nbcr {

NbParams::NbParams(double mu, double p_shape) : mu_(mu), p_shape_(p_shape) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw Error(ErrorCode::Domain, "mu must be positive and finite, got " + std::to_string(mu));
    if (!(p_shape >= 0.0) || !std::isfinite(p_shape))
        throw Error(ErrorCode::Domain, "P must be nonnegative and finite, got " + std::to_string(p_shape));
}

double log_gamma(double x) {
#if defined(__GLIBC__)
    // reentrant variant; std::lgamma writes the global signgam
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double poisson_pmf(double mu, std::int64_t x) {
    if (x < 0)
        throw Error(ErrorCode::Domain, "count must be nonnegative");
    if (!(mu > 0.0))
        throw Error(ErrorCode::Domain, "Poisson mean must be positive");
    const auto k = static_cast<double>(x);
    return std::exp(k * std::log(mu) - mu - log_gamma(k + 1.0));
}

double log_pmf(const NbParams& params, std::int64_t x) {
    if (x < 0)
        throw Error(ErrorCode::Domain, "count must be nonnegative");
    const double mu = params.mu();
    const auto k = static_cast<double>(x);
    if (params.is_poisson())
        return k * std::log(mu) - mu - log_gamma(k + 1.0);

    const double shape = params.p_shape();
    const double alpha = mu / shape;
    // Gamma(alpha + x) / (Gamma(alpha) x!) * (1/(1+P))^alpha * (P/(1+P))^x
    const double log1p_shape = std::log1p(shape);
    return log_gamma(alpha + k) - log_gamma(alpha) - log_gamma(k + 1.0) - alpha * log1p_shape +
           k * (std::log(shape) - log1p_shape);
}

double pmf(const NbParams& params, std::int64_t x) {
    return std::exp(log_pmf(params, x));
}

double pgf(const NbParams& params, double z) {
    if (!std::isfinite(z))
        throw Error(ErrorCode::Domain, "z must be finite");
    const double mu = params.mu();
    if (params.is_poisson())
        return std::exp(mu * (z - 1.0));
    const double shape = params.p_shape();
    const double base = 1.0 + shape - shape * z;
    if (!(base > 0.0))
        throw Error(ErrorCode::Domain, "pgf base 1 + P - Pz must be positive");
    return std::exp(-(mu / shape) * std::log(base));
}

RawMoments raw_moments(const NbParams& params) {
    const double mu = params.mu();
    const double P = params.p_shape();
    const double mu2 = mu * mu;
    const double P2 = P * P;
    return RawMoments{
        mu,
        mu * (1.0 + mu + P),
        mu * (1.0 + 3.0 * mu + 3.0 * P + 3.0 * mu * P + mu2 + 2.0 * P2),
        mu * (1.0 + 7.0 * mu + 7.0 * P + 18.0 * mu * P + 6.0 * mu2 + 12.0 * P2 + 6.0 * mu2 * P +
              11.0 * mu * P2 + mu2 * mu + 6.0 * P2 * P),
    };
}

MeanVariance mean_variance(const NbParams& params) {
    return {params.mu(), params.mu() * (1.0 + params.p_shape())};
}

ClassicParams to_classic(const NbParams& params) {
    if (params.is_poisson())
        throw Error(ErrorCode::Domain, "Poisson limit has no finite alpha");
    return {1.0 / (1.0 + params.p_shape()), params.mu() / params.p_shape()};
}

NbParams from_classic(const ClassicParams& classic) {
    if (!(classic.p_success > 0.0 && classic.p_success < 1.0))
        throw Error(ErrorCode::Domain, "p must lie in (0, 1)");
    if (!(classic.alpha > 0.0))
        throw Error(ErrorCode::Domain, "alpha must be positive");
    const double shape = 1.0 / classic.p_success - 1.0;
    return NbParams(classic.alpha * shape, shape);
}

std::int64_t truncation_point(const NbParams& params, double tail_mass) {
    if (!(tail_mass > 0.0 && tail_mass < 1.0))
        throw Error(ErrorCode::Domain, "tail mass must lie in (0, 1)");
    const auto [mean, variance] = mean_variance(params);
    const double bound = mean + std::sqrt(variance / tail_mass);
    return static_cast<std::int64_t>(std::ceil(2.0 * bound));
}

} // namespace nbcr
