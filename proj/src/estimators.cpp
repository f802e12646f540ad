#include "nbcr/estimators.hpp"

#include <cmath>
#include <string>

#include "nbcr/error.hpp"

namespace nbcr {
namespace {
__extension__ using Wide = __int128;
} // namespace

const char* to_string(Regime regime) noexcept {
    return regime == Regime::PoissonLimit ? "PoissonLimit" : "NegativeBinomial";
}

SampleStats sample_stats(std::span<const std::int64_t> data) {
    if (data.size() < 2)
        throw Error(ErrorCode::EmptySample, "need at least 2 observations, got " + std::to_string(data.size()));

    // integer accumulation keeps the sums exact
    Wide sum = 0;
    Wide sum_sq = 0;
    for (const std::int64_t x : data) {
        if (x < 0)
            throw Error(ErrorCode::NegativeCount, "negative count " + std::to_string(x));
        sum += x;
        sum_sq += static_cast<Wide>(x) * x;
    }
    const auto n = static_cast<Wide>(data.size());
    const Wide centered = n * sum_sq - sum * sum; // n^2 * s2, exact

    const auto nd = static_cast<double>(data.size());
    SampleStats stats{};
    stats.n = static_cast<std::int64_t>(data.size());
    stats.mean = static_cast<double>(sum) / nd;
    stats.m2 = static_cast<double>(sum_sq) / nd;
    stats.s2 = static_cast<double>(centered) / (nd * nd);
    return stats;
}

SampleStats stats_from_moments(std::int64_t n, double mean, double m2) {
    if (n < 2)
        throw Error(ErrorCode::EmptySample, "need n >= 2");
    if (!(mean >= 0.0) || !(m2 >= mean * mean))
        throw Error(ErrorCode::Domain, "require mean >= 0 and m2 >= mean^2");
    return {n, mean, m2, m2 - mean * mean};
}

EstimateResult mme(const SampleStats& stats) {
    if (!(stats.mean > 0.0))
        throw Error(ErrorCode::ZeroMean, "sample mean is zero, ln(mu_hat) undefined");
    if (!(stats.s2 > 0.0))
        throw Error(ErrorCode::ZeroVariance, "sample variance is zero, ln(P_hat + 1) undefined");

    EstimateResult est{};
    est.mu_hat = stats.mean;
    est.p_hat = (stats.s2 - stats.mean) / stats.mean;
    est.log_mu_hat = std::log(stats.mean);
    est.log_p1_hat = std::log(stats.s2 / stats.mean);
    est.regime = est.p_hat <= 0.0 ? Regime::PoissonLimit : Regime::NegativeBinomial;
    return est;
}

EstimateResult estimate_from_reported(double mu_hat, double p1_hat) {
    if (!(mu_hat > 0.0) || !(p1_hat > 0.0))
        throw Error(ErrorCode::Domain, "estimates require mu_hat > 0 and P_hat + 1 > 0");
    const double p_hat = p1_hat - 1.0;
    return {mu_hat, p_hat, std::log(mu_hat), std::log(p1_hat),
            p_hat <= 0.0 ? Regime::PoissonLimit : Regime::NegativeBinomial};
}

AsymptoticMoments asymptotic_moments(const NbParams& params, std::int64_t n) {
    if (n < 2)
        throw Error(ErrorCode::Domain, "n must be at least 2");
    const double mu = params.mu();
    const double P = params.p_shape();
    const double mn = mu * static_cast<double>(n);

    AsymptoticMoments m{};
    m.var_log_mu = (P + 1.0) / mn;
    m.var_log_p1 = (3.0 * P * P + 2.0 * mu * P + 2.0 * P + 2.0 * mu) / ((1.0 + P) * mn);
    m.cov = P / mn;
    m.rho = m.cov / std::sqrt(m.var_log_mu * m.var_log_p1);
    m.a = P / (1.0 + P);
    m.var_resid = 2.0 * (mu + P) / mn;
    return m;
}

Eigen::Matrix2d delta_method_covariance(const NbParams& params, std::int64_t n) {
    const RawMoments rm = raw_moments(params);
    const double mu = rm.m1;
    const double var_x = rm.m2 - mu * mu;

    Eigen::Matrix2d sigma;
    sigma << var_x, rm.m3 - mu * rm.m2,
             rm.m3 - mu * rm.m2, rm.m4 - rm.m2 * rm.m2;
    sigma /= static_cast<double>(n);

    // theta1 = ln m1, theta2 = ln(m2 - m1^2) - ln m1
    Eigen::Matrix2d jacobian;
    jacobian << 1.0 / mu, 0.0,
                -2.0 * mu / var_x - 1.0 / mu, 1.0 / var_x;
    return jacobian * sigma * jacobian.transpose();
}

std::pair<double, double> linearized_estimates(const SampleStats& stats, const NbParams& params) {
    const double mu = params.mu();
    const double P = params.p_shape();
    const double second = mu * (1.0 + mu + P);
    const double scale = mu * (1.0 + P);
    const double dmean = stats.mean - mu;
    return {dmean / mu, -(1.0 + P + 2.0 * mu) / scale * dmean + (stats.m2 - second) / scale};
}

std::pair<double, double> standardize(const EstimateResult& est, const NbParams& params, std::int64_t n) {
    const AsymptoticMoments m = asymptotic_moments(params, n);
    const double d1 = est.log_mu_hat - std::log(params.mu());
    const double d2 = est.log_p1_hat - std::log1p(params.p_shape());
    return {d1 / std::sqrt(m.var_log_mu), (d2 - m.a * d1) / std::sqrt(m.var_resid)};
}

} // namespace nbcr
