#ifndef NBCR_ESTIMATORS_HPP
#define NBCR_ESTIMATORS_HPP

#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Core>

#include "nbcr/nbd_model.hpp"

namespace nbcr {

/// Sample summary. s2 uses the divide-by-n convention, s2 = m2 - mean^2.
struct SampleStats {
    std::int64_t n;
    double mean;
    double m2;
    double s2;
};

enum class Regime { NegativeBinomial, PoissonLimit };

const char* to_string(Regime regime) noexcept;

/// Method-of-moments estimates on the natural and log scales. p_hat keeps its
/// raw value even when negative; the regime flag records the Poisson switch.
struct EstimateResult {
    double mu_hat;
    double p_hat;
    double log_mu_hat;
    double log_p1_hat;
    Regime regime;
};

/// Delta-method moments of (ln mu_hat, ln(P_hat + 1)) and of the decorrelated
/// pair (theta1, theta2 - a theta1).
struct AsymptoticMoments {
    double var_log_mu;
    double var_log_p1;
    double cov;
    double rho;
    double a;
    double var_resid;

    Eigen::Matrix2d covariance() const {
        Eigen::Matrix2d c;
        c << var_log_mu, cov, cov, var_log_p1;
        return c;
    }
};

/// Exact single pass over integer data; throws EmptySample or NegativeCount.
SampleStats sample_stats(std::span<const std::int64_t> data);

/// Summary from a given mean and second raw moment (s2 derived).
SampleStats stats_from_moments(std::int64_t n, double mean, double m2);

/// Throws ZeroMean or ZeroVariance where the log estimators do not exist.
EstimateResult mme(const SampleStats& stats);

/// Builds an estimate directly from reported (mu_hat, P_hat + 1).
EstimateResult estimate_from_reported(double mu_hat, double p1_hat);

AsymptoticMoments asymptotic_moments(const NbParams& params, std::int64_t n);

/// Covariance of (ln X̄, ln(s2 / X̄)) as J Σ Jᵀ, with Σ the covariance of
/// (X̄, mean of X²) built from the raw moments and J the gradient of the
/// log estimators. Independent of the closed forms in asymptotic_moments.
Eigen::Matrix2d delta_method_covariance(const NbParams& params, std::int64_t n);

/// First-order deviations (ln mu_hat - ln mu, ln(P_hat+1) - ln(P+1)).
std::pair<double, double> linearized_estimates(const SampleStats& stats, const NbParams& params);

/// (Z1, Z2): standardized and decorrelated log estimates around `params`.
std::pair<double, double> standardize(const EstimateResult& est, const NbParams& params, std::int64_t n);

} // namespace nbcr

#endif // NBCR_ESTIMATORS_HPP
