#ifndef NBCR_VERIFY_HPP
#define NBCR_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nbcr/estimators.hpp"
#include "nbcr/nbd_model.hpp"

namespace nbcr {

struct CoverageEntry {
    double level;
    std::int64_t hits;
    double coverage;
    double std_error;
};

/// Coverage of the joint region at the true (mu, P). Degenerate replicates
/// (all-zero or constant samples) are excluded from the denominator.
struct CoverageReport {
    NbParams params;
    std::int64_t n;
    std::int64_t reps;
    std::vector<CoverageEntry> entries;
    std::int64_t degenerate_count;
};

/// Frequency of samples that land in the Poisson regime, s2 <= mean (P_hat <= 0).
/// Ties, all-zero samples among them, count as under-dispersed; the strict
/// s2 < mean frequency is reported alongside.
struct UnderdispersionReport {
    NbParams params;
    std::int64_t n;
    std::int64_t reps;
    std::int64_t count;
    double proportion;
    double std_error;
    std::int64_t strict_count;
    double strict_proportion;
};

/// Empirical moments of (ln mu_hat, ln(P_hat + 1)) over simulated replicates next
/// to their delta-method predictions.
struct DeltaMethodStudy {
    NbParams params;
    std::int64_t n;
    std::int64_t reps;
    std::int64_t degenerate_count;
    Eigen::Matrix2d empirical_covariance;
    AsymptoticMoments predicted;
    double residual_correlation; // corr(theta2 - a theta1, theta1)
};

/// sqrt(p (1 - p) / trials); zero when trials is zero.
double binomial_std_error(double proportion, std::int64_t trials);

/// MME of replicate r drawn from stream (seed, r); empty for degenerate samples.
std::vector<std::optional<EstimateResult>> simulate_estimates(const NbParams& params, std::int64_t n, std::int64_t reps,
                                                              std::uint64_t seed, unsigned threads = 0);

UnderdispersionReport underdispersion_probability(const NbParams& params, std::int64_t n, std::int64_t reps,
                                                  std::uint64_t seed, unsigned threads = 0);

CoverageReport coverage(const NbParams& params, std::int64_t n, const std::vector<double>& levels, std::int64_t reps,
                        std::uint64_t seed, unsigned threads = 0);

DeltaMethodStudy delta_method_study(const NbParams& params, std::int64_t n, std::int64_t reps, std::uint64_t seed,
                                    unsigned threads = 0);

std::string coverage_csv_header();
std::string to_csv_rows(const CoverageReport& report);

std::string underdispersion_csv_header();
std::string to_csv_row(const UnderdispersionReport& report);

} // namespace nbcr

#endif // NBCR_VERIFY_HPP
