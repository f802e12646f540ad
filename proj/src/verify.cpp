#include "nbcr/verify.hpp"

#include <cmath>

#include "nbcr/error.hpp"
#include "nbcr/parallel.hpp"
#include "nbcr/region.hpp"
#include "nbcr/simulate.hpp"

namespace nbcr {
namespace {

void check_run(std::int64_t n, std::int64_t reps) {
    if (n < 2)
        throw Error(ErrorCode::Domain, "sample size must be at least 2");
    if (reps < 1)
        throw Error(ErrorCode::Domain, "replicate count must be positive");
}

bool degenerate(const SampleStats& stats) {
    return !(stats.mean > 0.0) || !(stats.s2 > 0.0);
}

} // namespace

double binomial_std_error(double proportion, std::int64_t trials) {
    if (trials <= 0)
        return 0.0;
    return std::sqrt(proportion * (1.0 - proportion) / static_cast<double>(trials));
}

std::vector<std::optional<EstimateResult>> simulate_estimates(const NbParams& params, std::int64_t n, std::int64_t reps,
                                                              std::uint64_t seed, unsigned threads) {
    check_run(n, reps);
    std::vector<std::optional<EstimateResult>> out(static_cast<std::size_t>(reps));
    parallel_for(reps, resolve_threads(threads), [&](std::int64_t r) {
        SeededStream stream(seed, static_cast<std::uint64_t>(r));
        const SampleStats stats = sample_stats(sample_nb(params, n, stream));
        if (!degenerate(stats))
            out[static_cast<std::size_t>(r)] = mme(stats);
    });
    return out;
}

UnderdispersionReport underdispersion_probability(const NbParams& params, std::int64_t n, std::int64_t reps,
                                                  std::uint64_t seed, unsigned threads) {
    check_run(n, reps);
    // 0 over-dispersed, 1 tie, 2 strictly under-dispersed
    std::vector<unsigned char> under(static_cast<std::size_t>(reps), 0);
    parallel_for(reps, resolve_threads(threads), [&](std::int64_t r) {
        SeededStream stream(seed, static_cast<std::uint64_t>(r));
        const SampleStats stats = sample_stats(sample_nb(params, n, stream));
        under[static_cast<std::size_t>(r)] = stats.s2 < stats.mean ? 2 : (stats.s2 == stats.mean ? 1 : 0);
    });

    std::int64_t count = 0;
    std::int64_t strict = 0;
    for (const unsigned char u : under) {
        count += u > 0 ? 1 : 0;
        strict += u == 2 ? 1 : 0;
    }
    const auto total = static_cast<double>(reps);
    const double proportion = static_cast<double>(count) / total;
    return {params, n, reps, count, proportion, binomial_std_error(proportion, reps),
            strict, static_cast<double>(strict) / total};
}

CoverageReport coverage(const NbParams& params, std::int64_t n, const std::vector<double>& levels, std::int64_t reps,
                        std::uint64_t seed, unsigned threads) {
    check_run(n, reps);
    RegionProblem shape{0.0, 0.0, n, levels};
    shape.validate();

    std::vector<double> critical;
    for (const double level : levels)
        critical.push_back(critical_value(1.0 - level));

    // per replicate: -1 degenerate, otherwise the statistic at the true parameters
    std::vector<double> stat(static_cast<std::size_t>(reps), -1.0);
    const Candidate truth{params.mu(), params.p_shape()};
    parallel_for(reps, resolve_threads(threads), [&](std::int64_t r) {
        SeededStream stream(seed, static_cast<std::uint64_t>(r));
        const SampleStats stats = sample_stats(sample_nb(params, n, stream));
        if (degenerate(stats))
            return;
        const EstimateResult est = mme(stats);
        const RegionProblem problem{est.log_mu_hat, est.log_p1_hat, n, {}};
        stat[static_cast<std::size_t>(r)] = region_statistic(problem, truth);
    });

    CoverageReport report{params, n, reps, {}, 0};
    std::vector<std::int64_t> hits(levels.size(), 0);
    for (const double s : stat) {
        if (s < 0.0) {
            ++report.degenerate_count;
            continue;
        }
        for (std::size_t l = 0; l < levels.size(); ++l)
            hits[l] += s <= critical[l] ? 1 : 0;
    }
    const std::int64_t used = reps - report.degenerate_count;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const double cov = used > 0 ? static_cast<double>(hits[l]) / static_cast<double>(used) : 0.0;
        report.entries.push_back({levels[l], hits[l], cov, binomial_std_error(cov, used)});
    }
    return report;
}

DeltaMethodStudy delta_method_study(const NbParams& params, std::int64_t n, std::int64_t reps, std::uint64_t seed,
                                    unsigned threads) {
    const auto estimates = simulate_estimates(params, n, reps, seed, threads);

    std::vector<Eigen::Vector2d> theta;
    theta.reserve(estimates.size());
    for (const auto& est : estimates) {
        if (est)
            theta.emplace_back(est->log_mu_hat, est->log_p1_hat);
    }
    const auto used = static_cast<std::int64_t>(theta.size());
    if (used < 2)
        throw Error(ErrorCode::Domain, "fewer than two usable replicates");

    const AsymptoticMoments predicted = asymptotic_moments(params, n);

    Eigen::Matrix<double, Eigen::Dynamic, 2> samples(used, 2);
    for (std::int64_t r = 0; r < used; ++r)
        samples.row(r) = theta[static_cast<std::size_t>(r)].transpose();
    const Eigen::Matrix<double, Eigen::Dynamic, 2> centered = samples.rowwise() - samples.colwise().mean();
    const Eigen::Matrix2d cov = centered.transpose() * centered / static_cast<double>(used - 1);

    // theta2 - a theta1 against theta1
    const double var1 = cov(0, 0);
    const double cov_resid = cov(0, 1) - predicted.a * var1;
    const double var_resid = cov(1, 1) - 2.0 * predicted.a * cov(0, 1) + predicted.a * predicted.a * var1;

    DeltaMethodStudy study{params, n, reps, reps - used, cov, predicted, cov_resid / std::sqrt(var1 * var_resid)};
    return study;
}

std::string coverage_csv_header() {
    return "mu,p,n,level,reps,degenerate,coverage,std_error\n";
}

std::string to_csv_rows(const CoverageReport& report) {
    std::string out;
    for (const CoverageEntry& e : report.entries) {
        out += format_number(report.params.mu()) + ',' + format_number(report.params.p_shape()) + ',' +
               std::to_string(report.n) + ',' + format_number(e.level) + ',' + std::to_string(report.reps) + ',' +
               std::to_string(report.degenerate_count) + ',' + format_number(e.coverage) + ',' +
               format_number(e.std_error) + '\n';
    }
    return out;
}

std::string underdispersion_csv_header() {
    return "mu,p,n,reps,count,proportion,std_error,strict_count,strict_proportion\n";
}

std::string to_csv_row(const UnderdispersionReport& report) {
    return format_number(report.params.mu()) + ',' + format_number(report.params.p_shape()) + ',' +
           std::to_string(report.n) + ',' + std::to_string(report.reps) + ',' + std::to_string(report.count) + ',' +
           format_number(report.proportion) + ',' + format_number(report.std_error) + ',' +
           std::to_string(report.strict_count) + ',' + format_number(report.strict_proportion) + '\n';
}

} // namespace nbcr
