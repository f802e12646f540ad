#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nbcr/error.hpp"
#include "nbcr/estimators.hpp"
#include "nbcr/region.hpp"
#include "oracles.hpp"

using namespace nbcr;

namespace {

const std::vector<double> kMuGrid{0.1, 0.3, 1.0, 3.0, 10.0};
const std::vector<double> kShapeGrid{0.0, 0.1, 0.3, 1.0, 10.0};

double rel(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no nbcr::Error thrown";
    return ErrorCode::Domain;
}

} // namespace

TEST(SampleStats, Examples) {
    const std::vector<std::int64_t> a{0, 0, 2, 2};
    const SampleStats s = sample_stats(a);
    EXPECT_EQ(s.n, 4);
    EXPECT_DOUBLE_EQ(s.mean, 1.0);
    EXPECT_DOUBLE_EQ(s.m2, 2.0);
    EXPECT_DOUBLE_EQ(s.s2, 1.0);

    const std::vector<std::int64_t> b{3, 3, 3};
    const SampleStats c = sample_stats(b);
    EXPECT_EQ(c.n, 3);
    EXPECT_DOUBLE_EQ(c.mean, 3.0);
    EXPECT_DOUBLE_EQ(c.m2, 9.0);
    EXPECT_EQ(c.s2, 0.0);
}

TEST(SampleStats, Errors) {
    EXPECT_EQ(code_of([] { (void)sample_stats(std::vector<std::int64_t>{}); }), ErrorCode::EmptySample);
    EXPECT_EQ(code_of([] { (void)sample_stats(std::vector<std::int64_t>{4}); }), ErrorCode::EmptySample);
    EXPECT_EQ(code_of([] { (void)sample_stats(std::vector<std::int64_t>{1, -2, 3}); }), ErrorCode::NegativeCount);
}

TEST(SampleStats, VarianceIdentityOnRandomData) {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = std::uniform_int_distribution<int>(2, 300)(gen);
        const auto top = std::uniform_int_distribution<int>(1, 1000)(gen);
        std::vector<std::int64_t> data(static_cast<std::size_t>(n));
        for (auto& x : data)
            x = std::uniform_int_distribution<int>(0, top)(gen);
        const SampleStats s = sample_stats(data);
        EXPECT_GE(s.m2, s.mean * s.mean);
        if (s.s2 > 0.0)
            EXPECT_LT(std::fabs(s.s2 - (s.m2 - s.mean * s.mean)) / s.s2, 1e-9);
    }
}

TEST(SampleStats, TiesAreExact) {
    // s2 = mean exactly: {0, 2} has mean 1 and s2 1
    const SampleStats s = sample_stats(std::vector<std::int64_t>{0, 2});
    EXPECT_EQ(s.s2, s.mean);
    // {0,0,0,1,1,2}: mean 2/3, m2 1, s2 5/9
    const SampleStats t = sample_stats(std::vector<std::int64_t>{0, 0, 0, 1, 1, 2});
    EXPECT_DOUBLE_EQ(t.s2, 5.0 / 9.0);
}

TEST(Mme, ReportedMomentsExample) {
    const EstimateResult est = mme(stats_from_moments(50, 0.96, 2.60));
    EXPECT_NEAR(est.mu_hat, 0.960, 1e-15);
    // s2 = 2.60 - 0.96^2 = 1.6784, P_hat + 1 = 1.6784 / 0.96
    EXPECT_NEAR(est.p_hat + 1.0, 1.6784 / 0.96, 1e-12);
    EXPECT_NEAR(est.p_hat + 1.0, 1.748333333333, 1e-11);
    EXPECT_EQ(est.regime, Regime::NegativeBinomial);
}

TEST(Mme, NegativeEstimateIsPoissonRegime) {
    const EstimateResult est = mme(SampleStats{50, 2.0, 4.0 + 1.5, 1.5});
    EXPECT_DOUBLE_EQ(est.p_hat, -0.25);
    EXPECT_EQ(est.regime, Regime::PoissonLimit);
    EXPECT_NEAR(std::exp(est.log_p1_hat), 0.75, 1e-15);
}

TEST(Mme, DegenerateSamples) {
    EXPECT_EQ(code_of([] { (void)mme(sample_stats(std::vector<std::int64_t>{0, 0, 0, 0})); }), ErrorCode::ZeroMean);
    EXPECT_EQ(code_of([] { (void)mme(sample_stats(std::vector<std::int64_t>{3, 3, 3})); }), ErrorCode::ZeroVariance);
}

TEST(Mme, InvertsTheoreticalMoments) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const double var = mu * (1.0 + shape);
            const EstimateResult est = mme(SampleStats{100, mu, var + mu * mu, var});
            EXPECT_NEAR(est.mu_hat, mu, 1e-12 * mu);
            EXPECT_NEAR(est.p_hat, shape, 1e-12 * std::max(1.0, shape));
            EXPECT_LT(rel(std::exp(est.log_mu_hat), est.mu_hat), 1e-12);
            EXPECT_LT(rel(std::exp(est.log_p1_hat), est.p_hat + 1.0), 1e-12);
        }
    }
    const EstimateResult est = mme(SampleStats{100, 3.0, 9.0 + 3.9, 3.9});
    EXPECT_NEAR(est.p_hat, 0.3, 1e-12);
}

TEST(Mme, RegimeFlagFollowsDispersion) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> mean_dist(0.05, 20.0);
    std::uniform_real_distribution<double> ratio(0.2, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double mean = mean_dist(gen);
        const double s2 = i % 50 == 0 ? mean : mean * ratio(gen);
        const EstimateResult est = mme(SampleStats{30, mean, s2 + mean * mean, s2});
        EXPECT_EQ(est.regime == Regime::PoissonLimit, s2 <= mean);
    }
}

TEST(AsymptoticMoments, Examples) {
    const AsymptoticMoments a = asymptotic_moments(NbParams(1.0, 1.0), 50);
    EXPECT_NEAR(a.var_log_mu, 0.04, 1e-15);
    EXPECT_NEAR(a.var_resid, 0.08, 1e-15);

    const AsymptoticMoments b = asymptotic_moments(NbParams(3.0, 0.0), 30);
    EXPECT_EQ(b.cov, 0.0);
    EXPECT_EQ(b.a, 0.0);
    EXPECT_NEAR(b.var_log_p1, 6.0 / 90.0, 1e-16);
    EXPECT_NEAR(b.var_resid, 6.0 / 90.0, 1e-16);

    const AsymptoticMoments c = asymptotic_moments(NbParams(2.0, 3.0), 10);
    EXPECT_NEAR(c.var_log_mu, 0.2, 1e-15);
    EXPECT_NEAR(c.var_log_p1, 49.0 / 80.0, 1e-15);
    EXPECT_NEAR(c.cov, 0.15, 1e-15);
    EXPECT_NEAR(c.a, 0.75, 1e-15);
    EXPECT_NEAR(c.var_resid, 0.5, 1e-15);
    EXPECT_NEAR(c.var_log_p1, 0.6125, 1e-14);
    EXPECT_NEAR(c.var_resid, 0.5, 1e-14);
    EXPECT_NEAR(c.var_log_p1 - c.cov * c.cov / c.var_log_mu, 0.5, 1e-14);
}

TEST(AsymptoticMoments, DecorrelationIdentity) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            for (const std::int64_t n : {2, 30, 50, 100, 1000}) {
                const AsymptoticMoments m = asymptotic_moments(NbParams(mu, shape), n);
                const double closed = 2.0 * (mu + shape) / (mu * static_cast<double>(n));
                const double expanded = m.var_log_p1 - 2.0 * m.a * m.cov + m.a * m.a * m.var_log_mu;
                EXPECT_LT(rel(expanded, closed), 1e-12) << mu << ' ' << shape << ' ' << n;
                EXPECT_LT(rel(m.var_resid, closed), 1e-12);
                EXPECT_LT(rel(m.var_log_p1 - m.cov * m.cov / m.var_log_mu, closed), 1e-12);
                EXPECT_NEAR(m.a, m.cov / m.var_log_mu, 1e-15);
                EXPECT_LT(m.rho * m.rho, 1.0);
                EXPECT_GT(m.var_log_mu, 0.0);
                EXPECT_GT(m.var_log_p1, 0.0);
            }
        }
    }
}

TEST(AsymptoticMoments, ClosedFormsMatchJacobianRoute) {
    // J Σ Jᵀ from the four raw moments against the simplified closed forms
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const NbParams params(mu, shape);
            const Eigen::Matrix2d jsj = delta_method_covariance(params, 40);
            const Eigen::Matrix2d closed = asymptotic_moments(params, 40).covariance();
            EXPECT_LT(rel(jsj(0, 0), closed(0, 0)), 1e-10) << mu << ' ' << shape;
            EXPECT_LT(rel(jsj(1, 1), closed(1, 1)), 1e-10) << mu << ' ' << shape;
            EXPECT_NEAR(jsj(0, 1), closed(0, 1), 1e-10 * std::sqrt(closed(0, 0) * closed(1, 1)));
            EXPECT_NEAR(jsj(1, 0), jsj(0, 1), 1e-15);
        }
    }
}

TEST(Linearized, Examples) {
    const NbParams params(2.0, 0.5);
    const double second = 2.0 * (1.0 + 2.0 + 0.5);
    auto [d1, d2] = linearized_estimates(SampleStats{50, 2.0, second, second - 4.0}, params);
    EXPECT_EQ(d1, 0.0);
    EXPECT_EQ(d2, 0.0);

    auto [e1, e2] = linearized_estimates(SampleStats{50, 2.0 * 1.05, second, 0.0}, params);
    EXPECT_NEAR(e1, 0.05, 1e-15);
    (void)e2;

    auto [f1, f2] = linearized_estimates(SampleStats{50, 1.1, 3.2, 3.2 - 1.21}, NbParams(1.0, 1.0));
    EXPECT_NEAR(f1, 0.1, 1e-15);
    EXPECT_NEAR(f2, -0.1, 1e-15);
}

TEST(Linearized, FirstOrderAgreementWithExactLogs) {
    // small perturbations: exact log estimates minus truth ~ linear terms, error O(eps^2)
    const NbParams params(3.0, 0.3);
    const double mu = 3.0;
    const double second = mu * (1.0 + mu + 0.3);
    for (const double eps : {1e-3, 1e-4}) {
        const double mean = mu * (1.0 + eps);
        const double m2 = second * (1.0 - eps);
        const SampleStats s{100, mean, m2, m2 - mean * mean};
        const EstimateResult est = mme(s);
        auto [d1, d2] = linearized_estimates(s, params);
        EXPECT_NEAR(est.log_mu_hat - std::log(mu), d1, 10 * eps * eps);
        EXPECT_NEAR(est.log_p1_hat - std::log1p(0.3), d2, 200 * eps * eps);
    }
}

TEST(Standardize, Centering) {
    const NbParams params(1.5, 0.7);
    const EstimateResult est = estimate_from_reported(1.5, 1.7);
    auto [z1, z2] = standardize(est, params, 50);
    EXPECT_NEAR(z1, 0.0, 1e-15);
    EXPECT_NEAR(z2, 0.0, 1e-14);
}

TEST(Standardize, ReportedExampleQuadraticForm) {
    const EstimateResult est = estimate_from_reported(0.960, 1.906);
    auto [z1, z2] = standardize(est, NbParams(1.0, 1.0), 50);
    const double expected = oracle::region_statistic(0.960, 1.906, 50, 1.0, 1.0);
    EXPECT_NEAR(expected, 0.0512723610156360, 1e-15);
    EXPECT_NEAR(z1 * z1 + z2 * z2, expected, 1e-12);
    EXPECT_NEAR(z1 * z1 + z2 * z2, 0.0513, 1e-4);
}

TEST(Standardize, ScalesWithSqrtN) {
    const EstimateResult est = estimate_from_reported(2.4, 1.9);
    const NbParams params(2.0, 1.0);
    auto [a1, a2] = standardize(est, params, 25);
    auto [b1, b2] = standardize(est, params, 100);
    EXPECT_NEAR(b1, 2.0 * a1, 1e-13);
    EXPECT_NEAR(b2, 2.0 * a2, 1e-13);
}

TEST(Standardize, AgreesWithRegionStatistic) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double mu = 0.05 + 10.0 * u(gen);
        const double shape = 5.0 * u(gen);
        const std::int64_t n = 2 + static_cast<std::int64_t>(500 * u(gen));
        const double mu_hat = mu * std::exp(0.6 * (u(gen) - 0.5));
        const double p1_hat = (1.0 + shape) * std::exp(0.8 * (u(gen) - 0.5));
        const EstimateResult est = estimate_from_reported(mu_hat, p1_hat);
        auto [z1, z2] = standardize(est, NbParams(mu, shape), n);
        const RegionProblem problem = make_problem(est, n, {0.95});
        const double stat = region_statistic(problem, {mu, shape});
        EXPECT_LE(std::fabs(z1 * z1 + z2 * z2 - stat), 1e-12 * std::max(1.0, stat));
    }
}
