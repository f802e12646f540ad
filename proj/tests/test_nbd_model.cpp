#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nbcr/error.hpp"
#include "nbcr/nbd_model.hpp"
#include "oracles.hpp"

using namespace nbcr;

namespace {

const std::vector<double> kMuGrid{0.1, 0.3, 1.0, 3.0, 10.0};
const std::vector<double> kShapeGrid{0.0, 0.1, 0.3, 1.0, 10.0};

double relative_error(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

} // namespace

TEST(NbParams, RejectsInvalid) {
    EXPECT_THROW(NbParams(0.0, 1.0), Error);
    EXPECT_THROW(NbParams(-1.0, 1.0), Error);
    EXPECT_THROW(NbParams(1.0, -0.1), Error);
    EXPECT_THROW(NbParams(std::nan(""), 1.0), Error);
    EXPECT_NO_THROW(NbParams(1.0, 0.0));
    EXPECT_TRUE(NbParams(2.0, 0.0).is_poisson());
}

TEST(Pmf, GeometricCase) {
    // mu = P = 1 is geometric with p = 1/2
    const NbParams geo(1.0, 1.0);
    EXPECT_NEAR(pmf(geo, 0), 0.5, 1e-15);
    EXPECT_NEAR(pmf(geo, 3), 0.0625, 1e-15);
    for (int x = 0; x < 40; ++x)
        EXPECT_LT(relative_error(pmf(geo, x), std::ldexp(1.0, -(x + 1))), 1e-12) << x;
}

TEST(Pmf, PoissonBranch) {
    EXPECT_NEAR(pmf(NbParams(2.0, 0.0), 0), std::exp(-2.0), 1e-16);
    EXPECT_NEAR(pmf(NbParams(2.0, 0.0), 3), std::exp(-2.0) * 8.0 / 6.0, 1e-15);
    EXPECT_DOUBLE_EQ(pmf(NbParams(2.0, 0.0), 5), poisson_pmf(2.0, 5));
}

TEST(Pmf, NegativeCountIsDomainError) {
    try {
        (void)pmf(NbParams(1.0, 1.0), -1);
        FAIL() << "expected a domain error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Domain);
    }
}

TEST(Pmf, MatchesRecurrenceOracle) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const NbParams params(mu, shape);
            const std::vector<double> ref = oracle::pmf_table(mu, shape);
            for (std::size_t x = 0; x < ref.size(); ++x) {
                if (ref[x] < 1e-250)
                    continue;
                EXPECT_LT(relative_error(pmf(params, static_cast<std::int64_t>(x)), ref[x]), 1e-10)
                    << "mu=" << mu << " P=" << shape << " x=" << x;
            }
        }
    }
}

TEST(Pmf, LargeCountsStayFinite) {
    const NbParams params(3.0, 0.3);
    const double tiny = pmf(params, 5000);
    EXPECT_GE(tiny, 0.0);
    EXPECT_LT(tiny, 1e-300);
    EXPECT_TRUE(std::isfinite(log_pmf(params, 5000)));
}

TEST(Pmf, Normalization) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const NbParams params(mu, shape);
            const std::int64_t last = truncation_point(params, 1e-10);
            double sum = 0.0;
            double max_partial = 0.0;
            for (std::int64_t x = 0; x <= last; ++x) {
                sum += pmf(params, x);
                max_partial = std::max(max_partial, sum);
            }
            EXPECT_GE(sum, 1.0 - 1e-10) << "mu=" << mu << " P=" << shape;
            EXPECT_LE(max_partial, 1.0 + 1e-12) << "mu=" << mu << " P=" << shape;
        }
    }
}

TEST(Pmf, PoissonLimitContinuity) {
    for (const double mu : {0.3, 1.0, 3.0}) {
        const NbParams near(mu, 1e-8);
        double worst = 0.0;
        for (std::int64_t x = 0; x < 100; ++x)
            worst = std::max(worst, std::fabs(pmf(near, x) - poisson_pmf(mu, x)));
        EXPECT_LT(worst, 1e-6) << "mu=" << mu;
    }
}

TEST(Pgf, Examples) {
    EXPECT_NEAR(pgf(NbParams(3.0, 2.0), 1.0), 1.0, 1e-15);
    EXPECT_NEAR(pgf(NbParams(1.0, 1.0), 0.0), 0.5, 1e-15);
    EXPECT_NEAR(pgf(NbParams(1.0, 1.0), 0.0), pmf(NbParams(1.0, 1.0), 0), 1e-15);
    EXPECT_NEAR(pgf(NbParams(2.0, 0.0), 0.0), std::exp(-2.0), 1e-16);
}

TEST(Pgf, NonPositiveBaseIsDomainError) {
    // 1 + P - P z = 1 + 1 - 3 < 0
    EXPECT_THROW((void)pgf(NbParams(1.0, 1.0), 3.0), Error);
    EXPECT_THROW((void)pgf(NbParams(1.0, 1.0), 2.0), Error);
}

TEST(Pgf, AgreesWithPmfSeries) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const NbParams params(mu, shape);
            const std::int64_t last = truncation_point(params, 1e-10);
            for (const double z : {-0.5, 0.0, 0.5, 0.9}) {
                double series = 0.0;
                double power = 1.0;
                for (std::int64_t x = 0; x <= last; ++x) {
                    series += power * pmf(params, x);
                    power *= z;
                    if (power == 0.0)
                        break;
                }
                EXPECT_NEAR(pgf(params, z), series, 1e-8) << "mu=" << mu << " P=" << shape << " z=" << z;
            }
        }
    }
}

TEST(RawMoments, Examples) {
    EXPECT_DOUBLE_EQ(raw_moments(NbParams(1.0, 1.0)).m2, 3.0);
    const RawMoments poisson = raw_moments(NbParams(1.0, 0.0));
    EXPECT_DOUBLE_EQ(poisson.m1, 1.0);
    EXPECT_DOUBLE_EQ(poisson.m2, 2.0);
    EXPECT_DOUBLE_EQ(poisson.m3, 5.0);
    EXPECT_DOUBLE_EQ(poisson.m4, 15.0);
    const RawMoments rm = raw_moments(NbParams(2.0, 3.0));
    EXPECT_DOUBLE_EQ(rm.m1, 2.0);
    EXPECT_DOUBLE_EQ(rm.m2, 12.0);
}

TEST(RawMoments, MatchBruteForceSums) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const RawMoments rm = raw_moments(NbParams(mu, shape));
            const std::vector<double> ref = oracle::brute_force_moments(mu, shape);
            EXPECT_LT(relative_error(rm.m1, ref[0]), 1e-8) << mu << ' ' << shape;
            EXPECT_LT(relative_error(rm.m2, ref[1]), 1e-8) << mu << ' ' << shape;
            EXPECT_LT(relative_error(rm.m3, ref[2]), 1e-8) << mu << ' ' << shape;
            EXPECT_LT(relative_error(rm.m4, ref[3]), 1e-8) << mu << ' ' << shape;
            EXPECT_GE(rm.m2, rm.m1 * rm.m1);
            EXPECT_GE(rm.m4, rm.m2 * rm.m2);
        }
    }
}

TEST(MeanVariance, Examples) {
    const auto a = mean_variance(NbParams(3.0, 0.3));
    EXPECT_DOUBLE_EQ(a.mean, 3.0);
    EXPECT_NEAR(a.variance, 3.9, 1e-15);
    const auto b = mean_variance(NbParams(5.0, 0.0));
    EXPECT_EQ(b.mean, b.variance);
    const auto c = mean_variance(NbParams(1.0, 10.0));
    EXPECT_DOUBLE_EQ(c.variance, 11.0);
}

TEST(MeanVariance, MatchesRawMoments) {
    for (const double mu : kMuGrid) {
        for (const double shape : kShapeGrid) {
            const NbParams params(mu, shape);
            const RawMoments rm = raw_moments(params);
            const auto mv = mean_variance(params);
            EXPECT_LT(relative_error(rm.m2 - rm.m1 * rm.m1, mv.variance), 1e-12) << mu << ' ' << shape;
            EXPECT_GE(mv.variance, mv.mean);
        }
    }
}

TEST(Classic, Conversions) {
    const ClassicParams c = to_classic(NbParams(1.0, 1.0));
    EXPECT_DOUBLE_EQ(c.p_success, 0.5);
    EXPECT_DOUBLE_EQ(c.alpha, 1.0);

    const NbParams back = from_classic({0.25, 2.0});
    EXPECT_DOUBLE_EQ(back.mu(), 6.0);
    EXPECT_DOUBLE_EQ(back.p_shape(), 3.0);

    EXPECT_THROW((void)to_classic(NbParams(3.0, 0.0)), Error);
    EXPECT_THROW((void)from_classic({1.0, 2.0}), Error);
    EXPECT_THROW((void)from_classic({0.5, 0.0}), Error);
}

TEST(Classic, RoundTrip) {
    for (const double mu : kMuGrid) {
        for (const double shape : {0.1, 0.3, 1.0, 10.0}) {
            const NbParams back = from_classic(to_classic(NbParams(mu, shape)));
            EXPECT_LT(relative_error(back.mu(), mu), 1e-12);
            EXPECT_LT(relative_error(back.p_shape(), shape), 1e-12);
        }
    }
}
