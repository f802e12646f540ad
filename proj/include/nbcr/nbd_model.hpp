#ifndef NBCR_NBD_MODEL_HPP
#define NBCR_NBD_MODEL_HPP

#include <cstdint>

namespace nbcr {

/// Negative binomial NB(mu, P) in mean/shape form: mean mu, variance mu(1 + P).
/// P = 0 is the Poisson limit.
class NbParams {
public:
    NbParams(double mu, double p_shape);

    double mu() const noexcept { return mu_; }
    double p_shape() const noexcept { return p_shape_; }
    bool is_poisson() const noexcept { return p_shape_ == 0.0; }

    friend bool operator==(const NbParams&, const NbParams&) = default;

private:
    double mu_;
    double p_shape_;
};

/// Failure-counting form: P(X = x) = C(alpha + x - 1, x) p^alpha (1 - p)^x.
struct ClassicParams {
    double p_success;
    double alpha;
};

/// E(X), E(X^2), E(X^3), E(X^4) of a single observation.
struct RawMoments {
    double m1;
    double m2;
    double m3;
    double m4;
};

struct MeanVariance {
    double mean;
    double variance;
};

double log_gamma(double x);

double poisson_pmf(double mu, std::int64_t x);
double log_pmf(const NbParams& params, std::int64_t x);
double pmf(const NbParams& params, std::int64_t x);

/// Probability generating function E(z^X). Requires 1 + P - P z > 0.
double pgf(const NbParams& params, double z);

RawMoments raw_moments(const NbParams& params);
MeanVariance mean_variance(const NbParams& params);

ClassicParams to_classic(const NbParams& params);
NbParams from_classic(const ClassicParams& classic);

/// Upper summation limit leaving at most `tail_mass` beyond it: Chebyshev bound
/// mean + sd / sqrt(tail_mass), then doubled.
std::int64_t truncation_point(const NbParams& params, double tail_mass);

} // namespace nbcr

#endif // NBCR_NBD_MODEL_HPP
