#ifndef NBCR_REGION_HPP
#define NBCR_REGION_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nbcr/estimators.hpp"
#include "nbcr/marching_squares.hpp"
#include "nbcr/nbd_model.hpp"

namespace nbcr {

/// Observed log estimates, sample size and the confidence levels 1 - delta to draw.
struct RegionProblem {
    double log_mu_hat;
    double log_p1_hat;
    std::int64_t n;
    std::vector<double> levels;

    double mu_hat() const { return std::exp(log_mu_hat); }
    double p_hat() const { return std::expm1(log_p1_hat); }
    void validate() const;
};

RegionProblem make_problem(const EstimateResult& est, std::int64_t n, std::vector<double> levels);

/// A point of the (mu, P) plane. P may be negative.
struct Candidate {
    double mu;
    double p;
};

/// Chi-squared (2 d.f.) upper-delta quantile, -2 ln delta.
double critical_value(double delta);

/// True when (mu, P) is in the domain where both variance terms are positive:
/// mu > 0, P > -1 and mu + P > 0.
template <typename Scalar>
bool in_statistic_domain(Scalar mu, Scalar p) {
    return mu > Scalar(0) && p > Scalar(-1) && mu + p > Scalar(0);
}

/// Quadratic form Z1^2 + Z2^2 of the decorrelated log estimates, evaluated at a
/// candidate (mu, P). No domain check; see region_statistic.
template <typename Scalar>
Scalar region_statistic_unchecked(Scalar log_mu_hat, Scalar log_p1_hat, Scalar n, Scalar mu, Scalar p) {
    using std::log;
    using std::log1p;
    const Scalar d1 = log_mu_hat - log(mu);
    const Scalar d2 = log_p1_hat - log1p(p) - p / (Scalar(1) + p) * d1;
    return d1 * d1 / ((Scalar(1) + p) / (n * mu)) + d2 * d2 / (Scalar(2) * (mu + p) / (n * mu));
}

/// Throws DomainInvalid outside in_statistic_domain.
double region_statistic(const RegionProblem& problem, Candidate candidate);

bool contains(const RegionProblem& problem, Candidate candidate, double delta);

struct GridSpec {
    double mu_min;
    double mu_max;
    double p_min;
    double p_max;
    Eigen::Index mu_steps = 256;
    Eigen::Index p_steps = 256;

    void validate() const;
    Eigen::ArrayXd mu_axis() const { return Eigen::ArrayXd::LinSpaced(mu_steps, mu_min, mu_max); }
    Eigen::ArrayXd p_axis() const { return Eigen::ArrayXd::LinSpaced(p_steps, p_min, p_max); }
    double cell_area() const {
        return (mu_max - mu_min) / static_cast<double>(mu_steps - 1) *
               ((p_max - p_min) / static_cast<double>(p_steps - 1));
    }
};

/// Region area split by the sign of P: P <= 0 reads as Poisson, P > 0 as
/// negative binomial. Areas are grid-point counts times the cell area.
struct RegionSplit {
    std::int64_t poisson_points = 0;
    std::int64_t nb_points = 0;
    double poisson_area = 0.0;
    double nb_area = 0.0;
};

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct LevelContour {
    double level;
    double critical;
    BoolArray mask;
    std::vector<Polyline> boundaries;
    RegionSplit split;
};

/// stat(i, j) at (mu_axis[i], p_axis[j]); NaN marks points outside the domain.
struct ContourGrid {
    GridSpec spec;
    Eigen::ArrayXXd stat;
    std::vector<LevelContour> levels;

    std::int64_t valid_points() const { return (stat == stat).count(); }
};

/// Region statistic over a whole grid as one array expression.
Eigen::ArrayXXd evaluate_statistic(const RegionProblem& problem, const GridSpec& spec);

ContourGrid contour_grid(const RegionProblem& problem, const GridSpec& spec);

/// Bounds exp(theta_i +- k sd_i) on both log axes, sd_i from the delta-method
/// moments at `guess`.
GridSpec default_grid(const RegionProblem& problem, const NbParams& guess, double k = 4.0,
                      Eigen::Index steps = 256);

enum class RenderFormat { Csv, Svg };

std::string render(const ContourGrid& grid, RenderFormat format);

/// Locale-independent %g-style formatting with `digits` significant digits.
std::string format_number(double value, int digits = 9);

} // namespace nbcr

#endif // NBCR_REGION_HPP
