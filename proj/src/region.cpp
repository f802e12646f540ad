#include "nbcr/region.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <sstream>

#include "nbcr/error.hpp"

namespace nbcr {

void RegionProblem::validate() const {
    if (n < 2)
        throw Error(ErrorCode::Domain, "sample size must be at least 2");
    if (!std::isfinite(log_mu_hat) || !std::isfinite(log_p1_hat))
        throw Error(ErrorCode::Domain, "log estimates must be finite");
    if (levels.empty())
        throw Error(ErrorCode::Domain, "at least one confidence level is required");
    for (const double level : levels) {
        if (!(level > 0.0 && level < 1.0))
            throw Error(ErrorCode::Domain, "confidence level must lie in (0, 1), got " + format_number(level));
    }
}

RegionProblem make_problem(const EstimateResult& est, std::int64_t n, std::vector<double> levels) {
    RegionProblem problem{est.log_mu_hat, est.log_p1_hat, n, std::move(levels)};
    problem.validate();
    return problem;
}

double critical_value(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw Error(ErrorCode::Domain, "delta must lie in (0, 1), got " + format_number(delta));
    return -2.0 * std::log(delta);
}

double region_statistic(const RegionProblem& problem, Candidate candidate) {
    if (!in_statistic_domain(candidate.mu, candidate.p))
        throw Error(ErrorCode::DomainInvalid,
                    "candidate (" + format_number(candidate.mu) + ", " + format_number(candidate.p) +
                        ") outside mu > 0, P > -1, mu + P > 0");
    return region_statistic_unchecked(problem.log_mu_hat, problem.log_p1_hat, static_cast<double>(problem.n),
                                      candidate.mu, candidate.p);
}

bool contains(const RegionProblem& problem, Candidate candidate, double delta) {
    const double c0 = critical_value(delta);
    return region_statistic(problem, candidate) <= c0;
}

void GridSpec::validate() const {
    if (mu_steps < 2 || p_steps < 2)
        throw Error(ErrorCode::GridTooCoarse, "grid needs at least 2 steps per axis");
    if (!(mu_min > 0.0) || !(mu_max > mu_min) || !std::isfinite(mu_max))
        throw Error(ErrorCode::InvalidGrid, "need 0 < mu_min < mu_max");
    if (!(p_min > -1.0) || !(p_max > p_min) || !std::isfinite(p_max))
        throw Error(ErrorCode::InvalidGrid, "need -1 < p_min < p_max");
}

Eigen::ArrayXXd evaluate_statistic(const RegionProblem& problem, const GridSpec& spec) {
    const Eigen::ArrayXXd mu = spec.mu_axis().replicate(1, spec.p_steps);
    const Eigen::ArrayXXd p = spec.p_axis().transpose().replicate(spec.mu_steps, 1);
    const double n = static_cast<double>(problem.n);

    const Eigen::ArrayXXd d1 = problem.log_mu_hat - mu.log();
    const Eigen::ArrayXXd d2 = problem.log_p1_hat - p.log1p() - p / (1.0 + p) * d1;
    const Eigen::ArrayXXd stat = d1.square() / ((1.0 + p) / (n * mu)) + d2.square() / (2.0 * (mu + p) / (n * mu));

    const auto valid = (mu > 0.0) && (p > -1.0) && (mu + p > 0.0);
    return valid.select(stat, std::numeric_limits<double>::quiet_NaN());
}

ContourGrid contour_grid(const RegionProblem& problem, const GridSpec& spec) {
    problem.validate();
    spec.validate();

    ContourGrid grid;
    grid.spec = spec;
    grid.stat = evaluate_statistic(problem, spec);

    const Eigen::ArrayXd mus = spec.mu_axis();
    const Eigen::ArrayXd ps = spec.p_axis();
    const double cell = spec.cell_area();

    for (const double level : problem.levels) {
        LevelContour contour;
        contour.level = level;
        contour.critical = critical_value(1.0 - level);
        // NaN compares false, so masked points never join the region
        contour.mask = grid.stat <= contour.critical;
        contour.boundaries = extract_isolines(grid.stat, contour.critical, mus, ps);

        for (Eigen::Index j = 0; j < spec.p_steps; ++j) {
            const std::int64_t count = contour.mask.col(j).count();
            if (ps[j] <= 0.0)
                contour.split.poisson_points += count;
            else
                contour.split.nb_points += count;
        }
        contour.split.poisson_area = static_cast<double>(contour.split.poisson_points) * cell;
        contour.split.nb_area = static_cast<double>(contour.split.nb_points) * cell;
        grid.levels.push_back(std::move(contour));
    }
    return grid;
}

GridSpec default_grid(const RegionProblem& problem, const NbParams& guess, double k, Eigen::Index steps) {
    problem.validate();
    if (!(k > 0.0))
        throw Error(ErrorCode::InvalidGrid, "grid half-width k must be positive");
    const AsymptoticMoments m = asymptotic_moments(guess, problem.n);
    const double sd_mu = std::sqrt(m.var_log_mu);
    const double sd_p1 = std::sqrt(m.var_log_p1);

    GridSpec spec;
    spec.mu_min = std::exp(problem.log_mu_hat - k * sd_mu);
    spec.mu_max = std::exp(problem.log_mu_hat + k * sd_mu);
    spec.p_min = std::expm1(problem.log_p1_hat - k * sd_p1);
    spec.p_max = std::expm1(problem.log_p1_hat + k * sd_p1);
    spec.mu_steps = steps;
    spec.p_steps = steps;
    spec.validate();
    return spec;
}

std::string format_number(double value, int digits) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, digits);
    return ec == std::errc{} ? std::string(buf.data(), end) : std::string("nan");
}

namespace {

std::string render_csv(const ContourGrid& grid) {
    const Eigen::ArrayXd mus = grid.spec.mu_axis();
    const Eigen::ArrayXd ps = grid.spec.p_axis();
    std::string out = "mu,p,stat\n";
    for (Eigen::Index i = 0; i < grid.stat.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.stat.cols(); ++j) {
            const double s = grid.stat(i, j);
            if (std::isnan(s))
                continue;
            out += format_number(mus[i]);
            out += ',';
            out += format_number(ps[j]);
            out += ',';
            out += format_number(s);
            out += '\n';
        }
    }
    return out;
}

std::string render_svg(const ContourGrid& grid) {
    constexpr double width = 640.0;
    constexpr double height = 480.0;
    constexpr double margin = 48.0;
    const GridSpec& g = grid.spec;

    const auto x_of = [&](double mu) { return margin + (mu - g.mu_min) / (g.mu_max - g.mu_min) * (width - 2 * margin); };
    const auto y_of = [&](double p) { return height - margin - (p - g.p_min) / (g.p_max - g.p_min) * (height - 2 * margin); };
    const auto num = [](double v) { return format_number(v, 6); };

    static constexpr std::array<const char*, 6> colours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"white\"/>\n";

    const double plot_top = margin;
    const double plot_bottom = height - margin;
    if (g.p_min <= 0.0) {
        // Poisson half-plane, P <= 0
        const double top = std::max(plot_top, y_of(std::min(0.0, g.p_max)));
        svg << "<rect class=\"poisson-region\" x=\"" << num(margin) << "\" y=\"" << num(top) << "\" width=\""
            << num(width - 2 * margin) << "\" height=\"" << num(plot_bottom - top)
            << "\" fill=\"#f2e6c9\" fill-opacity=\"0.7\"/>\n";
    }
    svg << "<rect x=\"" << num(margin) << "\" y=\"" << num(plot_top) << "\" width=\"" << num(width - 2 * margin)
        << "\" height=\"" << num(plot_bottom - plot_top) << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (g.p_min <= 0.0 && g.p_max >= 0.0) {
        svg << "<line class=\"mu-axis\" x1=\"" << num(margin) << "\" y1=\"" << num(y_of(0.0)) << "\" x2=\""
            << num(width - margin) << "\" y2=\"" << num(y_of(0.0)) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }

    for (std::size_t l = 0; l < grid.levels.size(); ++l) {
        const LevelContour& level = grid.levels[l];
        for (const Polyline& line : level.boundaries) {
            if (line.points.size() < 2)
                continue;
            svg << "<path data-level=\"" << format_number(level.level) << "\" fill=\"none\" stroke=\""
                << colours[l % colours.size()] << "\" stroke-width=\"1.5\" d=\"";
            const std::size_t count = line.closed ? line.points.size() - 1 : line.points.size();
            for (std::size_t k = 0; k < count; ++k) {
                svg << (k == 0 ? "M" : " L") << num(x_of(line.points[k].x())) << ' ' << num(y_of(line.points[k].y()));
            }
            if (line.closed)
                svg << " Z";
            svg << "\"/>\n";
        }
    }

    svg << "<text x=\"" << num(width / 2) << "\" y=\"" << num(height - 12) << "\" text-anchor=\"middle\">mu</text>\n"
        << "<text x=\"14\" y=\"" << num(height / 2) << "\" text-anchor=\"middle\">P</text>\n"
        << "<text x=\"" << num(margin) << "\" y=\"" << num(height - margin + 16) << "\">" << num(g.mu_min) << "</text>\n"
        << "<text x=\"" << num(width - margin) << "\" y=\"" << num(height - margin + 16)
        << "\" text-anchor=\"end\">" << num(g.mu_max) << "</text>\n"
        << "<text x=\"" << num(margin - 4) << "\" y=\"" << num(plot_bottom) << "\" text-anchor=\"end\">" << num(g.p_min)
        << "</text>\n"
        << "<text x=\"" << num(margin - 4) << "\" y=\"" << num(plot_top + 10) << "\" text-anchor=\"end\">"
        << num(g.p_max) << "</text>\n"
        << "</svg>\n";
    return svg.str();
}

} // namespace

std::string render(const ContourGrid& grid, RenderFormat format) {
    if (grid.valid_points() == 0)
        throw Error(ErrorCode::EmptyGrid, "no grid point lies in the statistic's domain");
    return format == RenderFormat::Csv ? render_csv(grid) : render_svg(grid);
}

} // namespace nbcr
