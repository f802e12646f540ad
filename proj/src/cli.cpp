#include "nbcr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbcr/error.hpp"
#include "nbcr/estimators.hpp"
#include "nbcr/region.hpp"
#include "nbcr/verify.hpp"

namespace nbcr::cli {
namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_reals(std::string_view text, std::string_view what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string_view token = text.substr(start, comma - start);
        while (!token.empty() && token.front() == ' ')
            token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ')
            token.remove_suffix(1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
            throw UsageError("invalid number '" + std::string(token) + "' in " + std::string(what));
        values.push_back(value);
        start = comma + 1;
    }
    return values;
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> levels = parse_reals(text, "--levels");
    for (const double level : levels) {
        if (!(level > 0.0 && level < 1.0))
            throw UsageError("confidence level " + format_number(level) + " is outside (0, 1)");
    }
    return levels;
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw UsageError("cannot write '" + path + "'");
    file << content;
}

std::string fmt(double v) {
    return format_number(v, 9);
}

struct EstimateOptions {
    std::string input;
    bool json = false;
};

struct RegionOptions {
    std::string input;
    std::string estimates;
    std::int64_t n = 0;
    std::string levels = "0.5,0.8,0.95";
    std::string grid;
    double k = 4.0;
    std::int64_t steps = 256;
    std::string out;
    std::string format;
    std::vector<std::string> checks;
};

struct SimulationOptions {
    double mu = 0.0;
    double p = 0.0;
    std::int64_t n = 0;
    std::string levels = "0.5,0.8,0.95";
    std::int64_t reps = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out;
};

int cmd_estimate(const EstimateOptions& opt, std::ostream& out) {
    const std::vector<std::int64_t> counts = parse_counts(read_input(opt.input));
    const SampleStats stats = sample_stats(counts);
    const EstimateResult est = mme(stats);

    if (opt.json) {
        nlohmann::ordered_json j;
        j["n"] = stats.n;
        j["mean"] = stats.mean;
        j["s2"] = stats.s2;
        j["mu_hat"] = est.mu_hat;
        j["p_hat"] = est.p_hat;
        j["log_mu_hat"] = est.log_mu_hat;
        j["log_p1_hat"] = est.log_p1_hat;
        j["regime"] = to_string(est.regime);
        out << j.dump(2) << '\n';
        return Success;
    }
    out << "n           " << stats.n << '\n'
        << "mean        " << fmt(stats.mean) << '\n'
        << "s2          " << fmt(stats.s2) << '\n'
        << "mu_hat      " << fmt(est.mu_hat) << '\n'
        << "p_hat       " << fmt(est.p_hat) << '\n'
        << "log_mu_hat  " << fmt(est.log_mu_hat) << '\n'
        << "log_p1_hat  " << fmt(est.log_p1_hat) << '\n'
        << "regime      " << to_string(est.regime) << '\n';
    return Success;
}

int cmd_region(const RegionOptions& opt, std::ostream& out) {
    const std::vector<double> levels = parse_levels(opt.levels);

    EstimateResult est{};
    std::int64_t n = 0;
    if (!opt.estimates.empty()) {
        if (!opt.input.empty())
            throw UsageError("give either a count file or --estimates, not both");
        const std::vector<double> values = parse_reals(opt.estimates, "--estimates");
        if (values.size() != 2)
            throw UsageError("--estimates takes MU_HAT,P1_HAT");
        if (!(values[0] > 0.0) || !(values[1] > 0.0))
            throw UsageError("--estimates requires MU_HAT > 0 and P1_HAT > 0");
        if (opt.n < 2)
            throw UsageError("--estimates needs --n >= 2");
        est = estimate_from_reported(values[0], values[1]);
        n = opt.n;
    } else {
        if (opt.input.empty())
            throw UsageError("need a count file or --estimates MU_HAT,P1_HAT");
        const SampleStats stats = sample_stats(parse_counts(read_input(opt.input)));
        est = mme(stats);
        n = stats.n;
        if (opt.n != 0 && opt.n != n)
            throw UsageError("--n disagrees with the sample size of the count file");
    }

    const RegionProblem problem = make_problem(est, n, levels);

    GridSpec spec;
    if (!opt.grid.empty()) {
        const std::vector<double> g = parse_reals(opt.grid, "--grid");
        if (g.size() != 4 && g.size() != 6)
            throw UsageError("--grid takes MU_MIN,MU_MAX,P_MIN,P_MAX[,MU_STEPS,P_STEPS]");
        spec = GridSpec{g[0], g[1], g[2], g[3], opt.steps, opt.steps};
        if (g.size() == 6) {
            spec.mu_steps = static_cast<Eigen::Index>(g[4]);
            spec.p_steps = static_cast<Eigen::Index>(g[5]);
        }
    } else {
        if (!(opt.k > 0.0))
            throw UsageError("--k must be positive");
        const NbParams guess(est.mu_hat, std::max(est.p_hat, 0.0));
        spec = default_grid(problem, guess, opt.k, opt.steps);
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    std::vector<Candidate> checks;
    for (const std::string& c : opt.checks) {
        const std::vector<double> v = parse_reals(c, "--check");
        if (v.size() != 2)
            throw UsageError("--check takes MU,P");
        checks.push_back({v[0], v[1]});
    }

    std::string format = opt.format;
    if (format.empty())
        format = opt.out.size() >= 4 && opt.out.ends_with(".svg") ? "svg" : "csv";

    const ContourGrid grid = contour_grid(problem, spec);

    out << "estimate mu_hat=" << fmt(est.mu_hat) << " p1_hat=" << fmt(std::exp(est.log_p1_hat))
        << " p_hat=" << fmt(est.p_hat) << " n=" << n << " regime=" << to_string(est.regime) << '\n';
    out << "grid mu=[" << fmt(spec.mu_min) << ',' << fmt(spec.mu_max) << "] p=[" << fmt(spec.p_min) << ','
        << fmt(spec.p_max) << "] steps=" << spec.mu_steps << 'x' << spec.p_steps << " valid=" << grid.valid_points()
        << '\n';
    for (const LevelContour& level : grid.levels) {
        out << "level=" << fmt(level.level) << " critical=" << fmt(level.critical)
            << " points=" << level.split.poisson_points + level.split.nb_points
            << " poisson_points=" << level.split.poisson_points << " nb_points=" << level.split.nb_points
            << " poisson_area=" << fmt(level.split.poisson_area) << " nb_area=" << fmt(level.split.nb_area)
            << " boundaries=" << level.boundaries.size() << '\n';
    }
    for (const Candidate& c : checks) {
        for (const double level : levels) {
            out << "check mu=" << fmt(c.mu) << " p=" << fmt(c.p) << " level=" << fmt(level) << ' ';
            if (!in_statistic_domain(c.mu, c.p)) {
                out << "outside-domain\n";
                continue;
            }
            out << (contains(problem, c, 1.0 - level) ? "inside" : "outside") << '\n';
        }
    }

    if (grid.valid_points() == 0)
        throw Error(ErrorCode::EmptyGrid, "no grid point lies in the statistic's domain");
    if (!opt.out.empty()) {
        const RenderFormat rf = format == "svg" ? RenderFormat::Svg : RenderFormat::Csv;
        const std::string body = render(grid, rf);
        if (opt.out == "-")
            out << body;
        else
            write_output(opt.out, body, out);
    }
    return Success;
}

void check_simulation(const SimulationOptions& opt) {
    if (!(opt.mu > 0.0) || !std::isfinite(opt.mu))
        throw UsageError("--mu must be positive");
    if (!(opt.p >= 0.0) || !std::isfinite(opt.p))
        throw UsageError("--p must be nonnegative");
    if (opt.n < 2)
        throw UsageError("--n must be at least 2");
    if (opt.reps < 1)
        throw UsageError("--reps must be at least 1");
}

int cmd_coverage(const SimulationOptions& opt, std::ostream& out) {
    check_simulation(opt);
    const std::vector<double> levels = parse_levels(opt.levels);
    const CoverageReport report = coverage(NbParams(opt.mu, opt.p), opt.n, levels, opt.reps, opt.seed, opt.threads);
    write_output(opt.out, coverage_csv_header() + to_csv_rows(report), out);
    return Success;
}

int cmd_underdisp(const SimulationOptions& opt, std::ostream& out) {
    check_simulation(opt);
    const UnderdispersionReport report =
        underdispersion_probability(NbParams(opt.mu, opt.p), opt.n, opt.reps, opt.seed, opt.threads);
    write_output(opt.out, underdispersion_csv_header() + to_csv_row(report), out);
    return Success;
}

int cmd_scatter(const SimulationOptions& opt, std::ostream& out) {
    check_simulation(opt);
    const auto estimates = simulate_estimates(NbParams(opt.mu, opt.p), opt.n, opt.reps, opt.seed, opt.threads);
    std::string csv = "replicate,mu_hat,p_hat,log_mu_hat,log_p1_hat\n";
    for (std::size_t r = 0; r < estimates.size(); ++r) {
        if (!estimates[r])
            continue;
        const EstimateResult& e = *estimates[r];
        csv += std::to_string(r) + ',' + fmt(e.mu_hat) + ',' + fmt(e.p_hat) + ',' + fmt(e.log_mu_hat) + ',' +
               fmt(e.log_p1_hat) + '\n';
    }
    write_output(opt.out, csv, out);
    return Success;
}

void add_simulation_options(CLI::App* cmd, SimulationOptions& opt, bool with_levels) {
    cmd->add_option("--mu", opt.mu, "true mean mu")->required();
    cmd->add_option("--p", opt.p, "true shape P (0 = Poisson)")->required();
    cmd->add_option("--n", opt.n, "sample size")->required();
    if (with_levels)
        cmd->add_option("--levels", opt.levels, "comma-separated confidence levels in (0,1)")->capture_default_str();
    cmd->add_option("--reps", opt.reps, "Monte Carlo replicates")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "generator seed")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads (0: NB_REGION_THREADS or hardware)");
    cmd->add_option("--out", opt.out, "output file (default stdout)");
}

} // namespace

std::vector<std::int64_t> parse_counts(std::string_view text) {
    std::vector<std::int64_t> counts;
    std::size_t i = 0;
    std::size_t line = 1;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        if (c == '\n')
            ++line;
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ',') {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && std::string_view(" \t\r\n,#").find(text[end]) == std::string_view::npos)
            ++end;
        const std::string_view token = text.substr(i, end - i);
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size() || value < 0)
            throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": '" + std::string(token) +
                                              "' is not a nonnegative integer");
        counts.push_back(value);
        i = end;
    }
    if (counts.size() < 2)
        throw Error(ErrorCode::Parse, "need at least 2 counts, found " + std::to_string(counts.size()));
    return counts;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Negative binomial method-of-moments estimates and joint (mu, P) confidence regions", "nbcr"};
    app.require_subcommand(1);

    EstimateOptions est_opt;
    auto* estimate = app.add_subcommand("estimate", "method-of-moments estimates from a count file");
    estimate->add_option("input", est_opt.input, "count file ('-' for stdin)")->required();
    estimate->add_flag("--json", est_opt.json, "emit a JSON object");

    RegionOptions reg_opt;
    auto* region = app.add_subcommand("region", "joint confidence regions over the (mu, P) plane");
    region->add_option("input", reg_opt.input, "count file ('-' for stdin)");
    region->add_option("--estimates", reg_opt.estimates, "MU_HAT,P1_HAT where P1_HAT = P_hat + 1");
    region->add_option("--n", reg_opt.n, "sample size (required with --estimates)");
    region->add_option("--levels", reg_opt.levels, "comma-separated confidence levels in (0,1)")->capture_default_str();
    region->add_option("--grid", reg_opt.grid, "MU_MIN,MU_MAX,P_MIN,P_MAX[,MU_STEPS,P_STEPS]");
    region->add_option("--k", reg_opt.k, "default grid half-width in asymptotic sd")->capture_default_str();
    region->add_option("--steps", reg_opt.steps, "grid points per axis")->capture_default_str();
    region->add_option("--out", reg_opt.out, "write the grid render here ('-' for stdout)");
    region->add_option("--format", reg_opt.format, "csv or svg (default from --out extension)")
        ->check(CLI::IsMember({"csv", "svg"}));
    region->add_option("--check", reg_opt.checks, "MU,P point to test for membership (repeatable)");

    SimulationOptions cov_opt;
    auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage of the confidence region");
    add_simulation_options(cov, cov_opt, true);

    SimulationOptions und_opt;
    auto* und = app.add_subcommand("underdisp", "Monte Carlo frequency of under-dispersed samples (s2 <= mean)");
    add_simulation_options(und, und_opt, false);

    SimulationOptions sc_opt;
    auto* scatter = app.add_subcommand("scatter", "dump simulated estimates as CSV");
    add_simulation_options(scatter, sc_opt, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return Usage;
    }

    try {
        if (estimate->parsed())
            return cmd_estimate(est_opt, out);
        if (region->parsed())
            return cmd_region(reg_opt, out);
        if (cov->parsed())
            return cmd_coverage(cov_opt, out);
        if (und->parsed())
            return cmd_underdisp(und_opt, out);
        if (scatter->parsed())
            return cmd_scatter(sc_opt, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return Usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::ZeroMean:
        case ErrorCode::ZeroVariance:
            return DegenerateSample;
        case ErrorCode::EmptyGrid:
            return EmptyResult;
        default:
            return Usage;
        }
    }
    return Usage;
}

} // namespace nbcr::cli
