// satsol: threshold, solve, sweep, verify, propagate.
//
// Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 I/O, 4 regime refusal,
// 5 diagnostics failed.
//
// --config FILE takes a JSON object whose keys are long option names of the chosen
// subcommand ({"gamma": -30, "spacing": 0.0078125}); flags on the command line win.
// SATSOL_VERBOSITY=quiet|normal|debug controls how much goes to the terminal.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "satsol/io.hpp"
#include "satsol/satsol.hpp"

namespace fs = std::filesystem;
using namespace satsol;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, io_fault = 3, refused = 4, failed = 5 };

enum class Verbosity { quiet, normal, debug };

Verbosity verbosity() {
    const char* v = std::getenv("SATSOL_VERBOSITY");
    if (v == nullptr) {
        return Verbosity::normal;
    }
    const std::string s(v);
    if (s == "quiet" || s == "0") {
        return Verbosity::quiet;
    }
    if (s == "debug" || s == "2") {
        return Verbosity::debug;
    }
    return Verbosity::normal;
}

bool loud() { return verbosity() != Verbosity::quiet; }

void debug(const std::string& msg) {
    if (verbosity() == Verbosity::debug) {
        std::cerr << "[satsol] " << msg << '\n';
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flow options shared by solve and sweep.
struct FlowArgs {
    double spacing = defaults::flow_spacing;
    std::optional<double> step;
    long max_iters = defaults::flow_max_iters;
    double residual_tol = defaults::flow_residual_tol;
    std::vector<double> schedule = defaults::ball_schedule();
    std::string threshold_file;

    void attach(CLI::App* sub) {
        sub->add_option("--spacing", spacing, "radial spacing dr")->check(CLI::PositiveNumber);
        sub->add_option("--step", step, "pseudo-time step (default 0.4 dr^2)");
        sub->add_option("--max-iters", max_iters, "iteration cap per ball");
        sub->add_option("--residual-tol", residual_tol, "EL residual stopping threshold");
        sub->add_option("--schedule", schedule, "ball radii, comma separated")->delimiter(',');
        sub->add_option("--threshold", threshold_file, "reuse a threshold JSON instead of recomputing");
    }

    FlowConfig config() const {
        FlowConfig cfg;
        cfg.with_spacing(spacing);
        if (step) {
            cfg.step = *step;
        }
        cfg.max_iters = max_iters;
        cfg.residual_tol = residual_tol;
        cfg.ball_schedule = schedule;
        cfg.validate();
        return cfg;
    }

    ThresholdEstimate estimate() const {
        if (!threshold_file.empty()) {
            return io::threshold_from_json(io::read_json(threshold_file));
        }
        debug("estimating threshold");
        return estimate_threshold();
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- threshold

struct ThresholdArgs {
    double tol = defaults::townes_tol;
    double radius = defaults::townes_radius;
    std::size_t intervals = defaults::townes_intervals;
    std::vector<double> deltas;
    std::string trial = "townes";
    std::string output;
};

int cmd_threshold(const ThresholdArgs& a) {
    ThresholdOptions opt;
    opt.tol = a.tol;
    opt.radius = a.radius;
    opt.intervals = a.intervals;
    if (!a.deltas.empty()) {
        opt.deltas = a.deltas;
    }
    if (a.trial == "gaussian") {
        opt.trial = TrialFunction::Gaussian;
    }
    const ThresholdEstimate est = estimate_threshold(opt);
    if (!a.output.empty()) {
        io::write_text(a.output, io::to_json(est).dump(2) + "\n");
    }
    if (loud()) {
        std::cout << "townes_mass  " << fmt("%.10f", est.townes_mass) << '\n'
                  << "T0_estimate  " << fmt("%.10f", est.T0_estimate) << '\n'
                  << "bracket      " << fmt("%.3e", est.bracket_width) << "\n\n";
        std::cout << "       delta      quotient\n";
        for (const auto& b : est.upper_bounds) {
            std::cout << fmt("%12.6g", b.delta) << "  " << fmt("%12.8f", b.quotient) << '\n';
        }
    }
    return ok;
}

// ---- solve

struct SolveArgs {
    std::optional<double> gamma;
    std::string output = ".";
    FlowArgs flow;
};

io::json classification_json(double gamma, Classification c, const ThresholdEstimate& est) {
    return io::json{{"gamma", gamma},
                    {"classification", to_string(c)},
                    {"T0_estimate", est.T0_estimate},
                    {"bracket_width", est.bracket_width}};
}

int cmd_solve(const SolveArgs& a) {
    const FlowConfig cfg = a.flow.config();
    const ThresholdEstimate est = a.flow.estimate();
    const double gamma = *a.gamma;
    const Classification cls = classify_gamma(gamma, est);
    const fs::path dir(a.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    io::write_text(dir / "classification.json", classification_json(gamma, cls, est).dump(2) + "\n");
    if (loud()) {
        std::cout << "gamma " << gamma << ": " << to_string(cls) << " (T0 ~ " << fmt("%.6f", est.T0_estimate)
                  << ")\n";
    }
    if (cls != Classification::GroundStateExists) {
        std::cerr << "no ground state: gamma = " << gamma << " is not below -T0 = "
                  << fmt("%.6f", -est.T0_estimate) << " (" << to_string(cls) << ")\n";
        return refused;
    }
    debug("solving ball schedule");
    const GroundState gs = solve_ground_state(gamma, cfg, est);
    io::save_ground_state(gs, dir);
    const DiagnosticsReport rep = verify_ground_state(gs);
    io::write_text(dir / "report.json", io::to_json(rep).dump(2) + "\n");
    if (loud()) {
        std::cout << "lambda " << fmt("%.10f", gs.lambda) << "  mu " << fmt("%.10f", gs.mu) << "  rho(0) "
                  << fmt("%.10f", gs.profile[0]) << "\n\n"
                  << io::render_table(rep);
    }
    return rep.overall() ? ok : failed;
}

// ---- sweep

struct SweepArgs {
    std::vector<double> gammas;
    std::string range;
    std::string output = "sweep.csv";
    FlowArgs flow;
};

// "a:b:n" -> n evenly spaced values from a to b inclusive.
std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw UsageError("--gamma-range expects start:stop:count, got '" + text + "'");
    }
    double a = 0.0;
    double b = 0.0;
    long n = 0;
    try {
        std::size_t used = 0;
        a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::exception&) {
        throw UsageError("--gamma-range: cannot parse '" + text + "'");
    }
    if (n < 1 || !std::isfinite(a) || !std::isfinite(b) || (n == 1 && a != b)) {
        throw UsageError("--gamma-range: need count >= 1 (count 1 only when start == stop)");
    }
    std::vector<double> out;
    for (long k = 0; k < n; ++k) {
        out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return out;
}

int cmd_sweep(const SweepArgs& a) {
    if (a.gammas.empty() == a.range.empty()) {
        throw UsageError("sweep: give exactly one of --gamma or --gamma-range");
    }
    const std::vector<double> gammas = a.range.empty() ? a.gammas : parse_range(a.range);
    const FlowConfig cfg = a.flow.config();
    const ThresholdEstimate est = a.flow.estimate();
    const std::vector<SweepEntry> rows = sweep(gammas, cfg, est);

    std::ostringstream csv;
    csv << "gamma,classification,mu,lambda,decay_rate\n";
    std::size_t failures = 0;
    for (const auto& r : rows) {
        csv << io::num(r.gamma) << ',';
        if (r.state) {
            csv << to_string(r.classification) << ',' << io::num(r.state->mu) << ','
                << io::num(r.state->lambda) << ',' << io::num(r.state->decay_rate) << '\n';
        } else if (!r.error.empty()) {
            ++failures;
            csv << "SolveFailed,nan,nan,nan\n";
            std::cerr << "gamma " << r.gamma << ": " << r.error << '\n';
        } else {
            csv << to_string(r.classification) << ",,,\n";
        }
    }
    io::write_text(a.output, csv.str());
    if (loud()) {
        std::cout << csv.str();
    }
    return failures == rows.size() ? numerical : ok;
}

// ---- verify

struct VerifyArgs {
    std::string state;
    std::string output;
};

int cmd_verify(const VerifyArgs& a) {
    std::vector<double> samples = log_grid<double>();
    samples.push_back(0.0);
    DiagnosticsReport rep;
    rep.merge(inequality_suite(samples), "inequality.");
    rep.merge(polar_invariance_report(random_smooth_profiles(defaults::polar_profiles, defaults::polar_seed)),
              "polar.");
    if (!a.state.empty()) {
        const GroundState gs = io::load_ground_state(a.state);
        rep.merge(verify_ground_state(gs), "ground_state.");
    }
    if (!a.output.empty()) {
        io::write_text(a.output, io::to_json(rep).dump(2) + "\n");
    }
    if (loud()) {
        std::cout << io::render_table(rep);
    }
    return rep.overall() ? ok : failed;
}

// ---- propagate

struct PropagateArgs {
    std::string state;
    double z = defaults::prop_z;
    double dz = defaults::prop_dz;
    double box = defaults::prop_box_half_width;
    std::size_t samples = defaults::prop_samples;
    std::size_t record_every = 10;
    std::string output = ".";
};

int cmd_propagate(const PropagateArgs& a) {
    if (!(a.z > 0.0) || !(a.dz > 0.0) || a.dz > a.z) {
        throw UsageError("propagate: need 0 < dz <= z");
    }
    const GroundState gs = io::load_ground_state(a.state);
    const auto steps = static_cast<std::size_t>(std::llround(a.z / a.dz));
    const Field2D f0 = embed_radial(gs.profile, a.box, a.samples);
    EvolveOptions opt;
    opt.record_every = a.record_every;
    debug("propagating " + std::to_string(steps) + " steps");
    const PropagationResult res = split_step_evolve(f0, gs.gamma, a.dz, steps, opt);
    const DiagnosticsReport rep = stationarity_report(gs, res.trace);
    const fs::path dir(a.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    io::write_propagation_csv(res.trace, dir / "trace.csv");
    io::write_text(dir / "stationarity.json", io::to_json(rep).dump(2) + "\n");
    if (loud()) {
        std::cout << io::render_table(rep);
    }
    return rep.overall() ? ok : failed;
}

// ---- config file

// Splices "--key value" pairs from the JSON config in front of the user's own
// arguments for the subcommand, so that later (user) values win.
std::vector<std::string> with_config(std::vector<std::string> args, const std::vector<std::string>& commands) {
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    const io::json j = io::read_json(path);
    if (!j.is_object()) {
        throw UsageError("config " + path + ": expected a JSON object");
    }
    std::size_t at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (std::find(commands.begin(), commands.end(), args[i]) != commands.end()) {
            at = i + 1;
            break;
        }
    }
    std::vector<std::string> extra;
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                extra.push_back(flag);
            }
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            }
            extra.push_back(flag);
            extra.push_back(joined);
        } else {
            extra.push_back(flag);
            extra.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    args.insert(args.begin() + static_cast<long>(at), extra.begin(), extra.end());
    return args;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return io_fault;
    }
    if (dynamic_cast<const DomainError*>(&e) != nullptr || dynamic_cast<const ResourceError*>(&e) != nullptr) {
        return refused;
    }
    if (dynamic_cast<const NumericalFailure*>(&e) != nullptr) {
        return numerical;
    }
    if (dynamic_cast<const InvalidArgument*>(&e) != nullptr || dynamic_cast<const UsageError*>(&e) != nullptr) {
        return usage;
    }
    return numerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground states of the saturable 2D counterpropagating model"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "JSON file with option values (flags win)");

    ThresholdArgs th;
    auto* c_th = app.add_subcommand("threshold", "estimate the existence threshold T0");
    c_th->add_option("--tol", th.tol, "Townes shooting tolerance");
    c_th->add_option("--radius", th.radius, "Townes grid radius");
    c_th->add_option("--intervals", th.intervals, "Townes grid intervals");
    c_th->add_option("--deltas", th.deltas, "trial dilations, comma separated")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    c_th->add_option("--trial", th.trial, "trial family")->check(CLI::IsMember({"townes", "gaussian"}));
    c_th->add_option("-o,--output", th.output, "write the estimate as JSON");

    SolveArgs so;
    auto* c_so = app.add_subcommand("solve", "classify and solve one coupling");
    c_so->add_option("--gamma", so.gamma, "coupling constant")->required();
    c_so->add_option("-o,--output", so.output, "output directory");
    so.flow.attach(c_so);

    SweepArgs sw;
    auto* c_sw = app.add_subcommand("sweep", "classify and solve a list of couplings");
    c_sw->add_option("--gamma", sw.gammas, "couplings, comma separated")
        ->delimiter(',')
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    c_sw->add_option("--gamma-range", sw.range, "start:stop:count");
    c_sw->add_option("-o,--output", sw.output, "CSV output path");
    sw.flow.attach(c_sw);

    VerifyArgs ve;
    auto* c_ve = app.add_subcommand("verify", "run the inequality, polar and (optionally) ground-state checks");
    c_ve->add_option("--state", ve.state, "state.json to verify");
    c_ve->add_option("-o,--output", ve.output, "write the report as JSON");

    PropagateArgs pr;
    auto* c_pr = app.add_subcommand("propagate", "evolve a stored ground state with split-step Fourier");
    c_pr->add_option("--state", pr.state, "state.json to propagate")->required();
    c_pr->add_option("--z", pr.z, "propagation distance");
    c_pr->add_option("--dz", pr.dz, "step size");
    c_pr->add_option("--box", pr.box, "box half width L");
    c_pr->add_option("--samples", pr.samples, "samples per axis (power of two)");
    c_pr->add_option("--record-every", pr.record_every, "trace stride in steps")->check(CLI::PositiveNumber);
    c_pr->add_option("-o,--output", pr.output, "output directory");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = with_config(std::move(args), {"threshold", "solve", "sweep", "verify", "propagate"});
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    try {
        if (c_th->parsed()) {
            return cmd_threshold(th);
        }
        if (c_so->parsed()) {
            return cmd_solve(so);
        }
        if (c_sw->parsed()) {
            return cmd_sweep(sw);
        }
        if (c_ve->parsed()) {
            return cmd_verify(ve);
        }
        return cmd_propagate(pr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
