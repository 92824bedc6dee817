#pragma once

// File formats: profile CSV (`r,value`), flow trace CSV (`iter,energy,sup_rho`),
// propagation trace CSV (`z,power,center_phase,profile_error`) and JSON for the
// ground state, threshold estimate and diagnostics reports.
// Numbers are written with 17 significant digits so files round-trip exactly.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "satsol/diagnostics.hpp"
#include "satsol/error.hpp"
#include "satsol/functionals.hpp"
#include "satsol/groundstate.hpp"
#include "satsol/propagator.hpp"
#include "satsol/radial.hpp"
#include "satsol/threshold.hpp"

namespace satsol::io {

using json = nlohmann::ordered_json;

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

// JSON has no inf/nan; keep them readable as strings.
inline json number_or_string(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline double read_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw IoError(std::string("state file: missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

} // namespace detail

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = detail::open_out(path);
    out << text;
    detail::finish(out, path);
}

inline void write_profile_csv(const RadialProfile& rho, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "r,value\n";
    for (std::size_t j = 0; j < rho.size(); ++j) {
        out << num(rho.grid().node(j)) << ',' << num(rho[j]) << '\n';
    }
    detail::finish(out, path);
}

/// Reads a `r,value` CSV back onto a uniform grid starting at r = 0.
inline RadialProfile read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open profile " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,value", 0) != 0) {
        throw IoError("profile " + path.string() + ": expected header 'r,value'");
    }
    std::vector<double> r;
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError("profile " + path.string() + ": malformed row '" + line + "'");
        }
        try {
            std::size_t used = 0;
            r.push_back(std::stod(line.substr(0, comma), &used));
            v.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("profile " + path.string() + ": malformed row '" + line + "'");
        }
    }
    if (r.size() < RadialGrid::min_intervals + 1 || r.front() != 0.0) {
        throw IoError("profile " + path.string() + ": too few rows or first radius not 0");
    }
    const std::size_t n = r.size() - 1;
    try {
        const RadialGrid grid(r.back(), n);
        for (std::size_t j = 0; j <= n; ++j) {
            if (std::abs(r[j] - grid.node(j)) > 1e-9 * grid.radius()) {
                throw IoError("profile " + path.string() + ": radii are not uniformly spaced");
            }
        }
        return RadialProfile(grid, std::move(v));
    } catch (const InvalidArgument& e) {
        throw IoError("profile " + path.string() + ": " + e.what());
    }
}

inline void write_flow_trace_csv(const FlowTrace& trace, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "iter,energy,sup_rho\n";
    for (const auto& t : trace) {
        out << t.iter << ',' << num(t.energy) << ',' << num(t.sup_rho) << '\n';
    }
    detail::finish(out, path);
}

inline void write_propagation_csv(const PropagationTrace& t, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "z,power,center_phase,profile_error\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        out << num(t.z[k]) << ',' << num(t.power[k]) << ',' << num(t.center_phase[k]) << ','
            << num(t.profile_error[k]) << '\n';
    }
    detail::finish(out, path);
}

inline json to_json(const FunctionalReport& r) {
    return json{{"energy_H", r.energy_H},          {"power_P", r.power_P},
                {"kinetic", r.kinetic},            {"potential", r.potential},
                {"lambda_pz2", r.lambda_pz2},      {"lambda_pz1", r.lambda_pz1},
                {"pohozaev_residual", r.pohozaev_residual}};
}

inline json to_json(const ThresholdEstimate& e) {
    json bounds = json::array();
    for (const auto& b : e.upper_bounds) {
        bounds.push_back(json::array({b.delta, b.quotient}));
    }
    return json{{"townes_mass", e.townes_mass},
                {"T0_estimate", e.T0_estimate},
                {"upper_bounds", std::move(bounds)},
                {"bracket_width", e.bracket_width}};
}

inline ThresholdEstimate threshold_from_json(const json& j) {
    try {
        ThresholdEstimate e;
        e.townes_mass = j.at("townes_mass").get<double>();
        e.T0_estimate = j.at("T0_estimate").get<double>();
        e.bracket_width = j.at("bracket_width").get<double>();
        for (const auto& b : j.at("upper_bounds")) {
            e.upper_bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
        }
        return e;
    } catch (const json::exception& ex) {
        throw IoError(std::string("threshold file: ") + ex.what());
    }
}

inline json to_json(const DiagnosticsReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks()) {
        checks.push_back(json{{"name", c.name},
                              {"passed", c.passed},
                              {"measured", detail::number_or_string(c.measured)},
                              {"tolerance", c.tolerance}});
    }
    return json{{"checks", std::move(checks)}, {"overall", rep.overall()}};
}

/// Fixed-width table of a report, one row per check.
inline std::string render_table(const DiagnosticsReport& rep) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s %-6s %14s %12s\n", "check", "result", "measured", "tolerance");
    os << buf;
    for (const auto& c : rep.checks()) {
        std::snprintf(buf, sizeof buf, "%-28s %-6s %14.6e %12.3e\n", c.name.c_str(),
                      c.passed ? "PASS" : "FAIL", c.measured, c.tolerance);
        os << buf;
    }
    os << "overall: " << (rep.overall() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

inline json to_json(const GroundState& gs, const std::string& profile_ref) {
    json balls = json::array();
    for (const auto& [r, mu] : gs.ball_energies) {
        balls.push_back(json::array({r, mu}));
    }
    return json{{"gamma", gs.gamma},
                {"lambda", gs.lambda},
                {"mu", gs.mu},
                {"el_residual", gs.el_residual},
                {"pohozaev", gs.pohozaev},
                {"lambda_pz1", gs.lambda_pz1},
                {"decay_rate", gs.decay_rate},
                {"phase", gs.phase},
                {"radius", gs.profile.grid().radius()},
                {"intervals", gs.profile.grid().intervals()},
                {"ball_energies", std::move(balls)},
                {"profile", profile_ref}};
}

/// Writes <dir>/state.json and the profile CSV it references (<dir>/profile.csv).
inline void save_ground_state(const GroundState& gs, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    write_profile_csv(gs.profile, dir / "profile.csv");
    write_text(dir / "state.json", to_json(gs, "profile.csv").dump(2) + "\n");
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw IoError("cannot parse " + path.string() + ": " + ex.what());
    }
}

/// Loads a state file; the profile path is resolved relative to the JSON file.
inline GroundState load_ground_state(const std::filesystem::path& path) {
    const json j = read_json(path);
    if (!j.is_object() || !j.contains("profile") || !j.at("profile").is_string()) {
        throw IoError("state file " + path.string() + ": missing profile reference");
    }
    RadialProfile rho = read_profile_csv(path.parent_path() / j.at("profile").get<std::string>());
    std::vector<std::pair<double, double>> balls;
    if (j.contains("ball_energies")) {
        try {
            for (const auto& b : j.at("ball_energies")) {
                balls.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
            }
        } catch (const json::exception& ex) {
            throw IoError("state file " + path.string() + ": bad ball_energies: " + ex.what());
        }
    }
    return GroundState{detail::read_number(j, "gamma"),
                       std::move(rho),
                       detail::read_number(j, "lambda"),
                       detail::read_number(j, "mu"),
                       detail::read_number(j, "el_residual"),
                       detail::read_number(j, "pohozaev"),
                       detail::read_number(j, "lambda_pz1"),
                       std::move(balls),
                       detail::read_number(j, "decay_rate"),
                       j.contains("phase") ? detail::read_number(j, "phase") : 0.0};
}

} // namespace satsol::io
