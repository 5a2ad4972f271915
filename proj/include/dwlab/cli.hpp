#pragma once

// dwlab classify | simulate | verify | sweep
//
// Exit codes: 0 success / convergent, 1 failed scenario or other error,
// 2 parse or usage error, 3 inconclusive classification, 4 divergent,
// 5 inconclusive verdict, 6 a map sent a point outside its model.

#include <dwlab/classify.hpp>
#include <dwlab/config.hpp>
#include <dwlab/grammar.hpp>
#include <dwlab/io.hpp>
#include <dwlab/sequence.hpp>
#include <dwlab/verify.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace dwlab::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kParseError = 2,
    kInconclusiveClass = 3,
    kDivergent = 4,
    kInconclusive = 5,
    kEscape = 6,
};

inline int exit_code(Verdict v) {
    switch (v) {
        case Verdict::constant_limit:
        case Verdict::nonconstant_limit: return kOk;
        case Verdict::divergent: return kDivergent;
        case Verdict::inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

/// Command-line overrides applied on top of a config file.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_n;
    std::optional<double> tol;
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
};

inline RunConfig resolve_config(const std::string& command, const Overrides& o) {
    RunConfig c;
    if (o.config) c = load_config(*o.config);
    c.command = command;
    if (o.seed) {
        c.seed = *o.seed;
        if (c.sequence)
            if (auto* r = std::get_if<schedule::RandomAffine>(&c.sequence->schedule)) r->seed = c.seed;
    }
    if (o.max_n) c.max_n = *o.max_n;
    if (o.tol) c.tol = *o.tol;
    if (o.out) c.out = *o.out;
    if (o.trials) c.trials = *o.trials;
    validate(c);
    return c;
}

/// Sample points of a run: the explicit list, or a hyperbolic-disc grid
/// (mapped into the half-plane when the sequence acts there).
inline std::vector<cplx> sample_points(const RunConfig& c, Model model) {
    if (!c.points.empty()) return c.points;
    std::vector<cplx> out;
    const HyperbolicDisc region(DiscPoint(c.region_center), c.region_radius);
    for (const auto& p : sample_hyp_disc(region, c.grid, c.seed))
        out.push_back(model == Model::disc ? p.value() : cayley_to_halfplane_raw(p.value()));
    return out;
}

inline DetectorSettings detector_settings(const RunConfig& c) {
    return DetectorSettings{c.tol, c.window, c.nonconst_threshold.value_or(1e-3)};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
}

// ---------------------------------------------------------------------------

inline int cmd_classify(const HoloMap& m, std::ostream& out) {
    const MapClass cls = classify(m);
    out << "class: " << class_name(cls) << '\n';
    out << "model: " << to_string(model_or_disc(m)) << '\n';
    if (auto mm = as_mobius(m)) {
        const Mobius disc = to_disc_model(*mm);
        out << "fixed_points (disc):";
        const auto fixed = mobius_fixed_points(disc);
        if (fixed.empty()) out << " infinity only";
        for (cplx z : fixed) out << ' ' << print_complex(z);
        out << '\n';
    }
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, mapclass::Identity>) {
                out << "denjoy_wolff: none (identity)\n";
            } else if constexpr (std::is_same_v<T, mapclass::EllipticFiniteOrder>) {
                out << "fixed_point: " << print_complex(c.fixed_point) << "\nrotation_angle: " << detail::g17(c.angle)
                    << "\norder: " << c.order << "\ndenjoy_wolff: none (elliptic)\n";
            } else if constexpr (std::is_same_v<T, mapclass::EllipticInfiniteOrder>) {
                out << "fixed_point: " << print_complex(c.fixed_point) << "\nrotation_angle: " << detail::g17(c.angle)
                    << "\norder: infinite\ndenjoy_wolff: none (elliptic)\n";
            } else if constexpr (std::is_same_v<T, mapclass::InteriorDW>) {
                out << "denjoy_wolff: " << print_complex(c.zeta.value()) << " (interior)\n";
                if (!std::isnan(c.multiplier)) out << "multiplier: " << detail::g17(c.multiplier) << '\n';
            } else {
                out << "denjoy_wolff: " << print_complex(c.zeta) << " (boundary)\n";
            }
        },
        cls);
    return kOk;
}

/// Run one configured sequence; returns (report, trajectories).
inline std::pair<ConvergenceReport, Trajectories> simulate(const RunConfig& c) {
    SequenceSpec spec = make_sequence_spec(c);
    const Model model = detail::sequence_model(spec);
    const auto traj = run(spec, sample_points(c, model));
    return {detect_convergence(traj, detector_settings(c)), traj};
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
    const auto [report, traj] = simulate(c);
    const std::filesystem::path dir(c.out);
    json header;
    header["config"] = to_json(c);
    header["model"] = to_string(traj.model);
    header["points"] = traj.points();
    header["steps"] = traj.steps();
    header["csv_stride"] = c.csv_stride;
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, header, c.csv_stride);
    write_file(dir / "trajectory.csv", csv.str());
    write_file(dir / "report.json", to_json(report).dump(2) + "\n");
    write_file(dir / "config.json", to_json(c).dump(2) + "\n");

    out << "verdict: " << to_string(report.verdict) << '\n';
    if (report.limit_point_disc) out << "limit (disc): " << print_complex(*report.limit_point_disc) << '\n';
    if (report.limit_point) out << "limit: " << print_complex(*report.limit_point) << '\n';
    if (!report.witness.empty()) out << "witness: " << report.witness << '\n';
    out << "wrote " << (dir / "trajectory.csv").string() << ", " << (dir / "report.json").string() << '\n';
    return exit_code(report.verdict);
}

/// JSON goes to `out` (and to <out>/verify.json when `write_out`), the summary table to `table`.
inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& table, bool write_out = false) {
    std::vector<std::string> ids;
    if (c.scenario == "all") ids = scenario_ids();
    else if (is_scenario(c.scenario)) ids = {c.scenario};
    else throw std::invalid_argument("unknown scenario '" + c.scenario + "'");

    ScenarioOptions opt;
    opt.seed = c.seed;
    opt.trials = c.trials;
    const auto results = run_scenarios(ids, opt);

    json doc;
    doc["seed"] = c.seed;
    bool all_pass = true;
    json arr = json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        arr.push_back(to_json(r));
    }
    doc["pass"] = all_pass;
    doc["results"] = arr;
    const std::string text = doc.dump(2) + "\n";
    out << text;
    if (write_out) write_file(std::filesystem::path(c.out) / "verify.json", text);

    char line[160];
    std::snprintf(line, sizeof line, "%-12s %-6s %s\n", "scenario", "result", "checks");
    table << line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-12s %-6s %zu\n", r.id.c_str(), r.pass ? "pass" : "FAIL", r.bounds.size());
        table << line;
    }
    return all_pass ? kOk : kFailure;
}

struct SweepRow {
    double parameter;
    std::string verdict;
    std::optional<cplx> limit;
    double deviation_sum;
};

inline RunConfig with_parameter(RunConfig c, const std::string& parameter, double v) {
    if (parameter == "seed") {
        if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument("seed values must be nonnegative integers");
        c.seed = static_cast<std::uint64_t>(v);
        return c;
    }
    if (!c.sequence) throw std::invalid_argument("sweep needs a sequence section");
    auto& s = c.sequence->schedule;
    if (parameter == "amplitude") {
        auto* p = std::get_if<schedule::Perturbed>(&s);
        if (!p) throw std::invalid_argument("amplitude sweeps need a perturbed schedule");
        p->amplitude = v;
    } else if (parameter == "delta") {
        auto* p = std::get_if<schedule::OscillatingBlocks>(&s);
        if (!p) throw std::invalid_argument("delta sweeps need an oscillating_blocks schedule");
        p->delta = v;
    } else if (parameter == "scale") {
        auto* p = std::get_if<schedule::RandomAffine>(&s);
        if (!p) throw std::invalid_argument("scale sweeps need a random_affine schedule");
        p->scale = v;
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
    }
    return c;
}

inline SweepRow sweep_point(const RunConfig& base, const std::string& parameter, double v) {
    SweepRow row{v, "", std::nullopt, 0.0};
    try {
        const RunConfig c = with_parameter(base, parameter, v);
        const auto [report, traj] = simulate(c);
        row.verdict = to_string(report.verdict);
        row.limit = report.limit_point_disc;
        const SequenceSpec spec = make_sequence_spec(c);
        row.deviation_sum =
            deviation_series_at(spec.schedule, spec.schedule.base(), traj.inputs, c.max_n, spec.offset).partial.back();
    } catch (const NotSelfMapError&) {
        row.verdict = "escape";
    } catch (const Error&) {
        row.verdict = "invalid";
    }
    return row;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
    if (!c.sweep) throw std::invalid_argument("config has no sweep section");
    with_parameter(c, c.sweep->parameter, c.sweep->values.empty() ? 0.0 : c.sweep->values.front());
    std::vector<std::future<SweepRow>> jobs;
    for (double v : c.sweep->values)
        jobs.push_back(std::async(std::launch::async, [&c, v] { return sweep_point(c, c.sweep->parameter, v); }));
    std::ostringstream csv;
    csv << "parameter,verdict,limit,deviation_sum\n";
    for (auto& j : jobs) {
        const SweepRow r = j.get();
        csv << detail::g17(r.parameter) << ',' << r.verdict << ',' << (r.limit ? print_complex(*r.limit) : "") << ','
            << detail::g17(r.deviation_sum) << '\n';
    }
    write_file(std::filesystem::path(c.out) / "sweep.csv", csv.str());
    out << csv.str();
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Composition sequences of holomorphic self-maps and Denjoy-Wolff stability checks", "dwlab"};
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--seed", o.seed, "seed for every random sub-stream (default 42)");
        sub->add_option("--max-n", o.max_n, "number of sequence terms");
        sub->add_option("--tol", o.tol, "convergence tolerance");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--trials", o.trials, "Monte-Carlo trials (verify)");
    };

    std::string map_text;
    auto* classify_cmd = app.add_subcommand("classify", "classify a map and report its Denjoy-Wolff point");
    classify_cmd->add_option("map", map_text, "map expression, e.g. \"mobius(3,1,1,3)\"");
    add_common(classify_cmd);

    auto* simulate_cmd = app.add_subcommand("simulate", "run a configured sequence, write trajectory CSV and report");
    add_common(simulate_cmd);

    std::string scenario;
    auto* verify_cmd = app.add_subcommand("verify", "run stability scenarios (an id or \"all\")");
    verify_cmd->add_option("scenario", scenario, "scenario id or all");
    add_common(verify_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a configured sequence over a parameter grid");
    add_common(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (*classify_cmd) {
            RunConfig c = resolve_config("classify", o);
            if (!map_text.empty()) c.map = parse_map(map_text);
            if (!c.map) throw std::invalid_argument("classify needs a map expression or a config with \"map\"");
            return cmd_classify(*c.map, out);
        }
        if (*simulate_cmd) return cmd_simulate(resolve_config("simulate", o), out);
        if (*verify_cmd) {
            RunConfig c = resolve_config("verify", o);
            if (!scenario.empty()) c.scenario = scenario;
            return cmd_verify(c, out, err, o.out.has_value());
        }
        if (*sweep_cmd) return cmd_sweep(resolve_config("sweep", o), out);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const InconclusiveError& e) {
        err << "inconclusive: " << e.what() << '\n';
        return kInconclusiveClass;
    } catch (const NotSelfMapError& e) {
        err << "self-map escape: " << e.what() << " (input " << print_complex(e.input) << ", step " << e.step << ")\n";
        return kEscape;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace dwlab::cli
