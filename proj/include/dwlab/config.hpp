#pragma once

// Run configuration for the command-line front end, stored as one JSON
// document. Maps and complex numbers are written in the map grammar, so a
// config emitted by to_json() reparses to an equal RunConfig.
//
//   {
//     "command": "simulate",
//     "seed": 42, "max_n": 1000, "tol": 1e-8, "window": 50, "grid": 25,
//     "out": "dwlab-out",
//     "sequence": {
//       "side": "left",
//       "schedule": {"family": "perturbed", "base": "affine(0.5+0i,0+0i)",
//                    "kind": "additive", "amplitude": 1,
//                    "law": {"kind": "power", "exponent": 2, "shift": 2}},
//       "normalization": {"kind": "none"}
//     },
//     "region": {"center": "0+0i", "radius": 1}
//   }

#include <dwlab/errors.hpp>
#include <dwlab/grammar.hpp>
#include <dwlab/holomap.hpp>
#include <dwlab/sequence.hpp>

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dwlab {

using json = nlohmann::ordered_json;

struct SequenceConfig {
    Side side = Side::left;
    ScheduleSpec schedule = schedule::Constant{Identity{}};
    Normalization::Kind normalization = Normalization::Kind::none;
    HoloMap normalization_base = Identity{};
    std::size_t offset = 0;

    friend bool operator==(const SequenceConfig&, const SequenceConfig&) = default;
};

struct SweepConfig {
    std::string parameter;  // amplitude | delta | scale | seed
    std::vector<double> values;

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct RunConfig {
    std::string command = "simulate";
    std::uint64_t seed = 42;
    std::size_t max_n = 1000;
    double tol = 1e-8;
    std::size_t window = 50;
    std::size_t grid = 25;
    std::optional<double> nonconst_threshold;
    std::size_t csv_stride = 1;
    std::string out = "dwlab-out";

    std::optional<HoloMap> map;            // classify
    std::string scenario = "all";          // verify
    std::optional<std::size_t> trials;     // verify
    std::optional<SequenceConfig> sequence;
    std::vector<cplx> points;              // explicit sample points; otherwise a grid on the region
    cplx region_center{0.0};
    double region_radius = 1.0;
    std::optional<SweepConfig> sweep;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Knobs must be positive; throws std::invalid_argument naming the first offender.
inline void validate(const RunConfig& c) {
    static const std::vector<std::string> commands{"classify", "simulate", "verify", "sweep"};
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
        throw std::invalid_argument("unknown command '" + c.command + "'");
    if (c.max_n < 1) throw std::invalid_argument("max_n must be positive");
    if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (c.window < 1) throw std::invalid_argument("window must be positive");
    if (c.grid < 2) throw std::invalid_argument("grid must be at least 2");
    if (c.csv_stride < 1) throw std::invalid_argument("csv_stride must be positive");
    if (c.nonconst_threshold && !(*c.nonconst_threshold > 0.0))
        throw std::invalid_argument("nonconst_threshold must be positive");
    if (!(c.region_radius > 0.0)) throw std::invalid_argument("region radius must be positive");
    if (c.trials && *c.trials < 1) throw std::invalid_argument("trials must be positive");
}

namespace detail {

inline const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'", 0);
    return j.at(key);
}

inline HoloMap map_field(const json& j, const char* key) { return parse_map(require(j, key).get<std::string>()); }

inline cplx complex_field(const json& j, const char* key) { return parse_complex(require(j, key).get<std::string>()); }

inline json law_to_json(const WeightLaw& w) {
    json j;
    j["kind"] = w.kind == WeightLaw::Kind::power ? "power" : "geometric";
    j["exponent"] = w.exponent;
    j["shift"] = w.shift;
    j["ratio"] = w.ratio;
    j["alternating"] = w.alternating;
    return j;
}

inline WeightLaw law_from_json(const json& j) {
    WeightLaw w;
    const auto kind = j.value("kind", std::string("geometric"));
    if (kind == "power") w.kind = WeightLaw::Kind::power;
    else if (kind == "geometric") w.kind = WeightLaw::Kind::geometric;
    else throw ParseError("unknown weight law '" + kind + "'", 0);
    w.exponent = j.value("exponent", 1.0);
    w.shift = j.value("shift", 0.0);
    w.ratio = j.value("ratio", 0.5);
    w.alternating = j.value("alternating", false);
    return w;
}

inline schedule::Perturbed::Kind perturbation_kind(const std::string& s) {
    using K = schedule::Perturbed::Kind;
    if (s == "additive") return K::additive;
    if (s == "rotation") return K::rotation;
    if (s == "scale") return K::scale;
    if (s == "blaschke") return K::blaschke;
    throw ParseError("unknown perturbation kind '" + s + "'", 0);
}

inline const char* normalization_name(Normalization::Kind k) {
    switch (k) {
        case Normalization::Kind::none: return "none";
        case Normalization::Kind::conjugate_left: return "conjugate_left";
        case Normalization::Kind::conjugate_right: return "conjugate_right";
    }
    return "none";
}

}  // namespace detail

// The random family's seed is not stored: it always follows the run seed.
inline json schedule_to_json(const ScheduleSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            json j;
            if constexpr (std::is_same_v<T, schedule::Constant>) {
                j["family"] = "constant";
                j["map"] = print(s.map);
            } else if constexpr (std::is_same_v<T, schedule::List>) {
                j["family"] = "list";
                json maps = json::array();
                for (const auto& m : s.maps) maps.push_back(print(m));
                j["maps"] = maps;
                j["tail"] = print(s.tail);
            } else if constexpr (std::is_same_v<T, schedule::Perturbed>) {
                j["family"] = "perturbed";
                j["base"] = print(s.base);
                j["kind"] = perturbation_name(s.kind);
                j["amplitude"] = s.amplitude;
                j["law"] = detail::law_to_json(s.law);
            } else if constexpr (std::is_same_v<T, schedule::RandomAffine>) {
                j["family"] = "random_affine";
                j["slope"] = print_complex(s.slope);
                j["offset"] = print_complex(s.offset);
                j["scale"] = s.scale;
            } else {
                j["family"] = "oscillating_blocks";
                j["delta"] = s.delta;
            }
            return j;
        },
        spec);
}

inline ScheduleSpec schedule_from_json(const json& j, std::uint64_t seed) {
    const auto family = detail::require(j, "family").get<std::string>();
    if (family == "constant") return schedule::Constant{detail::map_field(j, "map")};
    if (family == "list") {
        schedule::List l;
        for (const auto& m : detail::require(j, "maps")) l.maps.push_back(parse_map(m.get<std::string>()));
        l.tail = detail::map_field(j, "tail");
        return l;
    }
    if (family == "perturbed") {
        schedule::Perturbed p;
        p.base = detail::map_field(j, "base");
        p.kind = detail::perturbation_kind(detail::require(j, "kind").get<std::string>());
        p.amplitude = j.value("amplitude", 1.0);
        p.law = j.contains("law") ? detail::law_from_json(j.at("law")) : WeightLaw{};
        return p;
    }
    if (family == "random_affine") {
        schedule::RandomAffine r;
        r.slope = detail::complex_field(j, "slope");
        r.offset = j.contains("offset") ? detail::complex_field(j, "offset") : cplx(0.0);
        r.scale = j.value("scale", 0.05);
        r.seed = seed;
        return r;
    }
    if (family == "oscillating_blocks") return schedule::OscillatingBlocks{j.value("delta", 0.1)};
    throw ParseError("unknown schedule family '" + family + "'", 0);
}

inline json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["seed"] = c.seed;
    j["max_n"] = c.max_n;
    j["tol"] = c.tol;
    j["window"] = c.window;
    j["grid"] = c.grid;
    if (c.nonconst_threshold) j["nonconst_threshold"] = *c.nonconst_threshold;
    j["csv_stride"] = c.csv_stride;
    j["out"] = c.out;
    if (c.map) j["map"] = print(*c.map);
    j["scenario"] = c.scenario;
    if (c.trials) j["trials"] = *c.trials;
    if (c.sequence) {
        json s;
        s["side"] = to_string(c.sequence->side);
        s["schedule"] = schedule_to_json(c.sequence->schedule);
        json n;
        n["kind"] = detail::normalization_name(c.sequence->normalization);
        if (c.sequence->normalization != Normalization::Kind::none) n["base"] = print(c.sequence->normalization_base);
        s["normalization"] = n;
        s["offset"] = c.sequence->offset;
        j["sequence"] = s;
    }
    if (!c.points.empty()) {
        json pts = json::array();
        for (cplx z : c.points) pts.push_back(print_complex(z));
        j["points"] = pts;
    }
    j["region"] = {{"center", print_complex(c.region_center)}, {"radius", c.region_radius}};
    if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
    return j;
}

/// Parse a config document; throws ParseError on malformed content and
/// std::invalid_argument on out-of-range knobs.
inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        c.seed = j.value("seed", c.seed);
        c.max_n = j.value("max_n", c.max_n);
        c.tol = j.value("tol", c.tol);
        c.window = j.value("window", c.window);
        c.grid = j.value("grid", c.grid);
        if (j.contains("nonconst_threshold")) c.nonconst_threshold = j.at("nonconst_threshold").get<double>();
        c.csv_stride = j.value("csv_stride", c.csv_stride);
        c.out = j.value("out", c.out);
        if (j.contains("map")) c.map = detail::map_field(j, "map");
        c.scenario = j.value("scenario", c.scenario);
        if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
        if (j.contains("sequence")) {
            const json& s = j.at("sequence");
            SequenceConfig sc;
            const auto side = s.value("side", std::string("left"));
            if (side != "left" && side != "right") throw ParseError("side must be left or right", 0);
            sc.side = side == "left" ? Side::left : Side::right;
            sc.schedule = schedule_from_json(detail::require(s, "schedule"), c.seed);
            if (s.contains("normalization")) {
                const json& n = s.at("normalization");
                const auto kind = n.value("kind", std::string("none"));
                if (kind == "none") sc.normalization = Normalization::Kind::none;
                else if (kind == "conjugate_left") sc.normalization = Normalization::Kind::conjugate_left;
                else if (kind == "conjugate_right") sc.normalization = Normalization::Kind::conjugate_right;
                else throw ParseError("unknown normalization '" + kind + "'", 0);
                if (sc.normalization != Normalization::Kind::none) sc.normalization_base = detail::map_field(n, "base");
            }
            sc.offset = s.value("offset", std::size_t{0});
            c.sequence = sc;
        }
        if (j.contains("points"))
            for (const auto& p : j.at("points")) c.points.push_back(parse_complex(p.get<std::string>()));
        if (j.contains("region")) {
            const json& r = j.at("region");
            if (r.contains("center")) c.region_center = detail::complex_field(r, "center");
            c.region_radius = r.value("radius", c.region_radius);
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            c.sweep = SweepConfig{detail::require(s, "parameter").get<std::string>(),
                                  s.value("values", std::vector<double>{})};
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what(), 0);
    }
    validate(c);
    return c;
}

inline RunConfig config_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), e.byte);
    }
    return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_string(ss.str());
}

/// Build the runnable sequence spec (schedule, normalization, length).
inline SequenceSpec make_sequence_spec(const RunConfig& c) {
    if (!c.sequence) throw std::invalid_argument("config has no sequence section");
    const auto& s = *c.sequence;
    ScheduleSpec spec = s.schedule;
    if (auto* r = std::get_if<schedule::RandomAffine>(&spec)) r->seed = c.seed;
    Normalization norm{s.normalization, s.normalization_base};
    return SequenceSpec{s.side, Schedule(std::move(spec)), std::move(norm), c.max_n, s.offset};
}

}  // namespace dwlab
