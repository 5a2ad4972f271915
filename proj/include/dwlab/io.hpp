#pragma once

// Plot-ready output: trajectory CSV with a '#'-prefixed JSON header block,
// and JSON forms of convergence reports and scenario results.

#include <dwlab/config.hpp>
#include <dwlab/grammar.hpp>
#include <dwlab/sequence.hpp>
#include <dwlab/verify.hpp>

#include <json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace dwlab {

namespace detail {

inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

/// Header lines are "# " followed by the pretty-printed `header`; then the
/// column line `n,point_index,re,im` and one row per (n, point). Rows are
/// emitted for n = 0, stride, 2 stride, ... and always for the last step.
inline void write_trajectory_csv(std::ostream& out, const Trajectories& t, const json& header, std::size_t stride = 1) {
    std::istringstream lines(header.dump(2));
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
    out << "n,point_index,re,im\n";
    const std::size_t N = t.steps();
    for (std::size_t n = 0; n <= N; ++n) {
        if (n % stride != 0 && n != N) continue;
        for (std::size_t i = 0; i < t.points(); ++i) {
            const cplx z = t.values[n][i];
            out << n << ',' << i << ',' << detail::g17(z.real()) << ',' << detail::g17(z.imag()) << '\n';
        }
    }
}

struct TrajectoryCsv {
    json header;
    std::vector<std::size_t> n;
    std::vector<std::size_t> point_index;
    std::vector<cplx> value;
};

inline TrajectoryCsv read_trajectory_csv(std::istream& in) {
    TrajectoryCsv out;
    std::string header_text, line;
    bool columns_seen = false;
    while (std::getline(in, line)) {
        if (!columns_seen && line.rfind("# ", 0) == 0) {
            header_text += line.substr(2) + '\n';
            continue;
        }
        if (!columns_seen) {
            if (line != "n,point_index,re,im") throw ParseError("unexpected CSV column line '" + line + "'", 0);
            columns_seen = true;
            continue;
        }
        if (line.empty()) continue;
        std::size_t n = 0, i = 0;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &n, &i, &re, &im) != 4)
            throw ParseError("malformed CSV row '" + line + "'", 0);
        out.n.push_back(n);
        out.point_index.push_back(i);
        out.value.emplace_back(re, im);
    }
    out.header = header_text.empty() ? json::object() : json::parse(header_text);
    return out;
}

inline json to_json(const ConvergenceReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["model"] = to_string(r.model);
    j["limit_point"] = r.limit_point ? json(print_complex(*r.limit_point)) : json(nullptr);
    j["limit_point_disc"] = r.limit_point_disc ? json(print_complex(*r.limit_point_disc)) : json(nullptr);
    json grid = json::array();
    for (const auto& [z, w] : r.limit_grid) grid.push_back({{"point", print_complex(z)}, {"limit", print_complex(w)}});
    j["limit_grid"] = grid;
    json wit = json::array();
    for (cplx w : r.witnesses) wit.push_back(print_complex(w));
    j["witnesses"] = wit;
    j["witness"] = r.witness;
    j["criteria"] = {{"tol", r.tol},
                     {"window", r.window},
                     {"nonconst_threshold", r.nonconst_threshold},
                     {"grid", r.grid},
                     {"steps", r.steps},
                     {"metric", "euclidean (constant), hyperbolic (non-constant)"}};
    j["deviation_series"] = r.deviation_series;
    return j;
}

inline json to_json(const ScenarioResult& r) {
    json j;
    j["id"] = r.id;
    j["pass"] = r.pass;
    json m = json::object();
    for (const auto& [k, v] : r.measured) m[k] = v;
    j["measured"] = m;
    json b = json::object();
    for (const auto& [k, v] : r.bounds) b[k] = v;
    j["bounds"] = b;
    j["trace"] = r.trace;
    return j;
}

}  // namespace dwlab
