// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <dwlab/dwlab.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>

using namespace dwlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int number, const char* name, const std::function<Line()>& body) {
    Line l;
    try {
        l = body();
    } catch (const std::exception& e) {
        l = {false, std::string("exception: ") + e.what()};
    }
    if (!l.pass) ++failures;
    std::printf("%s %d %-22s %s\n", l.pass ? "PASS" : "FAIL", number, name, l.detail.c_str());
    std::fflush(stdout);
}

std::string first_violation(const ScenarioResult& r) {
    for (const auto& t : r.trace)
        if (t.find("violation") != std::string::npos || t.find("error") != std::string::npos) return t;
    return "";
}

double measured(const ScenarioResult& r, const std::string& key) {
    for (const auto& [k, v] : r.measured)
        if (k == key) return v;
    return std::nan("");
}

// 1. Distance kernel against closed forms, and the two disc formulations against each other.
Line metric_kernel() {
    const auto t0 = Clock::now();
    double worst = std::abs(hyp_dist_disc(cplx(0.0), cplx(0.5)) - std::log(3.0));
    bool ok = worst <= 1e-12;
    for (int n = 1; n <= 20; ++n) {
        const double e = std::abs(hyp_dist_halfplane(cplx(0.0, std::ldexp(1.0, 1 - n)), cplx(0.0, std::ldexp(1.0, -n))) -
                                  std::log(2.0));
        worst = std::max(worst, e);
        ok = ok && e <= 1e-12;
    }
    Rng rng = Rng::stream(42, "acceptance-metric");
    double worst_pair = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const cplx z = rng.in_disc(0.99), w = rng.in_disc(0.99);
        worst_pair = std::max(worst_pair, std::abs(hyp_dist_disc(z, w) - hyp_dist_disc_sinh(z, w)));
    }
    ok = ok && worst_pair <= 1e-12;
    const double secs = seconds_since(t0);
    ok = ok && secs < 1.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "closed-form error %.2e, artanh/sinh gap %.2e, %.3f s", worst, worst_pair, secs);
    return {ok, buf};
}

// 2. Random self-maps never expand the metric; automorphisms preserve it.
HoloMap random_self_map(Rng& rng, std::size_t k) {
    switch (k % 4) {
        case 0: {
            std::vector<BlaschkeFactor> f;
            const std::size_t deg = 1 + rng.index(4);
            for (std::size_t j = 0; j < deg; ++j) f.push_back({DiscPoint(rng.in_disc(0.95)), 1});
            return make_blaschke(std::move(f), std::polar(1.0, rng.angle()));
        }
        case 1: {
            const double r = rng.uniform(0.0, 1.0);
            return make_affine(std::polar(r, rng.angle()), std::polar((1.0 - r) * rng.uniform(), rng.angle()));
        }
        case 2: {
            // phi_a o (s z) o phi_b: a contraction built from two automorphisms.
            const cplx a = rng.in_disc(0.8), b = rng.in_disc(0.8);
            return compose(make_mobius(1, a, std::conj(a), 1),
                           compose(make_affine(rng.uniform(0.05, 0.99), 0.0), make_mobius(1, b, std::conj(b), 1)));
        }
        default: {
            const cplx a = rng.in_disc(0.9);
            const cplx u = std::polar(1.0, rng.angle());
            return make_mobius(u, u * a, std::conj(a), 1);  // automorphism
        }
    }
}

Line schwarz_pick() {
    const auto t0 = Clock::now();
    Rng rng = Rng::stream(42, "acceptance-schwarz-pick");
    std::size_t violations = 0, equality_misses = 0, automorphisms = 0;
    double worst_gap = 0.0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const HoloMap m = random_self_map(rng, k);
        const bool aut = is_automorphism(m);
        automorphisms += aut;
        for (int j = 0; j < 1000; ++j) {
            const cplx z = rng.in_disc(0.95), w = rng.in_disc(0.95);
            const double before = hyp_dist_disc(z, w);
            const double after = hyp_dist_disc(eval_raw(m, z), eval_raw(m, w));
            if (!(after <= before + 1e-10)) ++violations;
            if (aut) {
                worst_gap = std::max(worst_gap, std::abs(after - before));
                if (!(std::abs(after - before) <= 1e-10)) ++equality_misses;
            }
        }
    }
    const double secs = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu violations, %zu automorphisms (max |gap| %.2e, %zu misses), %.2f s", violations,
                  automorphisms, worst_gap, equality_misses, secs);
    return {violations == 0 && equality_misses == 0 && automorphisms > 0 && secs < 30.0, buf};
}

// 3. The automorphism distance estimate on 10^4 random instances.
Line distance_estimate() {
    const auto t0 = Clock::now();
    const auto r = run_scenario("thmB", {42, 10000, std::nullopt});
    const double secs = seconds_since(t0);
    char buf[240];
    std::snprintf(buf, sizeof buf, "violations %g of %g, max lhs/rhs %.3f, %.2f s %s", measured(r, "violations"),
                  measured(r, "trials"), measured(r, "max_lhs_over_rhs"), secs, first_violation(r).c_str());
    return {r.pass && measured(r, "trials") == 10000 && secs < 30.0, buf};
}

// 4. Iteration-based Denjoy-Wolff detection against fixed-point classification.
HoloMap random_mobius_self_map(Rng& rng, std::size_t k) {
    if (k % 2 == 0) {
        const cplx a = rng.in_disc(0.8), b = rng.in_disc(0.8);
        return compose(make_mobius(1, a, std::conj(a), 1),
                       compose(make_affine(std::polar(rng.uniform(0.1, 0.95), rng.angle()), 0.0),
                               make_mobius(1, b, std::conj(b), 1)));
    }
    // z -> s z + beta on the half-plane (s > 1, Im beta >= 0), moved to the disc and rotated.
    const double s = rng.uniform(1.2, 4.0);
    const cplx beta(rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0));
    Mobius d = to_disc_model(Mobius{s, beta, 0.0, 1.0, Model::halfplane});
    const double phi = rng.angle();
    const HoloMap rot = make_rotation(phi), back = make_rotation(-phi);
    return compose(rot, compose(make_mobius(d.a, d.b, d.c, d.d), back));
}

Line oracle_agreement() {
    Rng rng = Rng::stream(42, "acceptance-dw-oracle");
    std::size_t conclusive = 0, agree = 0, inconclusive = 0, interior = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const HoloMap m = random_mobius_self_map(rng, k);
        try {
            const MapClass c = classify(m);
            const bool is_interior = std::holds_alternative<mapclass::InteriorDW>(c);
            if (!is_interior && !std::holds_alternative<mapclass::BoundaryDW>(c)) {
                ++inconclusive;
                continue;
            }
            const cplx expect = is_interior ? std::get<mapclass::InteriorDW>(c).zeta.value()
                                            : std::get<mapclass::BoundaryDW>(c).zeta;
            const DenjoyWolffPoint dw = denjoy_wolff(m);
            ++conclusive;
            interior += is_interior;
            if (dw.interior == is_interior && std::abs(dw.zeta - expect) <= 1e-6) ++agree;
        } catch (const InconclusiveError&) {
            ++inconclusive;
        }
    }
    const double rate = static_cast<double>(inconclusive) / 1000.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu/%zu conclusive agree (%zu interior), inconclusive rate %.3f", agree, conclusive,
                  interior, rate);
    return {agree == conclusive && conclusive > 0 && rate < 0.01, buf};
}

Line scenarios(const std::vector<std::string>& ids) {
    const auto results = run_scenarios(ids);
    bool ok = true;
    std::string detail;
    for (const auto& r : results) {
        ok = ok && r.pass;
        detail += r.id + (r.pass ? ":pass " : ":FAIL ");
        if (!r.pass) detail += "(" + first_violation(r) + ") ";
    }
    return {ok, detail};
}

// 9. Repeated verify runs print identical JSON.
std::string capture(const std::string& cmd) {
    std::string out;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) throw std::runtime_error("cannot run " + cmd);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
    return out;
}

Line determinism() {
    const std::string cmd = std::string(DWLAB_CLI_PATH) + " verify all --seed 42 2>/dev/null";
    const std::string a = capture(cmd), b = capture(cmd);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu bytes, runs %s", a.size(), a == b ? "identical" : "differ");
    return {!a.empty() && a == b, buf};
}

}  // namespace

int main() {
    report(1, "metric-kernel", metric_kernel);
    report(2, "schwarz-pick", schwarz_pick);
    report(3, "distance-estimate", distance_estimate);
    report(4, "denjoy-wolff-oracle", oracle_agreement);
    report(5, "elliptic-stability", [] { return scenarios({"thm1", "thm2", "example1"}); });
    report(6, "right-interior", [] { return scenarios({"thm3"}); });
    report(7, "left-interior", [] { return scenarios({"thm4", "example2"}); });
    report(8, "left-boundary", [] { return scenarios({"thm5", "example_hg"}); });
    report(9, "determinism", determinism);
    return failures == 0 ? 0 : 1;
}
