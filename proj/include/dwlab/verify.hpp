#pragma once

// Executable stability scenarios. Each scenario builds the hypotheses, runs the
// sequence engine and compares measured quantities against explicit bounds;
// every stability scenario also runs a control whose hypotheses fail and checks
// that the conclusion is not asserted for it.

#include <dwlab/classify.hpp>
#include <dwlab/errors.hpp>
#include <dwlab/holomap.hpp>
#include <dwlab/hypgeom.hpp>
#include <dwlab/random.hpp>
#include <dwlab/sequence.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dwlab {

struct ScenarioResult {
    std::string id;
    bool pass = true;
    std::vector<std::pair<std::string, double>> measured;
    std::vector<std::pair<std::string, double>> bounds;
    std::vector<std::string> trace;

    void measure(const std::string& name, double v) { measured.emplace_back(name, v); }
    void bound(const std::string& name, double v) { bounds.emplace_back(name, v); }
    void note(std::string line) { trace.push_back(std::move(line)); }

    /// Record `value` against `limit`; a false `ok` fails the scenario and
    /// leaves the violation in the trace.
    bool check(const std::string& name, double value, double limit, bool ok) {
        measure(name, value);
        bound(name, limit);
        if (!ok) {
            pass = false;
            char buf[320];
            std::snprintf(buf, sizeof buf, "violation: %s = %.17g against bound %.17g", name.c_str(), value, limit);
            trace.emplace_back(buf);
        }
        return ok;
    }

    bool check_true(const std::string& name, bool ok) { return check(name, ok ? 1.0 : 0.0, 1.0, ok); }

    /// Fold a sub-case into this result with `prefix.` on every name.
    void absorb(const ScenarioResult& sub, const std::string& prefix) {
        for (const auto& [k, v] : sub.measured) measured.emplace_back(prefix + "." + k, v);
        for (const auto& [k, v] : sub.bounds) bounds.emplace_back(prefix + "." + k, v);
        for (const auto& t : sub.trace) trace.push_back(prefix + ": " + t);
        pass = pass && sub.pass;
    }
};

namespace detail {

inline std::string fmt(const char* f, double x) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

inline std::vector<cplx> raw_points(const std::vector<DiscPoint>& pts) {
    std::vector<cplx> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.value());
    return out;
}

/// Run `body`, expecting HypothesisViolation; anything else is a failed control.
template <class Body>
void expect_hypothesis_violation(ScenarioResult& r, const std::string& name, Body&& body) {
    try {
        body();
        r.note("control " + name + ": hypotheses were accepted");
        r.check_true("control." + name + ".rejected", false);
    } catch (const HypothesisViolation& e) {
        r.note("control " + name + ": conclusion not asserted (" + e.what() + ")");
        r.check_true("control." + name + ".rejected", true);
    }
}

/// Guard a sub-case: unexpected library errors become recorded failures.
template <class Body>
ScenarioResult guarded(const std::string& id, Body&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        ScenarioResult r;
        r.id = id;
        r.note(std::string("error: ") + e.what());
        r.check_true("completed", false);
        return r;
    }
}

inline cplx center_of(const MapClass& c) {
    if (const auto* e = std::get_if<mapclass::EllipticFiniteOrder>(&c)) return e->fixed_point;
    if (const auto* e = std::get_if<mapclass::EllipticInfiniteOrder>(&c)) return e->fixed_point;
    return 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distance estimate between two maps and an automorphism

inline double distance_estimate_lambda(cplx a, cplx b, cplx z) {
    const double ab = hyp_dist_disc(a, b);
    if (!(ab > 0.0)) throw std::invalid_argument("lambda needs distinct points a and b");
    return std::exp(hyp_dist_disc(z, a) + ab + hyp_dist_disc(b, z)) / ab;
}

/// rho(f(z), g(z)) <= lambda (rho(f(a), g(a)) + rho(f(b), g(b))) for an automorphism g.
inline ScenarioResult verify_distance_estimate(const HoloMap& f, const HoloMap& g, const DiscPoint& a, const DiscPoint& b,
                                       const DiscPoint& z) {
    if (!is_automorphism(g)) throw NotAutomorphismError("the comparison map must be an automorphism");
    if (a == b) throw std::invalid_argument("lambda is undefined for a = b");
    ScenarioResult r;
    r.id = "thmB";
    const double lambda = distance_estimate_lambda(a.value(), b.value(), z.value());
    const double lhs = hyp_dist_disc(eval_raw(f, z.value()), eval_raw(g, z.value()));
    const double rhs = lambda * (hyp_dist_disc(eval_raw(f, a.value()), eval_raw(g, a.value())) +
                                 hyp_dist_disc(eval_raw(f, b.value()), eval_raw(g, b.value())));
    r.measure("lambda", lambda);
    r.check("lhs", lhs, rhs + 1e-10, lhs <= rhs + 1e-10);
    return r;
}

inline ScenarioResult scenario_distance_estimate(std::uint64_t seed, std::size_t trials = 10000) {
    ScenarioResult r;
    r.id = "thmB";
    const double lam = distance_estimate_lambda(0.0, 0.5, 0.0);
    r.check("lambda_at_0_half_0.error", std::abs(lam - 9.0 / std::log(3.0)), 1e-12,
            std::abs(lam - 9.0 / std::log(3.0)) <= 1e-12);

    const HoloMap rot = make_rotation(0.7);
    r.absorb(verify_distance_estimate(rot, rot, DiscPoint(0.1, 0.2), DiscPoint(-0.3, 0.0), DiscPoint(0.5, -0.5)), "equal_maps");

    Rng rng = Rng::stream(seed, "thmB");
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<BlaschkeFactor> factors;
        const std::size_t deg = 1 + rng.index(3);
        for (std::size_t k = 0; k < deg; ++k) factors.push_back({DiscPoint(rng.in_disc(0.9)), 1});
        const HoloMap f = make_blaschke(std::move(factors), std::polar(1.0, rng.angle()));
        const HoloMap g = make_rotation(rng.angle());
        const DiscPoint a(rng.in_disc(0.95)), b(rng.in_disc(0.95)), z(rng.in_disc(0.95));
        if (a == b) continue;
        const double lambda = distance_estimate_lambda(a.value(), b.value(), z.value());
        const double lhs = hyp_dist_disc(eval_raw(f, z.value()), eval_raw(g, z.value()));
        const double rhs = lambda * (hyp_dist_disc(eval_raw(f, a.value()), eval_raw(g, a.value())) +
                                     hyp_dist_disc(eval_raw(f, b.value()), eval_raw(g, b.value())));
        if (!(lhs <= rhs + 1e-10)) ++violations;
        if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    }
    r.measure("trials", static_cast<double>(trials));
    r.measure("max_lhs_over_rhs", worst_ratio);
    r.check("violations", static_cast<double>(violations), 0.0, violations == 0);
    r.note("random Blaschke f against random rotations g, points uniform in |z| < 0.95");

    try {
        verify_distance_estimate(rot, make_affine(0.5, 0.0), DiscPoint(0.1, 0.0), DiscPoint(0.2, 0.0), DiscPoint(0.0, 0.0));
        r.check_true("control.non_automorphism.rejected", false);
    } catch (const NotAutomorphismError&) {
        r.note("control non_automorphism: g = z/2 rejected, estimate not asserted");
        r.check_true("control.non_automorphism.rejected", true);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Normalized stability near elliptic maps (left and right sequences)

struct StabilityOutcome {
    ScenarioResult result;
    Trajectories full;        // normalized run from n = 1
    Trajectories truncated;   // normalized run after dropping the first N0 maps
    std::size_t truncation = 0;
    double d = 0.0;
};

/// Shared body of the left (f^-n F_n) and right (G_n g^-n) versions.
/// Throws HypothesisViolation when f is not elliptic or the identity, or when
/// the deviations at a or b do not look summable.
inline StabilityOutcome verify_normalized_stability(Side side, const HoloMap& f, const Schedule& schedule,
                                                    const DiscPoint& a, const DiscPoint& b, std::size_t N,
                                                    const std::function<cplx(cplx)>& oracle = {}) {
    StabilityOutcome out;
    ScenarioResult& r = out.result;
    r.id = side == Side::left ? "thm1" : "thm2";

    const MapClass cls = classify(f);
    if (!is_elliptic_or_identity(cls)) throw HypothesisViolation("base map is " + class_name(cls) + ", not elliptic");
    r.note("base map class: " + class_name(cls));

    const auto dev_a = deviation_series_at(schedule, f, {a.value()}, N);
    const auto dev_b = deviation_series_at(schedule, f, {b.value()}, N);
    r.measure("deviation_sum_a", dev_a.partial.back());
    r.measure("deviation_sum_b", dev_b.partial.back());
    if (!dev_a.summable || !dev_b.summable)
        throw HypothesisViolation("deviations at a, b are not summable (tail fraction " +
                                  detail::fmt("%.3g", std::max(dev_a.tail_fraction, dev_b.tail_fraction)) + ")");

    const cplx c = detail::center_of(cls);
    const double radius = std::max(hyp_dist_disc(c, a.value()), hyp_dist_disc(c, b.value())) + 0.5;
    const HyperbolicDisc K(DiscPoint(c), radius);
    const auto devK = deviation_series(schedule, f, K, 64, N);
    const double d = hyp_dist_disc(a.value(), b.value()) / 3.0;
    out.d = d;
    const double total = devK.partial.back();
    std::size_t N0 = 0;
    if (!(total < d)) {
        N0 = N;
        for (std::size_t n = 1; n <= N; ++n)
            if (total - devK.partial[n - 1] < d) {
                N0 = n;
                break;
            }
    }
    out.truncation = N0;
    r.measure("K_radius", radius);
    r.bound("d", d);
    r.measure("deviation_sum_K", total);
    r.measure("truncation", static_cast<double>(N0));
    r.note("K = D(" + detail::fmt("%.6g", c.real()) + detail::fmt("%+.6gi", c.imag()) + ", " + detail::fmt("%.6g", radius) +
           "), first " + std::to_string(N0) + " maps dropped so the tail deviation sum on K is below d");

    std::vector<cplx> points{a.value(), b.value()};
    for (const auto& p : sample_hyp_disc(K, 25, 7)) points.push_back(p.value());
    const DetectorSettings det{1e-8, 50, d / 2.0};
    const Normalization norm = side == Side::left ? Normalization::left(f) : Normalization::right(f);

    out.full = run(SequenceSpec{side, schedule, norm, N, 0}, points);
    const auto rep = detect_convergence(out.full, det);
    r.note(std::string("normalized sequence verdict: ") + to_string(rep.verdict));
    r.check_true("nonconstant_limit", rep.verdict == Verdict::nonconstant_limit);
    if (oracle) {
        double err = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            err = std::max(err, std::abs(out.full.values.back()[i] - oracle(points[i])));
        r.check("oracle_error", err, 1e-6, err <= 1e-6);
    }

    if (N0 >= N) {
        r.check("truncation_available", static_cast<double>(N0), static_cast<double>(N), false);
        return out;
    }
    out.truncated = run(SequenceSpec{side, schedule, norm, N - N0, N0}, {a.value(), b.value()});
    double drift = 0.0;
    for (const auto& row : out.truncated.values)
        drift = std::max({drift, hyp_dist_disc(row[0], a.value()), hyp_dist_disc(row[1], b.value())});
    r.check("max_drift_from_marked_points", drift, d, drift < d);
    const auto& last = out.truncated.values.back();
    const double sep = hyp_dist_disc(last[0], last[1]);
    r.check("limit_separation", sep, d, sep > d);
    return out;
}

inline ScenarioResult verify_left_elliptic(const HoloMap& f, const Schedule& schedule, const DiscPoint& a, const DiscPoint& b,
                                  std::size_t N, const std::function<cplx(cplx)>& oracle = {}) {
    return verify_normalized_stability(Side::left, f, schedule, a, b, N, oracle).result;
}

inline ScenarioResult verify_right_elliptic(const HoloMap& g, const Schedule& schedule, const DiscPoint& a, const DiscPoint& b,
                                  std::size_t N, const std::function<cplx(cplx)>& oracle = {}) {
    return verify_normalized_stability(Side::right, g, schedule, a, b, N, oracle).result;
}

/// Number of distinct angular clusters (bins of width 2pi/bins) that the orbit of
/// one point revisits at least twice over the second half of the run.
inline std::size_t count_accumulation_values(const std::vector<cplx>& orbit, std::size_t bins = 20) {
    std::vector<std::size_t> hits(bins, 0);
    for (std::size_t n = orbit.size() / 2; n < orbit.size(); ++n) {
        double ang = std::arg(orbit[n]);
        if (ang < 0.0) ang += 2.0 * std::numbers::pi;
        hits[std::min(bins - 1, static_cast<std::size_t>(ang / (2.0 * std::numbers::pi) * static_cast<double>(bins)))]++;
    }
    return static_cast<std::size_t>(std::count_if(hits.begin(), hits.end(), [](std::size_t h) { return h >= 2; }));
}

inline Schedule harmonic_rotation_schedule() {
    return Schedule(schedule::Perturbed{make_identity(), schedule::Perturbed::Kind::rotation, 1.0, WeightLaw::power(1.0)});
}

inline ScenarioResult scenario_left_elliptic(std::uint64_t /*seed*/) {
    using K = schedule::Perturbed::Kind;
    ScenarioResult r;
    r.id = "thm1";
    const DiscPoint a(0.5, 0.0), b(0.0, -0.5);

    r.absorb(detail::guarded("rotation", [&] {
                 const Schedule s(schedule::Perturbed{make_rotation(1.0), K::rotation, 1.0, WeightLaw::geometric(0.5)});
                 return verify_left_elliptic(make_rotation(1.0), s, a, b, 200,
                                    [](cplx z) { return std::polar(1.0, 1.0) * z; });
             }),
             "rotation");

    r.absorb(detail::guarded("scaled_identity", [&] {
                 const Schedule s(schedule::Perturbed{make_identity(), K::scale, 1.0, WeightLaw::geometric(0.5)});
                 return verify_left_elliptic(make_identity(), s, a, b, 200);
             }),
             "scaled_identity");

    r.absorb(detail::guarded("constant", [&] {
                 return verify_left_elliptic(make_rotation(1.0), Schedule::constant(make_rotation(1.0)), a, b, 100,
                                    [](cplx z) { return z; });
             }),
             "constant");

    // Infinite-order rotation: the normalized sequence converges while F_n
    // itself keeps visiting many distinct maps.
    r.absorb(detail::guarded("infinite_order", [&] {
                 const HoloMap f = make_rotation(1.0);
                 const Schedule s(schedule::Perturbed{f, K::scale, 1.0, WeightLaw::geometric(0.5)});
                 auto outcome = verify_normalized_stability(Side::left, f, s, a, b, 200);
                 ScenarioResult sub = outcome.result;
                 sub.check_true("infinite_order_class",
                                std::holds_alternative<mapclass::EllipticInfiniteOrder>(classify(f)));
                 const auto raw = run_left(SequenceSpec{Side::left, s, Normalization::none(), 2000, 0}, {a.value()});
                 std::vector<cplx> orbit;
                 for (const auto& row : raw.values) orbit.push_back(row[0]);
                 const auto acc = count_accumulation_values(orbit);
                 sub.check("accumulation_values", static_cast<double>(acc), 10.0, acc >= 10);
                 sub.note("F_n(a) revisits " + std::to_string(acc) +
                          " of 20 angular clusters; finitely many stand in for uncountably many limit maps");
                 return sub;
             }),
             "infinite_order");

    detail::expect_hypothesis_violation(r, "harmonic", [&] { verify_left_elliptic(make_identity(), harmonic_rotation_schedule(), a, b, 20000); });
    return r;
}

inline ScenarioResult scenario_right_elliptic(std::uint64_t /*seed*/) {
    using K = schedule::Perturbed::Kind;
    ScenarioResult r;
    r.id = "thm2";
    const DiscPoint a(0.5, 0.0), b(0.0, -0.5);

    r.absorb(detail::guarded("rotation", [&] {
                 const Schedule s(schedule::Perturbed{make_rotation(1.0), K::rotation, 1.0, WeightLaw::geometric(0.5)});
                 return verify_right_elliptic(make_rotation(1.0), s, a, b, 200,
                                    [](cplx z) { return std::polar(1.0, 1.0) * z; });
             }),
             "rotation");

    r.absorb(detail::guarded("blaschke", [&] {
                 const Schedule s(schedule::Perturbed{make_identity(), K::blaschke, 1.0, WeightLaw::geometric(0.5)});
                 return verify_right_elliptic(make_identity(), s, a, b, 200);
             }),
             "blaschke");

    r.absorb(detail::guarded("constant", [&] {
                 return verify_right_elliptic(make_rotation(1.0), Schedule::constant(make_rotation(1.0)), a, b, 100,
                                    [](cplx z) { return z; });
             }),
             "constant");

    detail::expect_hypothesis_violation(r, "harmonic", [&] { verify_right_elliptic(make_identity(), harmonic_rotation_schedule(), a, b, 20000); });
    return r;
}

// ---------------------------------------------------------------------------
// Right sequences near a map with an interior Denjoy-Wolff point

struct RightInteriorOptions {
    double radius = 1.0;      // r in D = D(zeta, r)
    std::size_t steps = 200;  // length of every right sequence
    std::size_t draw_cap = 100;
};

inline ScenarioResult verify_right_interior(const HoloMap& g, double perturbation_scale, std::size_t trials, std::uint64_t seed,
                                  const RightInteriorOptions& opt = {}) {
    ScenarioResult r;
    r.id = "thm3";
    const MapClass cls = classify(g);
    const auto* dw = std::get_if<mapclass::InteriorDW>(&cls);
    if (!dw) throw HypothesisViolation("g has no interior Denjoy-Wolff point (" + class_name(cls) + ")");
    const cplx zeta = dw->zeta.value();

    const HyperbolicDisc D(dw->zeta, opt.radius);
    const double k = contraction_constant(g, D, 200, seed);
    const double s = k * opt.radius;
    const double t = 0.5 * (s + opt.radius);
    r.measure("k", k);
    r.bound("s", s);
    r.bound("t", t);

    std::vector<cplx> probe = hyp_circle(zeta, opt.radius * (1.0 - 1e-12), 64);
    for (const auto& p : sample_hyp_disc(D, 64, seed)) probe.push_back(p.value());
    double g_image = 0.0;
    for (cplx z : probe) g_image = std::max(g_image, hyp_dist_disc(eval_raw(g, z), zeta));
    r.check("g_image_radius", g_image, s + 1e-9, g_image <= s + 1e-9);

    // neighborhood test h(D) in D(zeta, t)
    auto in_neighborhood = [&](const HoloMap& h) {
        for (cplx z : probe)
            if (!(hyp_dist_disc(eval_raw(h, z), zeta) < t)) return false;
        return true;
    };
    const auto* ga = g.as<Affine>();
    auto perturb = [&](cplx delta) -> HoloMap {
        if (ga) return make_affine(ga->a, ga->b + delta);
        return compose(make_mobius(1.0, delta, std::conj(delta), 1.0), g);
    };
    auto draw = [&](Rng& rng) {
        for (std::size_t attempt = 0; attempt < opt.draw_cap; ++attempt) {
            HoloMap h = perturb(rng.in_disc(perturbation_scale));
            if (in_neighborhood(h)) return h;
        }
        throw InconclusiveError("no map inside the neighborhood after " + std::to_string(opt.draw_cap) + " draws");
    };

    std::vector<cplx> points;
    for (const auto& p : sample_hyp_disc(D, 25, seed)) points.push_back(p.value());
    const DetectorSettings det{1e-8, 50, 1e-3};

    std::size_t constant = 0, inside = 0, moved = 0;
    double worst_radius = 0.0, min_shift = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::stream(seed, "right-interior-trial", trial);
        std::vector<HoloMap> maps;
        maps.reserve(opt.steps);
        for (std::size_t n = 0; n < opt.steps; ++n) maps.push_back(draw(rng));
        auto run_with = [&](const std::vector<HoloMap>& ms) {
            const Schedule sched(schedule::List{ms, g});
            return detect_convergence(run_right(SequenceSpec{Side::right, sched, Normalization::none(), opt.steps, 0}, points),
                                      det);
        };
        const auto rep = run_with(maps);
        if (rep.verdict != Verdict::constant_limit) continue;
        ++constant;
        const double rad = hyp_dist_disc(*rep.limit_point_disc, zeta);
        worst_radius = std::max(worst_radius, rad);
        if (rad < t) ++inside;

        Rng swap_rng = Rng::stream(seed, "right-interior-swap", trial);
        maps[0] = draw(swap_rng);
        const auto rep2 = run_with(maps);
        if (rep2.verdict == Verdict::constant_limit) {
            const double shift = std::abs(*rep2.limit_point_disc - *rep.limit_point_disc);
            min_shift = std::min(min_shift, shift);
            if (shift > 1e-6) ++moved;
        }
    }
    const double tr = static_cast<double>(trials);
    r.check("constant_limits", static_cast<double>(constant), tr, constant == trials);
    r.check("limits_inside_t", static_cast<double>(inside), tr, inside == trials);
    r.check("max_limit_radius", worst_radius, t, worst_radius < t);
    r.check("first_map_swaps_that_move_limit", static_cast<double>(moved), 0.95 * tr,
            static_cast<double>(moved) >= 0.95 * tr);
    r.measure("min_limit_shift", min_shift);
    r.note("t = (s + r)/2 with s = k r; conclusion asserted only for maps passing h(D) in D(zeta, t)");

    // control: a map that leaves the neighborhood is flagged before use
    const HoloMap outside = perturb(std::polar(0.45, 0.3) * (1.0 - std::abs(zeta)));
    const bool flagged = !in_neighborhood(outside);
    r.note(std::string("control out_of_neighborhood: ") + (flagged ? "map rejected" : "map accepted"));
    r.check_true("control.out_of_neighborhood.rejected", flagged);
    return r;
}

inline ScenarioResult scenario_right_interior(std::uint64_t seed, std::size_t trials = 100) {
    ScenarioResult r = verify_right_interior(make_affine(0.5, 0.0), 0.05, trials, seed);
    r.absorb(detail::guarded("constant", [&] {
                 ScenarioResult sub;
                 const auto rep = detect_convergence(
                     run_right(SequenceSpec{Side::right, Schedule::constant(make_affine(0.5, 0.0)), Normalization::none(), 100, 0},
                               {0.3, cplx(0.0, -0.4), cplx(-0.2, 0.1)}));
                 sub.check_true("constant_limit", rep.verdict == Verdict::constant_limit);
                 if (rep.limit_point_disc) sub.check("limit", std::abs(*rep.limit_point_disc), 1e-12, std::abs(*rep.limit_point_disc) <= 1e-12);
                 return sub;
             }),
             "all_equal_g");
    return r;
}

// ---------------------------------------------------------------------------
// Left sequences converging to a map with an interior Denjoy-Wolff point

struct LeftInteriorOptions {
    double radius = 1.0;             // K = D(zeta, radius)
    std::size_t grid = 25;
    std::size_t bound_steps = 1000;  // n range for the distance bound
    DetectorSettings detector{};
    double limit_tol = 1e-6;         // allowed distance of the constant limit from zeta
    std::uint64_t seed = 42;
};

inline ScenarioResult verify_left_interior(const HoloMap& f, const Schedule& schedule, std::size_t N, const LeftInteriorOptions& opt = {}) {
    ScenarioResult r;
    r.id = "thm4";
    const MapClass cls = classify(f);
    const auto* dw = std::get_if<mapclass::InteriorDW>(&cls);
    if (!dw) throw HypothesisViolation("f has no interior Denjoy-Wolff point (" + class_name(cls) + ")");
    const cplx zeta = dw->zeta.value();
    const HyperbolicDisc K(dw->zeta, opt.radius);

    const auto dev = deviation_series(schedule, f, K, 200, N, 0, opt.seed);
    if (!dev.vanishing) throw HypothesisViolation("deviations sup_K rho(f_n, f) do not tend to zero");

    // truncation so that every remaining f_n maps K into itself
    const std::vector<cplx> ring = hyp_circle(zeta, opt.radius * (1.0 - 1e-12), 64);
    std::size_t n0 = 0;
    for (std::size_t n = 1; n <= N; ++n) {
        const HoloMap fn = schedule.at(n);
        for (cplx z : ring)
            if (!(hyp_dist_disc(eval_raw(fn, z), zeta) < opt.radius)) {
                n0 = n;
                break;
            }
    }
    if (n0 >= N) throw HypothesisViolation("no tail of the schedule maps K into itself");
    r.measure("truncation", static_cast<double>(n0));

    const double k = contraction_constant(f, K, 200, opt.seed);
    r.measure("k", k);

    std::vector<cplx> points;
    for (const auto& p : sample_hyp_disc(K, opt.grid, opt.seed)) points.push_back(p.value());
    const std::size_t steps = N - n0;
    const auto traj = run_left(SequenceSpec{Side::left, schedule, Normalization::none(), steps, n0}, points);
    const auto rep = detect_convergence(traj, opt.detector);
    r.note(std::string("verdict: ") + to_string(rep.verdict));
    r.check_true("constant_limit", rep.verdict == Verdict::constant_limit);
    const double limit_err = rep.limit_point_disc ? std::abs(*rep.limit_point_disc - zeta) : 1.0;
    r.check("limit_error", limit_err, opt.limit_tol, limit_err <= opt.limit_tol);

    // first n >= 1 with |F_n(zeta) - zeta| < limit_tol (grid point 0 is the center)
    std::size_t first_hit = 0;
    for (std::size_t n = 1; n <= steps; ++n)
        if (std::abs(traj.values[n][0] - zeta) < opt.limit_tol) {
            first_hit = n;
            break;
        }
    r.check("first_n_within_limit_tol", static_cast<double>(first_hit), 1e4, first_hit > 0 && first_hit <= 10000);

    // rho(F_n z, f^n z) against the contraction bounds
    std::vector<cplx> iter = points;
    double worst_sum = -std::numeric_limits<double>::infinity(), worst_max = worst_sum;
    std::size_t literal_exceed = 0;
    double running_bound = 0.0, sup_so_far = 0.0;
    const std::size_t Nb = std::min(opt.bound_steps, steps);
    for (std::size_t n = 1; n <= Nb; ++n) {
        for (auto& z : iter) z = eval_raw(f, z);
        const double sn = dev.sup[n0 + n - 1];
        running_bound = k * running_bound + sn;
        sup_so_far = std::max(sup_so_far, sn);
        double lhs = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) lhs = std::max(lhs, hyp_dist_disc(traj.values[n][i], iter[i]));
        worst_sum = std::max(worst_sum, lhs - running_bound);
        worst_max = std::max(worst_max, lhs - sup_so_far / (1.0 - k));
        if (lhs > sn / (1.0 - k) + 1e-8) ++literal_exceed;
    }
    r.check("max_excess_over_geometric_sum_bound", worst_sum, 1e-8, worst_sum <= 1e-8);
    r.check("max_excess_over_sup_bound", worst_max, 1e-8, worst_max <= 1e-8);
    r.measure("steps_where_latest_deviation_alone_is_exceeded", static_cast<double>(literal_exceed));
    r.note("bounds: sum_j k^(n-j) s_j and s/(1-k) with s = max_{j<=n} sup_K rho(f_j, f); the latest deviation alone is reported, not asserted");
    return r;
}

inline ScenarioResult scenario_left_interior(std::uint64_t seed) {
    using K = schedule::Perturbed::Kind;
    const HoloMap f = make_affine(0.5, 0.0);
    LeftInteriorOptions opt;
    opt.seed = seed;
    ScenarioResult r = detail::guarded("thm4", [&] {
        return verify_left_interior(f, Schedule(schedule::Perturbed{f, K::additive, 1.0, WeightLaw::power(2.0, 2.0)}), 10000, opt);
    });
    r.id = "thm4";

    r.absorb(detail::guarded("alternating", [&] {
                 LeftInteriorOptions alt = opt;
                 alt.detector.tol = 1e-3;
                 alt.limit_tol = 1e-3;
                 alt.bound_steps = 0;
                 ScenarioResult sub = verify_left_interior(
                     f, Schedule(schedule::Perturbed{f, K::additive, 1.0, WeightLaw::power(1.0, 2.0, true)}), 10000, alt);
                 sub.note("non-summable deviations (-1)^n/(n+2) converge like 1/n; detector and limit tolerance 1e-3");
                 return sub;
             }),
             "alternating");

    r.absorb(detail::guarded("constant", [&] {
                 LeftInteriorOptions c = opt;
                 c.bound_steps = 100;
                 return verify_left_interior(f, Schedule::constant(f), 200, c);
             }),
             "constant");

    detail::expect_hypothesis_violation(r, "non_vanishing", [&] {
        verify_left_interior(f, Schedule(schedule::Perturbed{f, K::additive, 0.1, WeightLaw::power(0.0, 0.0, true)}), 1000, opt);
    });
    return r;
}

// ---------------------------------------------------------------------------
// Left sequences near a map with a boundary Denjoy-Wolff point
//
// The run is carried out in the half-plane after sending the Denjoy-Wolff
// point to infinity and 0 to i, where orbits of points near the boundary keep
// full relative precision.

namespace detail {

/// Rotation of H about i by angle theta.
inline Mobius halfplane_rotation(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    return Mobius{c, s, -s, c, Model::halfplane};
}

/// Point at hyperbolic distance u from i in direction alpha.
inline cplx halfplane_point_at(double u, double alpha) { return halfplane_rotation(alpha)(cplx(0.0, std::exp(u))); }

}  // namespace detail

struct LeftBoundaryOptions {
    double budget_fraction = 0.9;          // perturbation size as a fraction of 2^-(n+1)
    std::optional<double> fixed_angle;     // override: same rotation angle every step
};

inline ScenarioResult verify_left_boundary(const HoloMap& f, std::size_t M, const LeftBoundaryOptions& opt = {}) {
    ScenarioResult r;
    r.id = "thm5";
    const MapClass cls = classify(f);
    const auto* bdw = std::get_if<mapclass::BoundaryDW>(&cls);
    if (!bdw) throw HypothesisViolation("f has no boundary Denjoy-Wolff point (" + class_name(cls) + ")");
    const auto fm = as_mobius(f);
    if (!fm) throw std::invalid_argument("boundary stability runs support Mobius maps only");
    const cplx zeta = bdw->zeta;

    // T: z -> Cayley^-1(conj(zeta) z) sends zeta to infinity and 0 to i
    Mobius T = detail::multiply(detail::cayley_matrix_from_disc(), Mobius{std::conj(zeta), 0.0, 0.0, 1.0, Model::disc});
    Mobius h = detail::multiply(T, detail::multiply(to_disc_model(*fm), detail::inverse(T)));
    h.model = Model::halfplane;
    const HoloMap hm = h;
    const cplx i(0.0, 1.0);
    const double step0 = hyp_dist_halfplane(h(i), i);

    std::vector<HoloMap> maps;
    maps.reserve(M);
    cplx orbit = i;  // h^(n-1)(i)
    double worst_budget = 0.0;
    double direct_gap = 0.0;  // exact displacement against direct evaluation, n <= 8
    for (std::size_t n = 1; n <= M; ++n) {
        const double Rn = 1.0 + hyp_dist_halfplane(orbit, i);
        const double budget = std::ldexp(1.0, -static_cast<int>(n) - 1);
        double theta;
        if (opt.fixed_angle) {
            theta = *opt.fixed_angle;
        } else {
            const double target = opt.budget_fraction * budget;
            theta = 2.0 * std::asin(std::min(1.0, std::sinh(0.5 * target) / std::sinh(Rn + step0)));
            if (n % 2 == 0) theta = -theta;
        }
        const Mobius rot = detail::halfplane_rotation(theta);
        Mobius fn = detail::multiply(rot, h);
        fn.model = Model::halfplane;

        // sup over a sample of D_n = D(i, R_n) of rho(f_n, f). A rotation by theta
        // about i moves w by exactly 2 asinh(sinh(rho(w, i)) |sin(theta/2)|);
        // direct subtraction far from i drowns in roundoff once 2^-n is small.
        double sup = 0.0;
        for (int j = 0; j <= 8; ++j)
            for (int a = 0; a < 16; ++a) {
                const cplx z = detail::halfplane_point_at(Rn * j / 8.0, 2.0 * std::numbers::pi * a / 16.0);
                if (!(z.imag() > kBoundaryGuard)) continue;
                const cplx w = h(z);
                const double moved = 2.0 * std::asinh(std::sinh(hyp_dist_halfplane(w, i)) * std::abs(std::sin(0.5 * theta)));
                sup = std::max(sup, moved);
                if (n <= 8) direct_gap = std::max(direct_gap, std::abs(moved - hyp_dist_halfplane(fn(z), w)));
            }
        worst_budget = std::max(worst_budget, sup / budget);
        if (!(sup < budget))
            throw HypothesisViolation("perturbation at n = " + std::to_string(n) + " exceeds the 2^-n budget on D_n (" +
                                      detail::fmt("%.3g", sup) + " >= " + detail::fmt("%.3g", budget) + ")");
        maps.push_back(fn);
        orbit = h(orbit);
    }
    r.check("max_sup_deviation_over_budget", worst_budget, 1.0, worst_budget < 1.0);
    r.check("displacement_formula_vs_direct", direct_gap, 1e-9, direct_gap <= 1e-9);

    const Schedule sched(schedule::List{maps, hm});
    const auto traj = run_left(SequenceSpec{Side::left, sched, Normalization::none(), M, 0}, {i});
    cplx free_orbit = i;
    double worst_ratio = 0.0;
    bool bound_ok = true;
    std::size_t first_close = 0;
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= M; ++m) {
        free_orbit = h(free_orbit);
        const cplx Fm = traj.values[m][0];
        const double dist = hyp_dist_halfplane(Fm, free_orbit);
        const double bound = 1.0 - std::ldexp(1.0, -static_cast<int>(m));
        if (!(dist < bound)) bound_ok = false;
        worst_ratio = std::max(worst_ratio, dist / bound);
        if (m == 1) r.check("base_case_distance", dist, 0.5, dist < 0.5);
        const double to_zeta = 2.0 / std::abs(Fm + i);  // |Cayley(F_m) - 1| = |F_m(0) - zeta| in the disc
        closest = std::min(closest, to_zeta);
        if (first_close == 0 && to_zeta < 1e-3) first_close = m;
    }
    r.check("max_distance_over_bound", worst_ratio, 1.0, bound_ok);
    r.measure("min_distance_to_dw_point", closest);
    r.check("first_m_within_1e-3_of_dw_point", static_cast<double>(first_close), 1000.0, first_close > 0);
    r.note("perturbations are rotations about 0 sized to " +
           detail::fmt("%.2g", opt.budget_fraction) + " of 2^-(n+1) on D_n = D(0, 1 + rho(f^(n-1)(0), 0))");
    return r;
}

inline ScenarioResult scenario_left_boundary(std::uint64_t /*seed*/) {
    const HoloMap f = make_mobius(3.0, 1.0, 1.0, 3.0);
    ScenarioResult r = detail::guarded("thm5", [&] { return verify_left_boundary(f, 60); });
    r.id = "thm5";
    r.absorb(detail::guarded("zero_perturbation", [&] {
                 LeftBoundaryOptions z;
                 z.budget_fraction = 0.0;
                 return verify_left_boundary(f, 60, z);
             }),
             "zero_perturbation");
    detail::expect_hypothesis_violation(r, "oversized_perturbation", [&] {
        LeftBoundaryOptions big;
        big.fixed_angle = 1.0;
        verify_left_boundary(f, 60, big);
    });
    return r;
}

// ---------------------------------------------------------------------------
// Examples

inline ScenarioResult run_harmonic_rotations(std::size_t N = 100000) {
    ScenarioResult r;
    r.id = "example1";
    const Schedule s = harmonic_rotation_schedule();
    const std::vector<cplx> points{0.5, cplx(0.0, 0.3), cplx(-0.2, 0.2)};
    const auto traj = run_left(SequenceSpec{Side::left, s, Normalization::none(), N, 0}, points);

    if (N >= 3) {
        const double err = std::abs(traj.values[3][0] - std::polar(0.5, 11.0 / 6.0));
        r.check("F3_error", err, 1e-12, err <= 1e-12);
    }
    const auto rep = detect_convergence(traj);
    r.check_true("divergent", rep.verdict == Verdict::divergent);
    if (rep.verdict == Verdict::divergent) {
        r.measure("witness_angle_1", std::arg(rep.witnesses[0]));
        r.measure("witness_angle_2", std::arg(rep.witnesses[1]));
        r.note("witness " + rep.witness);
    }

    constexpr std::size_t kIntervals = 63;  // [0.1 j, 0.1 (j+1)) cut at 2 pi
    std::vector<bool> seen(kIntervals, false);
    for (const auto& row : traj.values) {
        double ang = std::arg(row[0]);
        if (ang < 0.0) ang += 2.0 * std::numbers::pi;
        seen[std::min(kIntervals - 1, static_cast<std::size_t>(ang / 0.1))] = true;
    }
    const auto visited = static_cast<double>(std::count(seen.begin(), seen.end(), true));
    r.check("angle_intervals_visited", visited, static_cast<double>(kIntervals), visited == kIntervals);

    const auto dev = deviation_series_at(s, make_identity(), {0.5}, N);
    r.measure("deviation_tail_fraction", dev.tail_fraction);
    r.check_true("deviations_non_summable", !dev.summable);

    // rotations commute, so the right sequence has the same trajectories
    const std::size_t Nr = std::min<std::size_t>(N, 1000);
    const auto right = run_right(SequenceSpec{Side::right, s, Normalization::none(), Nr, 0}, points);
    double diff = 0.0;
    for (std::size_t n = 0; n <= Nr; ++n)
        for (std::size_t k = 0; k < points.size(); ++k) diff = std::max(diff, std::abs(right.values[n][k] - traj.values[n][k]));
    r.check("left_right_difference", diff, 1e-12, diff <= 1e-12);
    return r;
}

inline ScenarioResult run_oscillating_blocks(double delta = 0.1, std::size_t N = 2000) {
    ScenarioResult r;
    r.id = "example2";
    const std::vector<cplx> points{0.0, 0.5, -0.5, cplx(0.0, 0.5)};
    const auto traj = run_left(SequenceSpec{Side::left, Schedule(schedule::OscillatingBlocks{delta}), Normalization::none(), N, 0},
                               points);
    const auto rep = detect_convergence(traj);
    r.check_true("divergent", rep.verdict == Verdict::divergent);
    const double sep = rep.witnesses.size() == 2 ? std::abs(rep.witnesses[0] - rep.witnesses[1]) : 0.0;
    r.check("witness_separation", sep, 3.0 * delta, sep >= 3.0 * delta);
    if (!rep.witness.empty()) r.note("witness " + rep.witness);
    r.note("theta_n = 0 until F_n(0) is within delta/10 of 2 delta, then pi until within delta/10 of -2 delta");

    auto constant_case = [&](const HoloMap& m, cplx expected, const std::string& name) {
        const auto t = run_left(SequenceSpec{Side::left, Schedule::constant(m), Normalization::none(), 200, 0}, points);
        const auto c = detect_convergence(t);
        r.check_true(name + ".constant_limit", c.verdict == Verdict::constant_limit);
        const double err = c.limit_point_disc ? std::abs(*c.limit_point_disc - expected) : 1.0;
        r.check(name + ".limit_error", err, 1e-6, err <= 1e-6);
    };
    constant_case(make_affine(0.5, delta), 2.0 * delta, "theta_zero");
    constant_case(make_affine(0.5, 0.0), 0.0, "delta_zero");
    return r;
}

inline ScenarioResult run_eventual_translation() {
    ScenarioResult r;
    r.id = "example_hg";
    const HoloMap h = make_hpexp(HalfPlanePoint(0.0, 1.0), 2.0 * std::numbers::pi);
    const HoloMap g = make_mobius(1.0, 1.0, 0.0, 1.0, Model::halfplane);
    const cplx i(0.0, 1.0);

    const double h_i_err = std::abs(eval_raw(h, i) - (i + std::exp(-2.0 * std::numbers::pi)));
    r.check("h_at_i_error", h_i_err, 1e-15, h_i_err <= 1e-15);

    const HoloMap hg = compose(h, g);
    double invariance = 0.0;
    for (int x = -4; x <= 4; ++x)
        for (double y : {0.05, 0.3, 1.0, 2.5}) {
            const cplx z(0.37 * x, y);
            invariance = std::max(invariance, std::abs(eval_raw(hg, z) - eval_raw(h, z)));
        }
    r.check("hg_minus_h", invariance, 1e-12, invariance <= 1e-12);

    const Schedule s(schedule::List{{h}, g});
    const auto traj = run_right(SequenceSpec{Side::right, s, Normalization::none(), 100, 0}, {i, cplx(0.3, 0.7)});
    double spread = 0.0;
    for (std::size_t n = 1; n <= 100; ++n)
        for (std::size_t k = 0; k < 2; ++k) spread = std::max(spread, std::abs(traj.values[n][k] - traj.values[1][k]));
    r.check("G_n_spread", spread, 1e-12, spread <= 1e-12);

    // g alone drifts to its boundary Denjoy-Wolff point at infinity
    const MapClass cg = classify(g);
    r.check_true("g_boundary_dw", std::holds_alternative<mapclass::BoundaryDW>(cg));
    const auto gonly = run_right(SequenceSpec{Side::right, Schedule::constant(g), Normalization::none(), 100, 0}, {i});
    r.measure("g_only_G100_im", gonly.values.back()[0].imag());
    r.check("g_only_G100_re", gonly.values.back()[0].real(), 100.0, std::abs(gonly.values.back()[0].real() - 100.0) < 1e-9);
    r.note("eventually constant schedule g_1 = h, g_n = z + 1 keeps G_n = h although g_n -> g");
    return r;
}

// ---------------------------------------------------------------------------
// Registry

struct ScenarioOptions {
    std::uint64_t seed = 42;
    std::optional<std::size_t> trials;  // distance-estimate instances, right-interior schedules
    std::optional<std::size_t> max_n;   // lengths of the divergence runs
};

inline const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"thmB", "thm1", "thm2", "thm3", "thm4", "thm5", "example1", "example2", "example_hg"};
    return ids;
}

inline bool is_scenario(const std::string& id) {
    const auto& ids = scenario_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

inline ScenarioResult run_scenario(const std::string& id, const ScenarioOptions& opt = {}) {
    ScenarioResult r = detail::guarded(id, [&]() -> ScenarioResult {
        if (id == "thmB") return scenario_distance_estimate(opt.seed, opt.trials.value_or(10000));
        if (id == "thm1") return scenario_left_elliptic(opt.seed);
        if (id == "thm2") return scenario_right_elliptic(opt.seed);
        if (id == "thm3") return scenario_right_interior(opt.seed, opt.trials.value_or(100));
        if (id == "thm4") return scenario_left_interior(opt.seed);
        if (id == "thm5") return scenario_left_boundary(opt.seed);
        if (id == "example1") return run_harmonic_rotations(opt.max_n.value_or(100000));
        if (id == "example2") return run_oscillating_blocks(0.1, opt.max_n.value_or(2000));
        if (id == "example_hg") return run_eventual_translation();
        throw std::invalid_argument("unknown scenario '" + id + "'");
    });
    r.id = id;
    return r;
}

/// Run scenarios concurrently; results come back in the order of `ids`.
inline std::vector<ScenarioResult> run_scenarios(const std::vector<std::string>& ids, const ScenarioOptions& opt = {}) {
    std::vector<std::future<ScenarioResult>> jobs;
    jobs.reserve(ids.size());
    for (const auto& id : ids) jobs.push_back(std::async(std::launch::async, [id, opt] { return run_scenario(id, opt); }));
    std::vector<ScenarioResult> out;
    out.reserve(ids.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace dwlab
