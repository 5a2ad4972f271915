#pragma once

// Left-composition sequences F_n = f_n o ... o f_1 and right-composition
// sequences G_n = g_1 o ... o g_n, their normalized forms f^-n F_n and
// G_n g^-n, deviation bookkeeping and a grid-plus-window convergence detector.

#include <dwlab/classify.hpp>
#include <dwlab/errors.hpp>
#include <dwlab/holomap.hpp>
#include <dwlab/hypgeom.hpp>
#include <dwlab/random.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dwlab {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

// ---------------------------------------------------------------------------
// Schedules

/// Weight w(n) used by perturbation families: (n + shift)^-exponent or ratio^n,
/// optionally with alternating sign (-1)^n.
struct WeightLaw {
    enum class Kind { power, geometric };
    Kind kind = Kind::geometric;
    double exponent = 1.0;
    double shift = 0.0;
    double ratio = 0.5;
    bool alternating = false;

    double operator()(std::size_t n) const {
        const double x = static_cast<double>(n);
        double w = kind == Kind::power ? std::pow(x + shift, -exponent) : std::pow(ratio, x);
        if (alternating && (n % 2 == 1)) w = -w;
        return w;
    }

    static WeightLaw power(double exponent, double shift = 0.0, bool alternating = false) {
        return {Kind::power, exponent, shift, 0.5, alternating};
    }
    static WeightLaw geometric(double ratio, bool alternating = false) {
        return {Kind::geometric, 1.0, 0.0, ratio, alternating};
    }

    friend bool operator==(const WeightLaw&, const WeightLaw&) = default;
};

namespace schedule {

/// f_n = map for every n.
struct Constant {
    HoloMap map;
    friend bool operator==(const Constant&, const Constant&) = default;
};

/// f_n = maps[n-1] for n <= maps.size(), tail afterwards.
struct List {
    std::vector<HoloMap> maps;
    HoloMap tail;
    friend bool operator==(const List&, const List&) = default;
};

/// f_n built from `base` and the weight c w(n):
///   additive: affine base with offset b + c w(n)
///   rotation: rot(c w(n)) o base
///   scale:    affine(1 - c w(n), 0) o base
///   blaschke: B_{c w(n) e^{i n}} o base, a single-zero Blaschke factor
struct Perturbed {
    enum class Kind { additive, rotation, scale, blaschke };
    HoloMap base;
    Kind kind = Kind::rotation;
    double amplitude = 1.0;
    WeightLaw law;
    friend bool operator==(const Perturbed&, const Perturbed&) = default;
};

/// f_n = affine(slope, offset + delta_n) with delta_n seeded uniform in |delta| <= scale.
struct RandomAffine {
    cplx slope{0.5};
    cplx offset{0.0};
    double scale = 0.05;
    std::uint64_t seed = 42;
    friend bool operator==(const RandomAffine&, const RandomAffine&) = default;
};

/// f_n = z/2 + delta e^{i theta_n}, theta_n in {0, pi} switched in blocks: hold
/// theta until F_n(0) is within delta/10 of the attracting value +-2 delta, then flip.
struct OscillatingBlocks {
    double delta = 0.1;
    friend bool operator==(const OscillatingBlocks&, const OscillatingBlocks&) = default;
};

}  // namespace schedule

using ScheduleSpec = std::variant<schedule::Constant, schedule::List, schedule::Perturbed, schedule::RandomAffine,
                                  schedule::OscillatingBlocks>;

inline const char* perturbation_name(schedule::Perturbed::Kind k) {
    switch (k) {
        case schedule::Perturbed::Kind::additive: return "additive";
        case schedule::Perturbed::Kind::rotation: return "rotation";
        case schedule::Perturbed::Kind::scale: return "scale";
        case schedule::Perturbed::Kind::blaschke: return "blaschke";
    }
    return "?";
}

/// Rule n -> f_n (n >= 1). Either one of the serializable families or an
/// arbitrary generator for in-code scenarios.
class Schedule {
public:
    using Generator = std::function<HoloMap(std::size_t)>;

    Schedule(ScheduleSpec spec) : spec_(std::move(spec)) {  // NOLINT: implicit by design of the family types
        if (const auto* ob = std::get_if<schedule::OscillatingBlocks>(&*spec_))
            if (!(ob->delta >= 0.0) || ob->delta > 0.5) throw InvalidMapError("oscillating blocks need 0 <= delta <= 0.5");
    }

    Schedule(Generator gen, std::string label, HoloMap base = Identity{})
        : gen_(std::move(gen)), label_(std::move(label)), custom_base_(std::move(base)) {}

    static Schedule constant(HoloMap m) { return Schedule(schedule::Constant{std::move(m)}); }

    /// f_n for n >= 1.
    HoloMap at(std::size_t n) const {
        if (n == 0) throw std::out_of_range("schedules are indexed from 1");
        if (gen_) return gen_(n);
        return std::visit([this, n](const auto& s) { return make(s, n); }, *spec_);
    }

    /// The map the schedule is meant to approach.
    HoloMap base() const {
        if (gen_) return custom_base_;
        return std::visit(
            [](const auto& s) -> HoloMap {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, schedule::Constant>) return s.map;
                else if constexpr (std::is_same_v<T, schedule::List>) return s.tail;
                else if constexpr (std::is_same_v<T, schedule::Perturbed>) return s.base;
                else if constexpr (std::is_same_v<T, schedule::RandomAffine>) return Affine{s.slope, s.offset};
                else return Affine{0.5, 0.0};
            },
            *spec_);
    }

    const std::optional<ScheduleSpec>& spec() const { return spec_; }
    std::string label() const;

private:
    static HoloMap make(const schedule::Constant& s, std::size_t) { return s.map; }

    static HoloMap make(const schedule::List& s, std::size_t n) { return n <= s.maps.size() ? s.maps[n - 1] : s.tail; }

    static HoloMap make(const schedule::Perturbed& s, std::size_t n) {
        const double w = s.amplitude * s.law(n);
        using K = schedule::Perturbed::Kind;
        switch (s.kind) {
            case K::additive: {
                const auto* af = s.base.as<Affine>();
                if (!af) throw InvalidMapError("additive perturbation needs an affine base");
                return make_affine(af->a, af->b + w);
            }
            case K::rotation: return compose(make_rotation(w), s.base);
            case K::scale: return compose(make_affine(1.0 - w, 0.0), s.base);
            case K::blaschke:
                return compose(make_blaschke({{DiscPoint(std::polar(w, static_cast<double>(n))), 1}}, 1.0), s.base);
        }
        return s.base;
    }

    static HoloMap make(const schedule::RandomAffine& s, std::size_t n) {
        Rng rng = Rng::stream(s.seed, "schedule-draws", n);
        return make_affine(s.slope, s.offset + rng.in_disc(s.scale));
    }

    HoloMap make(const schedule::OscillatingBlocks& s, std::size_t n) const {
        return make_affine(0.5, s.delta * block_sign(s.delta, n));
    }

    /// +1 / -1 for theta_n = 0 / pi, from the orbit of 0 (memoized).
    double block_sign(double delta, std::size_t n) const {
        std::lock_guard lock(cache_->mutex);
        auto& signs = cache_->signs;
        if (signs.empty()) {
            cache_->x = 0.0;
            cache_->sign = 1.0;
        }
        while (signs.size() < n) {
            signs.push_back(cache_->sign);
            cache_->x = 0.5 * cache_->x + delta * cache_->sign;
            if (std::abs(cache_->x - 2.0 * delta * cache_->sign) < delta / 10.0) cache_->sign = -cache_->sign;
        }
        return signs[n - 1];
    }

    struct BlockCache {
        std::mutex mutex;
        std::vector<double> signs;
        double x = 0.0;
        double sign = 1.0;
    };

    std::optional<ScheduleSpec> spec_;
    Generator gen_;
    std::string label_;
    HoloMap custom_base_;
    std::shared_ptr<BlockCache> cache_ = std::make_shared<BlockCache>();
};

struct Normalization {
    enum class Kind { none, conjugate_left, conjugate_right };
    Kind kind = Kind::none;
    HoloMap base;

    static Normalization none() { return {}; }
    static Normalization left(HoloMap f) { return {Kind::conjugate_left, std::move(f)}; }
    static Normalization right(HoloMap g) { return {Kind::conjugate_right, std::move(g)}; }
};

struct SequenceSpec {
    Side side = Side::left;
    Schedule schedule;
    Normalization normalization;
    std::size_t max_n = 1000;
    /// Maps used are schedule(offset + 1), schedule(offset + 2), ... (truncation).
    std::size_t offset = 0;
};

/// Hard cap on right-sequence length (general schedules cost O(n^2)).
inline constexpr std::size_t kMaxRightSteps = 100000;

// ---------------------------------------------------------------------------
// Trajectories

/// values[n][i] is the n-th term applied to inputs[i]; row 0 holds the inputs.
struct Trajectories {
    Model model = Model::disc;
    std::vector<cplx> inputs;
    std::vector<std::vector<cplx>> values;
    std::vector<bool> absorbed;  // per point: reached the boundary guard and was frozen

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    std::size_t points() const { return inputs.size(); }
};

namespace detail {

enum class Landing { inside, absorbed, escaped };

inline Landing classify_landing(Model model, cplx w) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return Landing::escaped;
    if (model == Model::disc) {
        const double r = std::abs(w);
        if (r > 1.0 + 1e-9) return Landing::escaped;
        return r >= 1.0 - 10.0 * kBoundaryGuard ? Landing::absorbed : Landing::inside;
    }
    const double scale = std::max(1.0, std::abs(w));
    if (w.imag() < -1e-9 * scale) return Landing::escaped;
    if (w.imag() < 10.0 * kBoundaryGuard || std::abs(w) > 1e150) return Landing::absorbed;
    return Landing::inside;
}

inline void check_schedule_map(const HoloMap& f, std::size_t n) {
    const auto rep = is_self_map_check(f, 64);
    if (!rep.pass)
        throw NotSelfMapError("schedule map " + std::to_string(n) + " is not a self-map", *rep.escaping_input, n);
}

/// The n-th map of a run. A family member that fails validation (say an
/// additive offset pushing z/2 + c past the circle) is reported as an escape.
inline HoloMap schedule_map(const SequenceSpec& spec, std::size_t n) {
    try {
        HoloMap f = spec.schedule.at(n + spec.offset);
        check_schedule_map(f, n);
        return f;
    } catch (const InvalidMapError& e) {
        throw NotSelfMapError("schedule map " + std::to_string(n) + " is not a self-map: " + e.what(), 0.0, n);
    }
}

inline Model sequence_model(const SequenceSpec& spec) {
    if (auto m = spec.normalization.base.model()) return *m;
    for (std::size_t n = 1; n <= std::min<std::size_t>(spec.max_n, 8); ++n)
        if (auto m = schedule_map(spec, n).model()) return *m;
    return Model::disc;
}

}  // namespace detail

/// Left sequence, one map application per step and point.
/// conjugate_left(f) post-applies f^-n, accumulated as a fused matrix power.
inline Trajectories run_left(const SequenceSpec& spec, const std::vector<cplx>& points) {
    if (spec.side != Side::left) throw std::invalid_argument("run_left needs a left-side spec");
    Trajectories t;
    t.model = detail::sequence_model(spec);
    t.inputs = points;
    t.absorbed.assign(points.size(), false);
    t.values.reserve(spec.max_n + 1);
    t.values.push_back(points);

    const bool normalize = spec.normalization.kind == Normalization::Kind::conjugate_left;
    HoloMap step_inverse = Identity{};
    HoloMap post = Identity{};
    if (normalize) step_inverse = invert(spec.normalization.base);

    std::vector<cplx> state = points;
    for (std::size_t n = 1; n <= spec.max_n; ++n) {
        const HoloMap f = detail::schedule_map(spec, n);
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (t.absorbed[i]) continue;
            const cplx w = eval_raw(f, state[i]);
            switch (detail::classify_landing(t.model, w)) {
                case detail::Landing::escaped:
                    throw NotSelfMapError("left sequence left the model at step " + std::to_string(n), points[i], n);
                case detail::Landing::absorbed: t.absorbed[i] = true; [[fallthrough]];
                case detail::Landing::inside: state[i] = w;
            }
        }
        if (normalize) {
            post = compose(post, step_inverse);
            std::vector<cplx> row(state.size());
            for (std::size_t i = 0; i < state.size(); ++i) row[i] = eval_raw(post, state[i]);
            t.values.push_back(std::move(row));
        } else {
            t.values.push_back(state);
        }
    }
    return t;
}

/// Right sequence. The composite is extended on the right with matrix fusion,
/// so all-Mobius schedules cost O(1) per step; general schedules re-evaluate a
/// chain of length O(n). conjugate_right(g) pre-applies g^-n to the inputs.
inline Trajectories run_right(const SequenceSpec& spec, const std::vector<cplx>& points) {
    if (spec.side != Side::right) throw std::invalid_argument("run_right needs a right-side spec");
    if (spec.max_n > kMaxRightSteps) throw std::invalid_argument("right sequences are capped at 1e5 steps");
    Trajectories t;
    t.model = detail::sequence_model(spec);
    t.inputs = points;
    t.absorbed.assign(points.size(), false);
    t.values.reserve(spec.max_n + 1);
    t.values.push_back(points);

    const bool normalize = spec.normalization.kind == Normalization::Kind::conjugate_right;
    HoloMap step_inverse = Identity{};
    HoloMap pre = Identity{};
    if (normalize) step_inverse = invert(spec.normalization.base);

    HoloMap composite = Identity{};
    for (std::size_t n = 1; n <= spec.max_n; ++n) {
        const HoloMap g = detail::schedule_map(spec, n);
        composite = compose(composite, g);
        if (normalize) pre = compose(pre, step_inverse);
        std::vector<cplx> row(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const cplx w = eval_raw(composite, normalize ? eval_raw(pre, points[i]) : points[i]);
            switch (detail::classify_landing(t.model, w)) {
                case detail::Landing::escaped:
                    throw NotSelfMapError("right sequence left the model at step " + std::to_string(n), points[i], n);
                case detail::Landing::absorbed: t.absorbed[i] = true; break;
                case detail::Landing::inside: break;
            }
            row[i] = w;
        }
        t.values.push_back(std::move(row));
    }
    return t;
}

inline Trajectories run(const SequenceSpec& spec, const std::vector<cplx>& points) {
    return spec.side == Side::left ? run_left(spec, points) : run_right(spec, points);
}

// ---------------------------------------------------------------------------
// Deviation series

struct DeviationSeries {
    std::vector<double> sup;       // sup[n-1] = sup_z rho(f_n(z), base(z))
    std::vector<double> partial;   // running sums of sup
    bool summable = false;         // tail-vs-plateau heuristic
    bool vanishing = false;        // late entries small relative to early ones
    double tail_fraction = 0.0;    // (S_N - S_{N/2}) / S_N
};

/// Summable when the second half of the series adds at most 1% of the total.
inline bool summability_heuristic(const std::vector<double>& partial, double* tail_fraction = nullptr) {
    if (partial.empty()) return true;
    const double total = partial.back();
    const double half = partial[partial.size() / 2 == 0 ? 0 : partial.size() / 2 - 1];
    const double frac = total > 0.0 ? (total - half) / total : 0.0;
    if (tail_fraction) *tail_fraction = frac;
    return partial.size() >= 2 ? frac <= 0.01 : true;
}

inline DeviationSeries deviation_series_at(const Schedule& schedule, const HoloMap& base,
                                           const std::vector<cplx>& points, std::size_t N, std::size_t offset = 0) {
    if (N < 1) throw std::invalid_argument("deviation series needs N >= 1");
    DeviationSeries out;
    out.sup.reserve(N);
    out.partial.reserve(N);
    const Model model = model_or_disc(base);
    std::vector<cplx> base_img;
    base_img.reserve(points.size());
    for (cplx z : points) base_img.push_back(eval_raw(base, z));
    double running = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const HoloMap f = schedule.at(n + offset);
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) s = std::max(s, hyp_dist(model, eval_raw(f, points[i]), base_img[i]));
        out.sup.push_back(s);
        running += s;
        out.partial.push_back(running);
    }
    out.summable = summability_heuristic(out.partial, &out.tail_fraction);
    const std::size_t tenth = std::max<std::size_t>(1, N / 10);
    const double early = *std::max_element(out.sup.begin(), out.sup.begin() + static_cast<std::ptrdiff_t>(tenth));
    const double late = *std::max_element(out.sup.end() - static_cast<std::ptrdiff_t>(tenth), out.sup.end());
    out.vanishing = late <= 0.05 * early || late < 1e-12;
    return out;
}

/// sup over a deterministic sample of `region` of rho(schedule(n)(z), base(z)).
inline DeviationSeries deviation_series(const Schedule& schedule, const HoloMap& base, const HyperbolicDisc& region,
                                        std::size_t grid, std::size_t N, std::size_t offset = 0,
                                        std::uint64_t seed = 42) {
    std::vector<cplx> pts;
    for (const auto& p : sample_hyp_disc(region, grid, seed)) pts.push_back(p.value());
    return deviation_series_at(schedule, base, pts, N, offset);
}

// ---------------------------------------------------------------------------
// Convergence detection

enum class Verdict { constant_limit, nonconstant_limit, divergent, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::constant_limit: return "constant_limit";
        case Verdict::nonconstant_limit: return "nonconstant_limit";
        case Verdict::divergent: return "divergent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct ConvergenceReport {
    Verdict verdict = Verdict::inconclusive;
    Model model = Model::disc;
    std::optional<cplx> limit_point;       // native coordinates, when representable
    std::optional<cplx> limit_point_disc;  // disc coordinates (boundary limits included)
    std::vector<std::pair<cplx, cplx>> limit_grid;  // (input, limit value)
    std::vector<double> deviation_series;  // per-n sup over points of |T_n - T_{n-1}| (disc coordinates)
    std::vector<cplx> witnesses;           // accumulation values for a divergent verdict
    std::string witness;
    // detector settings, echoed so verdicts state the criteria they used
    double tol = 0.0;
    std::size_t window = 0;
    double nonconst_threshold = 0.0;
    std::size_t grid = 0;
    std::size_t steps = 0;
};

struct DetectorSettings {
    double tol = 1e-8;
    std::size_t window = 50;
    double nonconst_threshold = 1e-3;
};

/// Non-constancy threshold d/2 with d = rho(a, b) / 3.
inline double separation_threshold(Model model, cplx a, cplx b) { return hyp_dist(model, a, b) / 6.0; }

namespace detail {

struct ClusterPair {
    cplx first, second;
    std::size_t entries_first = 0, entries_second = 0;
    double separation = 0.0;
};

/// Most separated pair of grid cells that the sequence re-enters at least
/// `min_entries` times each. Cells are squares of side `cell`.
inline std::optional<ClusterPair> recurring_clusters(const std::vector<cplx>& xs, double cell, std::size_t min_entries,
                                                     double min_separation) {
    struct Cell {
        std::size_t entries = 0;
        cplx sum = 0.0;
        std::size_t count = 0;
    };
    std::map<std::pair<long long, long long>, Cell> cells;
    std::pair<long long, long long> prev{std::numeric_limits<long long>::min(), 0};
    for (cplx x : xs) {
        const std::pair<long long, long long> key{static_cast<long long>(std::floor(x.real() / cell)),
                                                  static_cast<long long>(std::floor(x.imag() / cell))};
        Cell& c = cells[key];
        if (key != prev) ++c.entries;
        c.sum += x;
        ++c.count;
        prev = key;
    }
    std::vector<cplx> centers;
    std::vector<std::size_t> entries;
    for (const auto& [key, c] : cells) {
        if (c.entries >= min_entries) {
            centers.push_back(c.sum / static_cast<double>(c.count));
            entries.push_back(c.entries);
        }
    }
    std::optional<ClusterPair> best;
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double sep = std::abs(centers[i] - centers[j]);
            if (sep > min_separation && sep > 2.0 * cell && (!best || sep > best->separation))
                best = ClusterPair{centers[j], centers[i], entries[j], entries[i], sep};
        }
    return best;
}

}  // namespace detail

/// Classify trajectories as constant limit, non-constant limit, divergent or
/// inconclusive.
///
/// - constant_limit: over the trailing window every value lies within tol of one
///   common value (Euclidean metric on the closed disc).
/// - nonconstant_limit: each point is Cauchy within tol in rho over the window and
///   two limit values are rho-separated by more than nonconst_threshold.
/// - divergent: the window is not Cauchy (spread > 10 tol) and, after the first
///   `window` steps, the point re-enters two separated cells either >= 3 times each
///   (oscillation) or >= 2 times each with non-summable step lengths (drift).
inline ConvergenceReport detect_convergence(const Trajectories& t, const DetectorSettings& cfg = {}) {
    ConvergenceReport rep;
    rep.model = t.model;
    rep.tol = cfg.tol;
    rep.window = cfg.window;
    rep.nonconst_threshold = cfg.nonconst_threshold;
    rep.grid = t.points();
    rep.steps = t.steps();
    const std::size_t N = t.steps();
    const std::size_t P = t.points();
    if (P == 0 || N == 0) return rep;

    auto disc = [&](cplx z) { return detail::orbit_disc_coord(t.model, z); };

    rep.deviation_series.reserve(N);
    for (std::size_t n = 1; n <= N; ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < P; ++i) s = std::max(s, std::abs(disc(t.values[n][i]) - disc(t.values[n - 1][i])));
        rep.deviation_series.push_back(s);
    }

    const std::size_t W = std::min(cfg.window, N);
    const std::size_t first = N - W + 1 > 0 ? N + 1 - W : 1;
    const auto& last = t.values[N];

    // constant limit
    const cplx common = disc(last[0]);
    double spread = 0.0;
    for (std::size_t n = first; n <= N; ++n)
        for (std::size_t i = 0; i < P; ++i) spread = std::max(spread, std::abs(disc(t.values[n][i]) - common));
    if (spread <= cfg.tol) {
        rep.verdict = Verdict::constant_limit;
        rep.limit_point_disc = common;
        if (detail::classify_landing(t.model, last[0]) == detail::Landing::inside) rep.limit_point = last[0];
        return rep;
    }

    // non-constant limit
    bool cauchy = true;
    for (std::size_t i = 0; i < P && cauchy; ++i) {
        if (t.absorbed[i]) {
            cauchy = false;
            break;
        }
        for (std::size_t n = first; n <= N; ++n)
            if (!(hyp_dist(t.model, t.values[n][i], last[i]) <= cfg.tol)) {
                cauchy = false;
                break;
            }
    }
    if (cauchy) {
        double sep = 0.0;
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < i; ++j) sep = std::max(sep, hyp_dist(t.model, last[i], last[j]));
        if (sep > cfg.nonconst_threshold) {
            rep.verdict = Verdict::nonconstant_limit;
            for (std::size_t i = 0; i < P; ++i) rep.limit_grid.emplace_back(t.inputs[i], last[i]);
            return rep;
        }
    }

    // divergence
    const std::size_t skip = std::min(cfg.window, N / 2);
    for (std::size_t i = 0; i < P; ++i) {
        double window_spread = 0.0;
        for (std::size_t n = first; n <= N; ++n)
            window_spread = std::max(window_spread, std::abs(disc(t.values[n][i]) - disc(last[i])));
        if (!(window_spread > 10.0 * cfg.tol)) continue;

        std::vector<cplx> xs;
        xs.reserve(N + 1 - skip);
        double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
        for (std::size_t n = skip; n <= N; ++n) {
            const cplx x = disc(t.values[n][i]);
            xs.push_back(x);
            lo_re = std::min(lo_re, x.real());
            hi_re = std::max(hi_re, x.real());
            lo_im = std::min(lo_im, x.imag());
            hi_im = std::max(hi_im, x.imag());
        }
        const double diameter = std::hypot(hi_re - lo_re, hi_im - lo_im);
        const double cell = std::max(10.0 * cfg.tol, diameter / 20.0);

        std::optional<detail::ClusterPair> pair = detail::recurring_clusters(xs, cell, 3, 10.0 * cfg.tol);
        std::string mode = "oscillation";
        if (!pair) {
            std::vector<double> partial;
            partial.reserve(xs.size());
            double acc = 0.0;
            for (std::size_t k = 1; k < xs.size(); ++k) partial.push_back(acc += std::abs(xs[k] - xs[k - 1]));
            if (!summability_heuristic(partial)) {
                pair = detail::recurring_clusters(xs, cell, 2, 10.0 * cfg.tol);
                mode = "drift";
            }
        }
        if (pair) {
            rep.verdict = Verdict::divergent;
            rep.witnesses = {pair->first, pair->second};
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "point %zu: %s between (%.6g, %.6g) [%zu entries] and (%.6g, %.6g) [%zu entries], separation %.6g",
                          i, mode.c_str(), pair->first.real(), pair->first.imag(), pair->entries_first,
                          pair->second.real(), pair->second.imag(), pair->entries_second, pair->separation);
            rep.witness = buf;
            return rep;
        }
    }
    return rep;
}

inline std::string Schedule::label() const {
    if (gen_) return label_;
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, schedule::Constant>) return "constant";
            else if constexpr (std::is_same_v<T, schedule::List>) return "list";
            else if constexpr (std::is_same_v<T, schedule::Perturbed>) return std::string("perturbed/") + perturbation_name(s.kind);
            else if constexpr (std::is_same_v<T, schedule::RandomAffine>) return "random_affine";
            else return "oscillating_blocks";
        },
        *spec_);
}

}  // namespace dwlab
