#pragma once

// Classification of self-maps of the disc (identity, elliptic, interior or
// boundary Denjoy-Wolff point), iteration-based Denjoy-Wolff detection and
// sampled Schwarz-Pick contraction constants.

#include <dwlab/holomap.hpp>
#include <dwlab/hypgeom.hpp>

#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>
#include <numbers>
#include <variant>

namespace dwlab {

namespace mapclass {
struct Identity {};
struct EllipticFiniteOrder {
    unsigned order;
    cplx fixed_point;
    double angle;  // rotation angle at the fixed point, in (-pi, pi]
};
struct EllipticInfiniteOrder {
    cplx fixed_point;
    double angle;
};
struct InteriorDW {
    DiscPoint zeta;
    double multiplier;  // |f'(zeta)|, NaN when unknown
};
struct BoundaryDW {
    cplx zeta;  // |zeta| = 1
};
}  // namespace mapclass

/// Outcome of classify(); all points are in disc coordinates.
using MapClass = std::variant<mapclass::Identity, mapclass::EllipticFiniteOrder, mapclass::EllipticInfiniteOrder,
                              mapclass::InteriorDW, mapclass::BoundaryDW>;

inline std::string class_name(const MapClass& c) {
    static constexpr std::array names{"Identity", "EllipticFiniteOrder", "EllipticInfiniteOrder", "InteriorDW",
                                      "BoundaryDW"};
    return names[c.index()];
}

inline bool is_elliptic_or_identity(const MapClass& c) {
    return std::holds_alternative<mapclass::Identity>(c) || std::holds_alternative<mapclass::EllipticFiniteOrder>(c) ||
           std::holds_alternative<mapclass::EllipticInfiniteOrder>(c);
}

/// Rotation-angle order detection.
///
/// Walks the continued-fraction convergents p/q of angle/2pi with q <= max_denominator
/// and returns the first q with |q angle - 2 pi p| <= tol. Zero means no such q
/// (treated as infinite order). Heuristic: floating point cannot decide rationality.
inline unsigned rational_angle_order(double angle, double tol = 1e-9, unsigned max_denominator = 1000000) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double theta = angle - two_pi * std::floor(angle / two_pi);  // [0, 2pi)
    if (theta <= tol || two_pi - theta <= tol) return 1;
    const double x = theta / two_pi;
    double h_prev = 1.0, h = 0.0;
    double k_prev = 0.0, k = 1.0;
    double rem = x;
    for (int iter = 0; iter < 64 && rem > 0.0; ++iter) {
        const double inv = 1.0 / rem;
        const double a = std::floor(inv);
        rem = inv - a;
        const double h_next = a * h + h_prev;
        const double k_next = a * k + k_prev;
        if (k_next > max_denominator) break;
        h_prev = std::exchange(h, h_next);
        k_prev = std::exchange(k, k_next);
        if (std::abs(k * theta - two_pi * h) <= tol) return static_cast<unsigned>(k);
    }
    return 0;
}

struct DenjoyWolffPoint {
    cplx zeta;  // disc coordinates
    bool interior;
    std::size_t iterations;
};

namespace detail {

inline std::array<cplx, 5> spread_seeds(Model model) {
    if (model == Model::disc) return {cplx(0.0, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.5), cplx(-0.5, 0.0), cplx(0.0, -0.5)};
    return {cplx(0.0, 1.0), cplx(1.0, 1.0), cplx(-1.0, 1.0), cplx(0.0, 2.0), cplx(0.0, 0.5)};
}

/// Disc coordinate of an orbit point; far-out half-plane points collapse to 1.
inline cplx orbit_disc_coord(Model model, cplx z) {
    if (model == Model::disc) return z;
    if (std::abs(z) > 1e150 || !std::isfinite(std::abs(z))) return cplx(1.0, 0.0);
    return cayley_to_disc_raw(z);
}

}  // namespace detail

/// Denjoy-Wolff point by iteration from five spread seeds.
///
/// Interior: all orbits settle (estimated remaining distance below tol) on a
/// common point with rho-diameter below tol. Boundary: all orbits pass modulus
/// 1 - 10 eps_B and their arguments stay within tol over a 20-iterate window.
inline DenjoyWolffPoint denjoy_wolff(const HoloMap& m, double tol = 1e-10, std::size_t max_iter = 1000000) {
    constexpr std::size_t kArgWindow = 20;
    const double escape = 1.0 - 10.0 * kBoundaryGuard;
    const Model model = model_or_disc(m);
    auto seeds = detail::spread_seeds(model);
    std::array<cplx, 5> z = seeds;
    std::array<double, 5> prev_step{};
    prev_step.fill(std::numeric_limits<double>::infinity());
    std::deque<std::array<double, 5>> args;

    for (std::size_t it = 1; it <= max_iter; ++it) {
        std::array<cplx, 5> disc{};
        bool all_escaped = true;
        bool all_settled = true;
        for (std::size_t s = 0; s < 5; ++s) {
            const cplx prev_disc = detail::orbit_disc_coord(model, z[s]);
            cplx w = eval_raw(m, z[s]);
            if (model == Model::halfplane && w.imag() <= 0.0 && w.imag() > -1e-9 * std::max(1.0, std::abs(w)))
                w.imag(kBoundaryGuard);
            disc[s] = detail::orbit_disc_coord(model, w);
            if (!std::isfinite(disc[s].real()) || !std::isfinite(disc[s].imag()) || std::abs(disc[s]) > 1.0 + 1e-9)
                throw NotSelfMapError("orbit left the model during Denjoy-Wolff iteration", seeds[s], it);
            z[s] = w;
            if (!(std::abs(disc[s]) > escape)) all_escaped = false;

            if (std::abs(disc[s]) >= 1.0 || std::abs(prev_disc) >= 1.0) {
                all_settled = false;
                continue;
            }
            // remaining distance to the limit, from the geometric decay of step lengths
            const double step = hyp_dist_disc(prev_disc, disc[s]);
            const double ratio = step / prev_step[s];
            const double remaining = ratio < 0.999999 ? step / (1.0 - ratio) : std::numeric_limits<double>::infinity();
            if (!(remaining < tol) && step != 0.0) all_settled = false;
            prev_step[s] = step;
        }

        if (all_settled) {
            double diam = 0.0;
            for (std::size_t s = 1; s < 5; ++s) diam = std::max(diam, hyp_dist_disc(disc[0], disc[s]));
            // Orbits frozen by rounding just inside the circle are boundary limits.
            if (diam < tol) {
                if (std::abs(disc[0]) > escape) return {disc[0] / std::abs(disc[0]), false, it};
                return {disc[0], true, it};
            }
        }

        if (all_escaped) {
            std::array<double, 5> a{};
            for (std::size_t s = 0; s < 5; ++s) a[s] = std::arg(disc[s]);
            args.push_back(a);
            if (args.size() > kArgWindow) args.pop_front();
            if (args.size() == kArgWindow) {
                const double ref = args.back()[0];
                double spread = 0.0;
                for (const auto& row : args)
                    for (double v : row) spread = std::max(spread, std::abs(std::remainder(v - ref, 2.0 * std::numbers::pi)));
                if (spread < tol) return {std::polar(1.0, ref), false, it};
            }
        } else {
            args.clear();
        }
    }
    throw InconclusiveError("Denjoy-Wolff iteration did not settle within " + std::to_string(max_iter) + " iterations");
}

/// Finite fixed points of a Mobius matrix: roots of c z^2 + (d - a) z - b = 0,
/// by the cancellation-free quadratic formula. A double root is listed twice.
inline std::vector<cplx> mobius_fixed_points(const Mobius& raw) {
    const Mobius m = detail::normalize(raw);
    const double scale = std::max(1.0, detail::mobius_scale(m));
    std::vector<cplx> fixed;
    const cplx A = m.c, B = m.d - m.a, C = -m.b;
    if (std::abs(A) <= 1e-14 * scale) {
        if (std::abs(B) > 1e-14 * scale) fixed.push_back(-C / B);
    } else {
        const cplx disc = std::sqrt(B * B - 4.0 * A * C);
        const cplx q = -0.5 * (B + (std::real(std::conj(B) * disc) >= 0.0 ? disc : -disc));
        const cplx r1 = q / A;
        fixed.push_back(r1);
        if (std::abs(q) > 0.0) fixed.push_back(C / q);
        else fixed.push_back(r1);
    }
    return fixed;
}

namespace detail {

/// Fixed-point analysis of a normalized disc-model Mobius self-map.
inline MapClass classify_mobius(const Mobius& raw, const HoloMap& original, double tol) {
    const Mobius m = normalize(raw);
    const double scale = std::max(1.0, mobius_scale(m));
    for (double s : {1.0, -1.0}) {
        if (std::abs(m.a - s) <= 1e-12 * scale && std::abs(m.d - s) <= 1e-12 * scale && std::abs(m.b) <= 1e-12 * scale &&
            std::abs(m.c) <= 1e-12 * scale)
            return mapclass::Identity{};
    }

    const std::vector<cplx> fixed = mobius_fixed_points(m);

    const bool automorphism = is_automorphism(m);
    for (cplx z : fixed) {
        if (std::abs(z) < 1.0 - 1e-9) {
            const cplx lambda = m.derivative(z);
            if (automorphism) {
                const double angle = std::arg(lambda);
                const unsigned order = rational_angle_order(angle);
                if (order == 1) return mapclass::Identity{};
                if (order > 1) return mapclass::EllipticFiniteOrder{order, z, angle};
                return mapclass::EllipticInfiniteOrder{z, angle};
            }
            const DiscPoint zeta(z);
            const double residual = hyp_dist_disc(eval_raw(original, z), z);
            if (!(residual < tol))
                throw InconclusiveError("fixed-point residual " + std::to_string(residual) + " exceeds tolerance");
            return mapclass::InteriorDW{zeta, std::abs(lambda)};
        }
    }
    // No interior fixed point: the attracting (|f'| <= 1) fixed point on the circle.
    std::optional<cplx> best;
    double best_mult = std::numeric_limits<double>::infinity();
    for (cplx z : fixed) {
        if (std::abs(std::abs(z) - 1.0) > 1e-6) continue;
        const double mult = std::abs(m.derivative(z));
        if (mult < best_mult) {
            best_mult = mult;
            best = z;
        }
    }
    if (fixed.size() < 2 && std::abs(m.c) <= 1e-14 * scale && std::abs(m.d - m.a) <= 1e-14 * scale)
        throw InconclusiveError("translation-type Mobius map has its only fixed point at infinity");
    if (!best || best_mult > 1.0 + 1e-6)
        throw InconclusiveError("no attracting fixed point found in the closed disc");
    return mapclass::BoundaryDW{*best / std::abs(*best)};
}

}  // namespace detail

/// Classify a self-map.
///
/// Mobius-type maps use fixed-point analysis of the normalized matrix (half-plane
/// maps are conjugated into the disc). Other maps are classified by iteration and
/// are never reported as identity or elliptic.
inline MapClass classify(const HoloMap& m, double tol = 1e-9, std::size_t max_iter = 1000000) {
    if (auto mm = as_mobius(m)) return detail::classify_mobius(to_disc_model(*mm), m, tol);
    const DenjoyWolffPoint dw = denjoy_wolff(m, tol * 0.1, max_iter);
    if (dw.interior) {
        const Model model = model_or_disc(m);
        cplx native = model == Model::disc ? dw.zeta : cayley_to_halfplane_raw(dw.zeta);
        const cplx image = detail::orbit_disc_coord(model, eval_raw(m, native));
        const double residual = hyp_dist_disc(image, dw.zeta);
        if (!(residual < tol))
            throw InconclusiveError("interior Denjoy-Wolff residual " + std::to_string(residual) + " exceeds tolerance");
        return mapclass::InteriorDW{DiscPoint(dw.zeta), std::numeric_limits<double>::quiet_NaN()};
    }
    return mapclass::BoundaryDW{dw.zeta};
}

/// Largest sampled ratio rho(m z, m w) / rho(z, w) over pairs in `region`,
/// clamped to [0, 1]. A lower estimate of the contraction constant on the region.
inline double contraction_constant(const HoloMap& m, const HyperbolicDisc& region, std::size_t samples,
                                   std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("contraction_constant needs at least two samples");
    if (is_automorphism(m))
        throw NotAutomorphismError("contraction constant of an automorphism is exactly 1");
    if (m.model() == Model::halfplane) throw ModelMismatchError("contraction_constant expects a disc map");
    const auto pts = sample_hyp_disc(region, samples, seed);
    std::vector<cplx> img;
    img.reserve(pts.size());
    for (const auto& p : pts) img.push_back(eval_raw(m, p.value()));
    double k = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double base = hyp_dist_disc(pts[i].value(), pts[j].value());
            if (base < 1e-9) continue;
            k = std::max(k, hyp_dist_disc(img[i], img[j]) / base);
        }
    }
    return std::clamp(k, 0.0, 1.0);
}

}  // namespace dwlab
