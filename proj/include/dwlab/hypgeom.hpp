#pragma once

// Hyperbolic geometry on the unit disc and the upper half-plane.
//
// Distances are evaluated from the pseudo-hyperbolic quotient p together with
// an independently computed 1 - p^2, which keeps the result accurate when p
// is close to 1 (points near the boundary or far apart).

#include <dwlab/errors.hpp>
#include <dwlab/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab {

using cplx = std::complex<double>;

/// Points closer than this to the boundary of their model are rejected.
inline constexpr double kBoundaryGuard = 1e-14;

enum class Model { disc, halfplane };

inline const char* to_string(Model m) { return m == Model::disc ? "disc" : "halfplane"; }

namespace detail {

inline std::string fmt_point(cplx z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", z.real(), z.imag());
    return buf;
}

/// 1 - |z|^2 with a single rounding per fma.
inline double one_minus_abs2(cplx z) {
    return std::fma(-z.real(), z.real(), std::fma(-z.imag(), z.imag(), 1.0));
}

/// 2 artanh(p) given p and 1 - p^2 computed separately.
inline double two_artanh(double p, double one_minus_p2) {
    if (p < 0.5) return 2.0 * std::atanh(p);
    return 2.0 * std::log1p(p) - std::log(one_minus_p2);
}

}  // namespace detail

/// Point of the open unit disc, at least kBoundaryGuard away from the circle.
class DiscPoint {
public:
    DiscPoint() = default;
    DiscPoint(double re, double im) : DiscPoint(cplx(re, im)) {}
    explicit DiscPoint(cplx z) : z_(z) {
        if (!(std::abs(z) < 1.0 - kBoundaryGuard))
            throw BoundaryGuardError("disc point " + detail::fmt_point(z) + " violates the boundary guard");
    }

    cplx value() const { return z_; }
    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }

    friend bool operator==(const DiscPoint&, const DiscPoint&) = default;

private:
    cplx z_{0.0, 0.0};
};

/// Point of the upper half-plane with imaginary part above kBoundaryGuard.
class HalfPlanePoint {
public:
    HalfPlanePoint() = default;
    HalfPlanePoint(double re, double im) : HalfPlanePoint(cplx(re, im)) {}
    explicit HalfPlanePoint(cplx z) : z_(z) {
        if (!(z.imag() > kBoundaryGuard) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw BoundaryGuardError("half-plane point " + detail::fmt_point(z) + " violates the boundary guard");
    }

    cplx value() const { return z_; }
    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }

    friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;

private:
    cplx z_{0.0, 1.0};
};

/// Pseudo-hyperbolic distance |z - w| / |1 - conj(z) w| on the disc.
inline double pseudo_hyperbolic(cplx z, cplx w) {
    return std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
}

/// Hyperbolic distance for the metric 2|dz|/(1-|z|^2) on raw disc coordinates.
inline double hyp_dist_disc(cplx z, cplx w) {
    const cplx den = 1.0 - std::conj(z) * w;
    const double den2 = std::norm(den);
    const double p = std::abs(z - w) / std::sqrt(den2);
    if (p < 0.5) return 2.0 * std::atanh(p);
    const double one_minus_p2 = detail::one_minus_abs2(z) * detail::one_minus_abs2(w) / den2;
    return detail::two_artanh(p, one_minus_p2);
}

inline double hyp_dist_disc(const DiscPoint& z, const DiscPoint& w) { return hyp_dist_disc(z.value(), w.value()); }

/// The same distance through sinh(rho/2) = |z-w| / sqrt((1-|z|^2)(1-|w|^2)).
inline double hyp_dist_disc_sinh(cplx z, cplx w) {
    const double s = std::abs(z - w) / std::sqrt(detail::one_minus_abs2(z) * detail::one_minus_abs2(w));
    return 2.0 * std::asinh(s);
}

/// Hyperbolic distance on the upper half-plane, 2 artanh(|z-w| / |z - conj(w)|).
inline double hyp_dist_halfplane(cplx z, cplx w) {
    const double den = std::abs(z - std::conj(w));
    const double p = std::abs(z - w) / den;
    if (p < 0.5) return 2.0 * std::atanh(p);
    const double one_minus_p2 = 4.0 * z.imag() * w.imag() / (den * den);
    return detail::two_artanh(p, one_minus_p2);
}

inline double hyp_dist_halfplane(const HalfPlanePoint& z, const HalfPlanePoint& w) {
    return hyp_dist_halfplane(z.value(), w.value());
}

inline double hyp_dist(Model model, cplx z, cplx w) {
    return model == Model::disc ? hyp_dist_disc(z, w) : hyp_dist_halfplane(z, w);
}

// Cayley transform, fixed as z -> (z - i)/(z + i) from H onto D.

inline cplx cayley_to_disc_raw(cplx z) {
    const cplx i(0.0, 1.0);
    return (z - i) / (z + i);
}

inline cplx cayley_to_halfplane_raw(cplx w) {
    const cplx i(0.0, 1.0);
    return i * (1.0 + w) / (1.0 - w);
}

inline DiscPoint cayley_to_disc(const HalfPlanePoint& z) { return DiscPoint(cayley_to_disc_raw(z.value())); }

inline HalfPlanePoint cayley_to_halfplane(const DiscPoint& w) {
    return HalfPlanePoint(cayley_to_halfplane_raw(w.value()));
}

/// Map a raw point of either model into the disc model.
inline cplx to_disc(Model model, cplx z) { return model == Model::disc ? z : cayley_to_disc_raw(z); }

/// Open hyperbolic disc D(center, radius) in the unit disc.
class HyperbolicDisc {
public:
    HyperbolicDisc(DiscPoint center, double radius) : center_(center), radius_(radius) {
        if (!(radius >= 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("hyperbolic disc radius must be finite and nonnegative");
        const double t = std::tanh(0.5 * radius);
        const double c2 = std::norm(center.value());
        const double far = (std::sqrt(c2) + t) / (1.0 + std::sqrt(c2) * t);
        if (!(far < 1.0 - kBoundaryGuard))
            throw BoundaryGuardError("hyperbolic disc of radius " + std::to_string(radius) +
                                     " reaches the boundary guard");
    }

    const DiscPoint& center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(cplx z, double slack = 0.0) const { return hyp_dist_disc(center_.value(), z) <= radius_ + slack; }

private:
    DiscPoint center_;
    double radius_;
};

struct EuclideanDisc {
    cplx center;
    double radius;
};

/// Euclidean disc with the same point set as `d`.
inline EuclideanDisc hyp_disc_to_euclidean(const HyperbolicDisc& d) {
    const double t = std::tanh(0.5 * d.radius());
    const cplx c = d.center().value();
    const double c2 = std::norm(c);
    const double den = 1.0 - c2 * t * t;
    return {c * (1.0 - t * t) / den, t * (1.0 - c2) / den};
}

/// Disc automorphism sending 0 to c.
inline cplx translate_from_origin(cplx c, cplx z) { return (z + c) / (1.0 + std::conj(c) * z); }

/// Point at hyperbolic distance `dist` from `c` in direction `angle` (measured at the origin chart).
inline cplx point_at(cplx c, double dist, double angle) {
    return translate_from_origin(c, std::polar(std::tanh(0.5 * dist), angle));
}

/// Deterministic sample of a hyperbolic disc: the center, concentric hyperbolic
/// circles, then seeded points uniform in hyperbolic area. All points lie in `d`.
inline std::vector<DiscPoint> sample_hyp_disc(const HyperbolicDisc& d, std::size_t n, std::uint64_t seed) {
    std::vector<DiscPoint> out;
    if (n == 0) return out;
    out.reserve(n);
    const cplx c = d.center().value();
    const double r = d.radius();
    out.emplace_back(d.center());
    if (n == 1) return out;

    const std::size_t rest = n - 1;
    const std::size_t grid = rest / 2 + rest % 2;
    const std::size_t random = rest - grid;

    // Ring j of J holds roughly a share proportional to j.
    const auto rings = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(static_cast<double>(grid) / 3.0))));
    const std::size_t weight_total = rings * (rings + 1) / 2;
    std::size_t placed = 0;
    const double shrink = 1.0 - 1e-9;
    for (std::size_t j = 1; j <= rings; ++j) {
        std::size_t count = (j == rings) ? grid - placed : grid * j / weight_total;
        if (count == 0) continue;
        const double dist = r * shrink * static_cast<double>(j) / static_cast<double>(rings);
        const double phase = 0.5 * static_cast<double>(j);  // staggers rings
        for (std::size_t k = 0; k < count; ++k) {
            const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            out.emplace_back(point_at(c, dist, a));
        }
        placed += count;
    }

    Rng rng = Rng::stream(seed, "sample_hyp_disc");
    const double cosh_r = std::cosh(r * shrink);
    for (std::size_t k = 0; k < random; ++k) {
        const double u = rng.uniform();
        const double dist = std::acosh(1.0 + u * (cosh_r - 1.0));
        out.emplace_back(point_at(c, dist, rng.angle()));
    }
    return out;
}

/// Evenly spaced points on the hyperbolic circle of radius `dist` about `c`.
inline std::vector<cplx> hyp_circle(cplx c, double dist, std::size_t count) {
    std::vector<cplx> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(point_at(c, dist, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count)));
    return out;
}

}  // namespace dwlab
