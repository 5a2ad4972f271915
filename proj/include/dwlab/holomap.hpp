#pragma once

// Holomorphic self-maps of the disc and the half-plane: representation,
// evaluation, composition and inversion.

#include <dwlab/errors.hpp>
#include <dwlab/hypgeom.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace dwlab {

struct Identity {
    friend bool operator==(const Identity&, const Identity&) = default;
};

/// z -> (a z + b) / (c z + d), normalized so that ad - bc = 1.
struct Mobius {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
    Model model = Model::disc;

    cplx det() const { return a * d - b * c; }
    cplx operator()(cplx z) const { return (a * z + b) / (c * z + d); }
    cplx derivative(cplx z) const {
        const cplx den = c * z + d;
        return det() / (den * den);
    }

    friend bool operator==(const Mobius&, const Mobius&) = default;
};

/// z -> a z + b on the disc.
struct Affine {
    cplx a{1.0}, b{0.0};
    cplx operator()(cplx z) const { return a * z + b; }
    friend bool operator==(const Affine&, const Affine&) = default;
};

struct BlaschkeFactor {
    DiscPoint zero;
    unsigned exponent = 1;
    friend bool operator==(const BlaschkeFactor&, const BlaschkeFactor&) = default;
};

/// rotation * prod ((z - a_j) / (1 - conj(a_j) z))^{k_j}
struct Blaschke {
    std::vector<BlaschkeFactor> factors;
    cplx rotation{1.0};

    unsigned degree() const {
        unsigned n = 0;
        for (const auto& f : factors) n += f.exponent;
        return n;
    }
    cplx operator()(cplx z) const {
        cplx out = rotation;
        for (const auto& f : factors) {
            const cplx a = f.zero.value();
            const cplx q = (z - a) / (1.0 - std::conj(a) * z);
            for (unsigned k = 0; k < f.exponent; ++k) out *= q;
        }
        return out;
    }
    friend bool operator==(const Blaschke&, const Blaschke&) = default;
};

/// z -> offset + exp(i * frequency * z) on the half-plane.
struct HalfPlaneExp {
    HalfPlanePoint offset{0.0, 1.0};
    double frequency = 1.0;
    cplx operator()(cplx z) const { return offset.value() + std::exp(cplx(0.0, frequency) * z); }
    friend bool operator==(const HalfPlaneExp&, const HalfPlaneExp&) = default;
};

class HoloMap;

/// chain[0] o chain[1] o ... o chain.back(); the last element is applied first.
struct Composite {
    std::vector<HoloMap> chain;
};

class HoloMap {
public:
    using Rep = std::variant<Identity, Mobius, Affine, Blaschke, HalfPlaneExp, Composite>;

    HoloMap() : rep_(Identity{}) {}
    HoloMap(Identity v) : rep_(v) {}
    HoloMap(Mobius v) : rep_(v) {}
    HoloMap(Affine v) : rep_(v) {}
    HoloMap(Blaschke v) : rep_(std::move(v)) {}
    HoloMap(HalfPlaneExp v) : rep_(v) {}
    HoloMap(Composite v) : rep_(std::move(v)) {}

    const Rep& rep() const { return rep_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&rep_);
    }
    template <class T>
    bool is() const {
        return std::holds_alternative<T>(rep_);
    }

    /// Model the map acts on; empty for maps that act on either (the identity).
    std::optional<Model> model() const;

    friend bool operator==(const HoloMap& x, const HoloMap& y) { return x.rep_ == y.rep_; }

private:
    Rep rep_;
};

inline bool operator==(const Composite& x, const Composite& y) { return x.chain == y.chain; }

inline std::optional<Model> HoloMap::model() const {
    return std::visit(
        [](const auto& m) -> std::optional<Model> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Identity>) return std::nullopt;
            else if constexpr (std::is_same_v<T, Mobius>) return m.model;
            else if constexpr (std::is_same_v<T, HalfPlaneExp>) return Model::halfplane;
            else if constexpr (std::is_same_v<T, Composite>) {
                for (const auto& e : m.chain)
                    if (auto mm = e.model()) return mm;
                return std::nullopt;
            } else return Model::disc;
        },
        rep_);
}

/// Model used for evaluation, defaulting to the disc for model-free maps.
inline Model model_or_disc(const HoloMap& m) { return m.model().value_or(Model::disc); }

/// Apply the map with no domain checks.
inline cplx eval_raw(const HoloMap& m, cplx z) {
    return std::visit(
        [z](const auto& f) -> cplx {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Identity>) return z;
            else if constexpr (std::is_same_v<T, Composite>) {
                cplx w = z;
                for (auto it = f.chain.rbegin(); it != f.chain.rend(); ++it) w = eval_raw(*it, w);
                return w;
            } else return f(z);
        },
        m.rep());
}

/// True when `z` is a guarded point of `model`.
inline bool in_domain(Model model, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return model == Model::disc ? std::abs(z) < 1.0 - kBoundaryGuard : z.imag() > kBoundaryGuard;
}

/// Apply the map; throws NotSelfMapError if the image leaves the model domain.
inline cplx eval(const HoloMap& m, cplx z) {
    const cplx w = eval_raw(m, z);
    const Model model = model_or_disc(m);
    if (!in_domain(model, w))
        throw NotSelfMapError("image " + detail::fmt_point(w) + " of " + detail::fmt_point(z) + " leaves the " +
                                  to_string(model) + " model",
                              z);
    return w;
}

inline DiscPoint eval(const HoloMap& m, const DiscPoint& z) {
    if (m.model() == Model::halfplane) throw ModelMismatchError("half-plane map applied to a disc point");
    return DiscPoint(eval(m, z.value()));
}

inline HalfPlanePoint eval(const HoloMap& m, const HalfPlanePoint& z) {
    if (m.model() == Model::disc) throw ModelMismatchError("disc map applied to a half-plane point");
    return HalfPlanePoint(eval(m, z.value()));
}

// ---------------------------------------------------------------------------
// Matrix helpers

namespace detail {

inline double mobius_scale(const Mobius& m) {
    return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

/// Divide by sqrt(det); entries already at det 1 (to rounding) are left bit-identical.
inline Mobius normalize(Mobius m) {
    const cplx det = m.det();
    if (std::abs(det - 1.0) <= 1e-14) return m;
    const cplx s = std::sqrt(det);
    m.a /= s;
    m.b /= s;
    m.c /= s;
    m.d /= s;
    return m;
}

inline Mobius multiply(const Mobius& x, const Mobius& y) {
    Mobius r{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d, x.model};
    return normalize(r);
}

inline Mobius inverse(const Mobius& m) { return {m.d, -m.b, -m.c, m.a, m.model}; }

/// Cayley matrices: to_disc sends H onto D, from_disc its inverse.
inline Mobius cayley_matrix_to_disc() {
    return normalize({1.0, cplx(0.0, -1.0), 1.0, cplx(0.0, 1.0), Model::disc});
}
inline Mobius cayley_matrix_from_disc() { return inverse(cayley_matrix_to_disc()); }

}  // namespace detail

/// Matrix form of maps that are Mobius transformations (Identity, Mobius,
/// Affine, Blaschke of degree <= 1, composites of those). Model follows the map.
inline std::optional<Mobius> as_mobius(const HoloMap& m) {
    return std::visit(
        [](const auto& f) -> std::optional<Mobius> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Identity>) return Mobius{};
            else if constexpr (std::is_same_v<T, Mobius>) return f;
            else if constexpr (std::is_same_v<T, Affine>) {
                if (f.a == cplx(0.0)) return std::nullopt;
                return detail::normalize(Mobius{f.a, f.b, 0.0, 1.0, Model::disc});
            } else if constexpr (std::is_same_v<T, Blaschke>) {
                if (f.degree() == 0) return detail::normalize(Mobius{f.rotation, 0.0, 0.0, 1.0, Model::disc});
                if (f.degree() != 1) return std::nullopt;
                cplx z0 = f.factors.front().zero.value();
                for (const auto& fac : f.factors)
                    if (fac.exponent == 1) z0 = fac.zero.value();
                return detail::normalize(Mobius{f.rotation, -f.rotation * z0, -std::conj(z0), 1.0, Model::disc});
            } else if constexpr (std::is_same_v<T, HalfPlaneExp>) return std::nullopt;
            else {
                Mobius acc{};
                std::optional<Model> model;
                for (const auto& e : f.chain) {
                    auto em = as_mobius(e);
                    if (!em) return std::nullopt;
                    if (auto mm = e.model()) model = mm;
                    acc = detail::multiply(acc, *em);
                }
                acc.model = model.value_or(Model::disc);
                return acc;
            }
        },
        m.rep());
}

/// The same Mobius map written in disc coordinates (conjugated by Cayley for H).
inline Mobius to_disc_model(const Mobius& m) {
    if (m.model == Model::disc) return m;
    Mobius r = detail::multiply(detail::multiply(detail::cayley_matrix_to_disc(), m), detail::cayley_matrix_from_disc());
    r.model = Model::disc;
    return r;
}

inline Mobius to_halfplane_model(const Mobius& m) {
    if (m.model == Model::halfplane) return m;
    Mobius r = detail::multiply(detail::multiply(detail::cayley_matrix_from_disc(), m), detail::cayley_matrix_to_disc());
    r.model = Model::halfplane;
    return r;
}

/// Whether a Mobius map is a conformal automorphism of its model.
/// Disc: d = conj(a), c = conj(b) up to a common sign. Half-plane: real up to sign.
inline bool is_automorphism(const Mobius& raw, double tol = 1e-10) {
    const Mobius m = detail::normalize(raw);
    const double scale = std::max(1.0, detail::mobius_scale(m));
    if (m.model == Model::disc) {
        for (double s : {1.0, -1.0}) {
            if (std::abs(m.d - s * std::conj(m.a)) <= tol * scale && std::abs(m.c - s * std::conj(m.b)) <= tol * scale)
                return true;
        }
        return false;
    }
    for (cplx unit : {cplx(1.0), cplx(0.0, 1.0)}) {
        const Mobius r{m.a * unit, m.b * unit, m.c * unit, m.d * unit, m.model};
        const double im = std::max({std::abs(r.a.imag()), std::abs(r.b.imag()), std::abs(r.c.imag()), std::abs(r.d.imag())});
        if (im <= tol * scale) return (r.a * r.d - r.b * r.c).real() > 0.0;
    }
    return false;
}

inline bool is_automorphism(const HoloMap& m, double tol = 1e-10) {
    if (m.is<Identity>()) return true;
    if (const auto* f = m.as<Affine>()) return std::abs(std::abs(f->a) - 1.0) <= tol && std::abs(f->b) <= tol;
    if (const auto* c = m.as<Composite>()) {
        return std::all_of(c->chain.begin(), c->chain.end(), [tol](const HoloMap& e) { return is_automorphism(e, tol); });
    }
    auto mm = as_mobius(m);
    return mm && is_automorphism(*mm, tol);
}

// ---------------------------------------------------------------------------
// Self-map check

struct SelfMapReport {
    bool pass = true;
    std::size_t checked = 0;
    std::optional<cplx> escaping_input;
    std::optional<cplx> escaping_image;
};

/// Evaluate `m` on boundary-adjacent and interior points; the first image that
/// leaves the model is reported. Failures are data, never exceptions.
inline SelfMapReport is_self_map_check(const HoloMap& m, std::size_t samples = 64) {
    SelfMapReport rep;
    const Model model = model_or_disc(m);
    std::vector<cplx> pts;
    pts.reserve(samples);
    const std::size_t edge = samples - samples / 2;
    const std::size_t inner = samples - edge;
    if (model == Model::disc) {
        for (std::size_t k = 0; k < edge; ++k)
            pts.push_back(std::polar(1.0 - 1e-6, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(edge)));
        const double radii[] = {0.0, 0.5, 0.9, 0.99};
        for (std::size_t k = 0; k < inner; ++k)
            pts.push_back(std::polar(radii[k % 4], 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(inner) + 0.3));
    } else {
        const double heights_edge[] = {1e-6, 1e-3};
        for (std::size_t k = 0; k < edge; ++k) {
            const double x = -8.0 + 16.0 * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(1, edge - 1));
            pts.emplace_back(x, heights_edge[k % 2]);
        }
        const double heights[] = {0.1, 1.0, 10.0, 1e3};
        for (std::size_t k = 0; k < inner; ++k) {
            const double x = -4.0 + 8.0 * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(1, inner));
            pts.emplace_back(x, heights[k % 4]);
        }
    }
    for (cplx z : pts) {
        const cplx w = eval_raw(m, z);
        ++rep.checked;
        const bool inside = std::isfinite(w.real()) && std::isfinite(w.imag()) &&
                            (model == Model::disc ? std::abs(w) < 1.0 : w.imag() > 0.0);
        if (!inside) {
            rep.pass = false;
            rep.escaping_input = z;
            rep.escaping_image = w;
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Validated construction

namespace detail {

inline HoloMap checked(HoloMap m) {
    const auto rep = is_self_map_check(m, 64);
    if (!rep.pass)
        throw InvalidMapError("not a self-map: " + fmt_point(*rep.escaping_input) + " is sent to " +
                              fmt_point(*rep.escaping_image));
    return m;
}

}  // namespace detail

inline HoloMap make_identity() { return Identity{}; }

inline HoloMap make_mobius(cplx a, cplx b, cplx c, cplx d, Model model = Model::disc) {
    const Mobius raw{a, b, c, d, model};
    const cplx det = raw.det();
    const double scale = detail::mobius_scale(raw);
    if (!(std::abs(det) > 1e-14 * scale * scale))
        throw InvalidMapError("degenerate Mobius coefficients (ad - bc = 0)");
    return detail::checked(detail::normalize(raw));
}

/// Admits z -> a z + b only under |a| + |b| <= 1.
inline HoloMap make_affine(cplx a, cplx b) {
    if (std::abs(a) + std::abs(b) > 1.0 + 1e-15)
        throw InvalidMapError("affine map requires |a| + |b| <= 1");
    return detail::checked(Affine{a, b});
}

inline HoloMap make_rotation(double angle) { return make_affine(std::polar(1.0, angle), 0.0); }

inline HoloMap make_blaschke(std::vector<BlaschkeFactor> factors, cplx rotation = 1.0) {
    if (std::abs(std::abs(rotation) - 1.0) > 1e-12) throw InvalidMapError("Blaschke rotation must have modulus 1");
    for (const auto& f : factors)
        if (f.exponent == 0) throw InvalidMapError("Blaschke exponents must be positive");
    return detail::checked(Blaschke{std::move(factors), rotation});
}

inline HoloMap make_hpexp(HalfPlanePoint offset, double frequency) {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) throw InvalidMapError("hpexp frequency must be positive");
    return detail::checked(HalfPlaneExp{offset, frequency});
}

// ---------------------------------------------------------------------------
// Composition and inversion

namespace detail {

inline bool matrix_like(const HoloMap& m) { return m.is<Identity>() || m.is<Mobius>() || m.is<Affine>(); }

inline HoloMap fuse(const HoloMap& outer, const HoloMap& inner) {
    if (outer.is<Identity>()) return inner;
    if (inner.is<Identity>()) return outer;
    const auto* ao = outer.as<Affine>();
    const auto* ai = inner.as<Affine>();
    if (ao && ai) return Affine{ao->a * ai->a, ao->a * ai->b + ao->b};
    const Model model = outer.model().value_or(inner.model().value_or(Model::disc));
    auto mo = as_mobius(outer);
    auto mi = as_mobius(inner);
    if (mo && mi) {
        Mobius r = multiply(*mo, *mi);
        r.model = model;
        return r;
    }
    // Affine with a == 0 is constant: fold it into the matrix side.
    const cplx w = eval_raw(outer, eval_raw(inner, 0.0));
    return Affine{0.0, w};
}

inline void append_fused(std::vector<HoloMap>& chain, const HoloMap& m) {
    if (const auto* c = m.as<Composite>()) {
        for (const auto& e : c->chain) append_fused(chain, e);
        return;
    }
    if (m.is<Identity>()) return;
    if (!chain.empty() && matrix_like(chain.back()) && matrix_like(m)) {
        HoloMap fused = fuse(chain.back(), m);
        chain.pop_back();
        if (!fused.is<Identity>()) chain.push_back(std::move(fused));
        return;
    }
    chain.push_back(m);
}

}  // namespace detail

/// outer o inner. Matrix-type maps fuse by 2x2 product; everything else is
/// appended to a composite chain.
inline HoloMap compose(const HoloMap& outer, const HoloMap& inner) {
    const auto mo = outer.model();
    const auto mi = inner.model();
    if (mo && mi && *mo != *mi) throw ModelMismatchError("cannot compose maps acting on different models");
    std::vector<HoloMap> chain;
    detail::append_fused(chain, outer);
    detail::append_fused(chain, inner);
    if (chain.empty()) return Identity{};
    if (chain.size() == 1) return chain.front();
    return Composite{std::move(chain)};
}

/// Compose a list in order: compose_all({m1, m2, m3}) = m1 o m2 o m3.
inline HoloMap compose_all(const std::vector<HoloMap>& maps) {
    HoloMap out = Identity{};
    for (const auto& m : maps) out = compose(out, m);
    return out;
}

/// n-fold self-composition.
inline HoloMap power(const HoloMap& m, std::size_t n) {
    if (auto mm = as_mobius(m); mm && detail::matrix_like(m)) {
        Mobius acc{};
        acc.model = mm->model;
        Mobius base = *mm;
        for (std::size_t k = n; k > 0; k >>= 1) {
            if (k & 1) acc = detail::multiply(acc, base);
            base = detail::multiply(base, base);
        }
        if (n == 0) return Identity{};
        return acc;
    }
    HoloMap out = Identity{};
    for (std::size_t k = 0; k < n; ++k) out = compose(m, out);
    return out;
}

/// Inverse of an automorphism; anything else throws NotAutomorphismError.
inline HoloMap invert(const HoloMap& m) {
    if (m.is<Identity>()) return m;
    if (const auto* f = m.as<Affine>()) {
        if (!is_automorphism(m)) throw NotAutomorphismError("affine map is not an automorphism of the disc");
        return Affine{1.0 / f->a, 0.0};
    }
    if (const auto* c = m.as<Composite>()) {
        // (m1 o m2 o ... o mk)^-1 = mk^-1 o ... o m1^-1
        HoloMap out = Identity{};
        for (const auto& e : c->chain) out = compose(invert(e), out);
        return out;
    }
    if (const auto* b = m.as<Blaschke>(); b && b->degree() == 0) return Blaschke{{}, std::conj(b->rotation)};
    auto mm = as_mobius(m);
    if (!mm || !is_automorphism(*mm)) throw NotAutomorphismError("map is not an automorphism of its model");
    return detail::inverse(*mm);
}

}  // namespace dwlab
