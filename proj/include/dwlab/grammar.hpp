#pragma once

// Text form of maps:
//
//   identity
//   mobius(a, b, c, d)        disc model
//   hmobius(a, b, c, d)       half-plane model
//   affine(a, b)
//   blaschke([(z1, k1), ...], rot)
//   hpexp(offset, freq)
//   compose(m1, m2, ...)      m1 o m2 o ...
//
// Complex literals: `x+yi`, `x`, `yi`, `i`, `-i`, `e^{i/7}`, `e^{-i*pi/3}`,
// `2*e^{i*0.5}`; reals may use `pi`, `*` and `/`. print() emits the
// canonical rectangular form with shortest round-trip decimals, so
// parse(print(m)) == m bit for bit.

#include <dwlab/errors.hpp>
#include <dwlab/holomap.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace dwlab {

namespace detail {

inline std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class MapParser {
public:
    explicit MapParser(std::string_view text) : s_(text) {}

    HoloMap parse_all() {
        HoloMap m = parse_map();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return m;
    }

    cplx parse_complex_all() {
        cplx z = parse_complex();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return z;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool accept_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        if (accept_word("pi")) return std::numbers::pi;
        double x = 0.0;
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        const auto res = std::from_chars(first, last, x);
        if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
        pos_ += static_cast<std::size_t>(res.ptr - first);
        return x;
    }

    /// factor { ('*' | '/') factor }, stopping before '*' that introduces i or e^{...}
    double real_product() {
        double x = number();
        for (;;) {
            skip_ws();
            if (peek('/')) {
                ++pos_;
                x /= number();
            } else if (peek('*')) {
                const std::size_t save = pos_;
                ++pos_;
                skip_ws();
                if (pos_ < s_.size() && (s_[pos_] == 'i' || s_[pos_] == 'e')) {
                    pos_ = save;
                    return x;
                }
                x *= number();
            } else {
                return x;
            }
        }
    }

    // 'e^{' ['-'] 'i' ( ['*'] real | '/' real ) '}'
    cplx polar_unit() {
        expect('^');
        expect('{');
        double sign = 1.0;
        if (accept('-')) sign = -1.0;
        if (!accept('i')) fail("expected 'i' in exponent");
        double angle = 1.0;
        if (accept('/')) angle = 1.0 / real_product();
        else if (accept('*')) angle = real_product();
        else if (!peek('}')) angle = real_product();
        expect('}');
        return std::polar(1.0, sign * angle);
    }

    enum class Part { real, imag, both };
    struct Term {
        cplx value;
        Part part;
    };

    Term term() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == 'e' && s_.substr(pos_, 2) == "e^") {
            ++pos_;
            return {polar_unit(), Part::both};
        }
        if (accept('i')) return {{0.0, 1.0}, Part::imag};
        const double x = real_product();
        const std::size_t save = pos_;
        accept('*');
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == 'e' && s_.substr(pos_, 2) == "e^") {
            ++pos_;
            return {x * polar_unit(), Part::both};
        }
        if (accept('i')) return {{0.0, x}, Part::imag};
        pos_ = save;
        return {{x, 0.0}, Part::real};
    }

    // Real and imaginary parts are accumulated separately so that signed
    // zeros survive: "-0-0i" parses to (-0.0, -0.0).
    cplx parse_complex() {
        std::optional<double> re, im;
        auto add = [&](Term t, bool negate) {
            const double r = negate ? -t.value.real() : t.value.real();
            const double i = negate ? -t.value.imag() : t.value.imag();
            if (t.part != Part::imag) re = re ? *re + r : r;
            if (t.part != Part::real) im = im ? *im + i : i;
        };
        bool negate = accept('-');
        if (!negate) accept('+');
        add(term(), negate);
        for (;;) {
            if (accept('+')) add(term(), false);
            else if (accept('-')) add(term(), true);
            else return {re.value_or(0.0), im.value_or(0.0)};
        }
    }

    std::vector<HoloMap> map_list() {
        std::vector<HoloMap> out;
        expect('(');
        if (accept(')')) return out;
        do {
            out.push_back(parse_map());
        } while (accept(','));
        expect(')');
        return out;
    }

    std::vector<cplx> complex_args(std::size_t n) {
        std::vector<cplx> out;
        expect('(');
        for (std::size_t k = 0; k < n; ++k) {
            if (k) expect(',');
            out.push_back(parse_complex());
        }
        expect(')');
        return out;
    }

    HoloMap parse_map() {
        const std::size_t at = pos_;
        const std::string name = identifier();
        try {
            if (name == "identity") return make_identity();
            if (name == "mobius" || name == "hmobius") {
                auto v = complex_args(4);
                return make_mobius(v[0], v[1], v[2], v[3], name == "mobius" ? Model::disc : Model::halfplane);
            }
            if (name == "affine") {
                auto v = complex_args(2);
                return make_affine(v[0], v[1]);
            }
            if (name == "hpexp") {
                expect('(');
                const cplx offset = parse_complex();
                expect(',');
                const double freq = real_product();
                expect(')');
                return make_hpexp(HalfPlanePoint(offset), freq);
            }
            if (name == "blaschke") {
                expect('(');
                expect('[');
                std::vector<BlaschkeFactor> factors;
                if (!accept(']')) {
                    do {
                        expect('(');
                        const cplx zero = parse_complex();
                        expect(',');
                        const double k = number();
                        if (k < 1 || k != std::floor(k) || k > 1e6) fail("Blaschke exponent must be a positive integer");
                        expect(')');
                        factors.push_back({DiscPoint(zero), static_cast<unsigned>(k)});
                    } while (accept(','));
                    expect(']');
                }
                expect(',');
                const cplx rot = parse_complex();
                expect(')');
                return make_blaschke(std::move(factors), rot);
            }
            if (name == "compose") {
                auto maps = map_list();
                if (maps.empty()) return make_identity();
                std::optional<Model> model;
                for (const auto& m : maps) {
                    if (auto mm = m.model()) {
                        if (model && *model != *mm) throw ModelMismatchError("compose() mixes models");
                        model = mm;
                    }
                }
                if (maps.size() == 1) return maps.front();
                return Composite{std::move(maps)};
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(std::string("invalid map: ") + e.what(), at);
        }
        pos_ = at;
        fail(name.empty() ? "expected a map" : "unknown map '" + name + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse a map expression; throws ParseError on malformed or invalid input.
inline HoloMap parse_map(std::string_view text) { return detail::MapParser(text).parse_all(); }

inline cplx parse_complex(std::string_view text) { return detail::MapParser(text).parse_complex_all(); }

inline std::string print_complex(cplx z) {
    std::string out = detail::format_real(z.real());
    const double im = z.imag();
    if (std::signbit(im)) out += "-" + detail::format_real(-im);
    else out += "+" + detail::format_real(im);
    return out + "i";
}

/// Canonical text form; parse_map(print(m)) reproduces m exactly.
inline std::string print(const HoloMap& m) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Identity>) return "identity";
            else if constexpr (std::is_same_v<T, Mobius>) {
                return std::string(f.model == Model::disc ? "mobius(" : "hmobius(") + print_complex(f.a) + "," +
                       print_complex(f.b) + "," + print_complex(f.c) + "," + print_complex(f.d) + ")";
            } else if constexpr (std::is_same_v<T, Affine>) {
                return "affine(" + print_complex(f.a) + "," + print_complex(f.b) + ")";
            } else if constexpr (std::is_same_v<T, Blaschke>) {
                std::string out = "blaschke([";
                for (std::size_t k = 0; k < f.factors.size(); ++k) {
                    if (k) out += ",";
                    out += "(" + print_complex(f.factors[k].zero.value()) + "," + std::to_string(f.factors[k].exponent) + ")";
                }
                return out + "]," + print_complex(f.rotation) + ")";
            } else if constexpr (std::is_same_v<T, HalfPlaneExp>) {
                return "hpexp(" + print_complex(f.offset.value()) + "," + detail::format_real(f.frequency) + ")";
            } else {
                std::string out = "compose(";
                for (std::size_t k = 0; k < f.chain.size(); ++k) {
                    if (k) out += ",";
                    out += print(f.chain[k]);
                }
                return out + ")";
            }
        },
        m.rep());
}

}  // namespace dwlab
