#include <dwlab/grammar.hpp>
#include <dwlab/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dwlab;

TEST(ComplexLiterals, Forms) {
    EXPECT_EQ(parse_complex("1.5"), cplx(1.5, 0.0));
    EXPECT_EQ(parse_complex("2i"), cplx(0.0, 2.0));
    EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
    EXPECT_EQ(parse_complex("0.25-0.5i"), cplx(0.25, -0.5));
    EXPECT_LT(std::abs(parse_complex("e^{i*pi/2}") - cplx(0.0, 1.0)), 1e-16);
    EXPECT_LT(std::abs(parse_complex("e^{i/7}") - std::polar(1.0, 1.0 / 7.0)), 1e-16);
    EXPECT_LT(std::abs(parse_complex("e^{-i*pi/3}") - std::polar(1.0, -std::numbers::pi / 3.0)), 1e-16);
    EXPECT_LT(std::abs(parse_complex("0.5*e^{i*0.5}") - std::polar(0.5, 0.5)), 1e-16);
    EXPECT_EQ(parse_complex("2*pi"), cplx(2.0 * std::numbers::pi, 0.0));
}

TEST(ComplexLiterals, SignedZerosSurvive) {
    const cplx z = parse_complex("-0-0i");
    EXPECT_TRUE(std::signbit(z.real()));
    EXPECT_TRUE(std::signbit(z.imag()));
    EXPECT_EQ(print_complex(z), "-0-0i");
}

TEST(Maps, ParsesEachKind) {
    EXPECT_TRUE(parse_map("identity").is<Identity>());
    EXPECT_TRUE(parse_map("affine(0.5, 0)").is<Affine>());
    EXPECT_TRUE(parse_map("mobius(3,1,1,3)").is<Mobius>());
    EXPECT_EQ(parse_map("hmobius(2,0,0,1)").model(), Model::halfplane);
    EXPECT_TRUE(parse_map("blaschke([(0.5,1),(0.1i,2)], e^{i})").is<Blaschke>());
    EXPECT_TRUE(parse_map("hpexp(0+1i, 2*pi)").is<HalfPlaneExp>());
    EXPECT_TRUE(parse_map("compose(blaschke([(0,2)],1), affine(0.5,0))").is<Composite>());
}

TEST(Maps, ErrorsCarryOffsets) {
    try {
        parse_map("mobius(1,2");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos, 10u);
    }
    EXPECT_THROW(parse_map("affine(0.5,0) junk"), ParseError);
    EXPECT_THROW(parse_map("frobnicate(1)"), ParseError);
    EXPECT_THROW(parse_map("affine(0.9,0.9)"), ParseError);  // invalid map surfaces as a parse error
    EXPECT_THROW(parse_map("blaschke([(0.5,0)],1)"), ParseError);
    EXPECT_THROW(parse_map("compose(affine(0.5,0), hmobius(2,0,0,1))"), ParseError);  // mixed models
}

TEST(RoundTrip, PrintThenParseIsExact) {
    const char* texts[] = {
        "identity",
        "affine(0.4*e^{i/3}, 0.1-0.2i)",
        "mobius(3,1,1,3)",
        "mobius(e^{i/7},0,0,1)",
        "hmobius(2,1,0,1)",
        "blaschke([(0.5,1),(0.1-0.3i,2)], e^{i*0.7})",
        "hpexp(0.3+1i, 2*pi)",
        "compose(blaschke([(0.2,2)],1), mobius(3,1,1,3), affine(0.5,0))",
    };
    for (const char* t : texts) {
        const HoloMap m = parse_map(t);
        const std::string once = print(m);
        const HoloMap again = parse_map(once);
        EXPECT_EQ(again, m) << t << " -> " << once;
        EXPECT_EQ(print(again), once);
    }
}

TEST(RoundTrip, RandomComplexValues) {
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const cplx z(rng.uniform(-1e3, 1e3), rng.uniform(-1e-3, 1e-3));
        const cplx back = parse_complex(print_complex(z));
        EXPECT_EQ(back, z);
    }
}
