#include <dwlab/classify.hpp>
#include <dwlab/grammar.hpp>
#include <dwlab/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dwlab;

namespace {

template <class T>
const T& as(const MapClass& c) {
    EXPECT_TRUE(std::holds_alternative<T>(c)) << class_name(c);
    static const T fallback{};
    return std::holds_alternative<T>(c) ? std::get<T>(c) : fallback;
}

}  // namespace

TEST(RationalAngles, DetectsSmallOrders) {
    const double pi = std::numbers::pi;
    EXPECT_EQ(rational_angle_order(2.0 * pi / 5.0), 5u);
    EXPECT_EQ(rational_angle_order(-2.0 * pi * 3.0 / 7.0), 7u);
    EXPECT_EQ(rational_angle_order(pi), 2u);
    EXPECT_EQ(rational_angle_order(0.0), 1u);
    EXPECT_EQ(rational_angle_order(1.0 / 7.0), 0u);
    EXPECT_EQ(rational_angle_order(1.0), 0u);
}

TEST(Classify, IdentityAndRotations) {
    EXPECT_TRUE(std::holds_alternative<mapclass::Identity>(classify(make_identity())));
    EXPECT_TRUE(std::holds_alternative<mapclass::Identity>(classify(make_mobius(2, 0, 0, 2))));
    const auto fin = as<mapclass::EllipticFiniteOrder>(classify(make_rotation(2.0 * std::numbers::pi / 6.0)));
    EXPECT_EQ(fin.order, 6u);
    EXPECT_LT(std::abs(fin.fixed_point), 1e-14);
    const auto inf = as<mapclass::EllipticInfiniteOrder>(classify(parse_map("mobius(e^{i/7},0,0,1)")));
    EXPECT_NEAR(inf.angle, 1.0 / 7.0, 1e-12);
}

TEST(Classify, EllipticWithMovedCentre) {
    // Conjugate a rotation by the automorphism sending 0 to c.
    const cplx c(0.3, -0.4);
    const HoloMap phi = make_mobius(1, c, std::conj(c), 1);
    const HoloMap m = compose(phi, compose(make_rotation(2.0), invert(phi)));
    const auto e = as<mapclass::EllipticInfiniteOrder>(classify(m));
    EXPECT_LT(std::abs(e.fixed_point - c), 1e-12);
}

TEST(Classify, InteriorDenjoyWolff) {
    const auto a = as<mapclass::InteriorDW>(classify(make_affine(0.5, 0.25)));
    EXPECT_LT(std::abs(a.zeta.value() - cplx(0.5)), 1e-12);
    EXPECT_NEAR(a.multiplier, 0.5, 1e-12);
    // z^2 by iteration (non-Mobius path).
    const auto b = as<mapclass::InteriorDW>(classify(parse_map("blaschke([(0,2)],1)")));
    EXPECT_LT(std::abs(b.zeta.value()), 1e-9);
}

TEST(Classify, BoundaryDenjoyWolff) {
    const auto h = as<mapclass::BoundaryDW>(classify(make_mobius(3, 1, 1, 3)));
    EXPECT_LT(std::abs(h.zeta - cplx(1.0)), 1e-12);
    // z -> 2z and z -> z + 1 on the half-plane: infinity, i.e. 1 in disc coordinates.
    const auto d = as<mapclass::BoundaryDW>(classify(make_mobius(2, 0, 0, 1, Model::halfplane)));
    EXPECT_LT(std::abs(d.zeta - cplx(1.0)), 1e-12);
    const auto p = as<mapclass::BoundaryDW>(classify(make_mobius(1, 1, 0, 1, Model::halfplane)));
    EXPECT_LT(std::abs(p.zeta - cplx(1.0)), 1e-9);
    // z -> z/2 on the half-plane pulls to 0, i.e. -1 in disc coordinates.
    const auto q = as<mapclass::BoundaryDW>(classify(make_mobius(1, 0, 0, 2, Model::halfplane)));
    EXPECT_LT(std::abs(q.zeta - cplx(-1.0)), 1e-12);
}

TEST(DenjoyWolffIteration, AgreesWithFixedPointAnalysis) {
    for (const char* text : {"affine(0.5,0.25)", "mobius(3,1,1,3)", "affine(0.3i,0.1)", "hmobius(1,0,0,2)"}) {
        const HoloMap m = parse_map(text);
        const auto dw = denjoy_wolff(m);
        const MapClass c = classify(m);
        cplx expect = std::holds_alternative<mapclass::InteriorDW>(c) ? std::get<mapclass::InteriorDW>(c).zeta.value()
                                                                      : std::get<mapclass::BoundaryDW>(c).zeta;
        EXPECT_LT(std::abs(dw.zeta - expect), 1e-6) << text;
        EXPECT_EQ(dw.interior, std::holds_alternative<mapclass::InteriorDW>(c)) << text;
    }
}

TEST(FixedPoints, HyperbolicHasTwoBoundaryPoints) {
    const auto fp = mobius_fixed_points(*as_mobius(make_mobius(3, 1, 1, 3)));
    ASSERT_EQ(fp.size(), 2u);
    for (cplx z : fp) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
}

TEST(Contraction, ConstantOfAHalvingMapIsOneHalf) {
    const HyperbolicDisc region(DiscPoint(0.0, 0.0), 1.0);
    const double k = contraction_constant(make_affine(0.5, 0.0), region, 60, 1);
    EXPECT_GT(k, 0.45);
    EXPECT_LE(k, 0.5 + 1e-9);
    EXPECT_THROW(contraction_constant(make_rotation(1.0), region, 60, 1), NotAutomorphismError);
}

TEST(DenjoyWolffIteration, OrbitsFrozenAtTheCircleAreBoundary) {
    // Hyperbolic half-plane maps s z + beta, moved into the disc and rotated.
    Rng rng(25);
    for (int k = 0; k < 200; ++k) {
        const Mobius d = to_disc_model(Mobius{rng.uniform(1.2, 4.0), cplx(rng.uniform(-2, 2), rng.uniform(0, 1)), 0.0, 1.0,
                                              Model::halfplane});
        const double phi = rng.angle();
        const HoloMap m = compose(make_rotation(phi), compose(make_mobius(d.a, d.b, d.c, d.d), make_rotation(-phi)));
        const auto dw = denjoy_wolff(m);
        const auto cls = classify(m);
        ASSERT_TRUE(std::holds_alternative<mapclass::BoundaryDW>(cls));
        EXPECT_FALSE(dw.interior) << k;
        EXPECT_LT(std::abs(dw.zeta - std::get<mapclass::BoundaryDW>(cls).zeta), 1e-6) << k;
    }
}
