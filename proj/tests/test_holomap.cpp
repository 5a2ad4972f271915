#include <dwlab/holomap.hpp>
#include <dwlab/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dwlab;

namespace {

HoloMap random_blaschke(Rng& rng, unsigned degree) {
    std::vector<BlaschkeFactor> f;
    for (unsigned k = 0; k < degree; ++k) f.push_back({DiscPoint(rng.in_disc(0.9)), 1});
    return make_blaschke(std::move(f), std::polar(1.0, rng.angle()));
}

}  // namespace

TEST(Construction, AffineNeedsContractionCondition) {
    EXPECT_NO_THROW(make_affine(0.5, 0.5));
    EXPECT_THROW(make_affine(0.6, 0.5), InvalidMapError);
    EXPECT_THROW(make_affine(cplx(0, 1), 0.01), InvalidMapError);
}

TEST(Construction, MobiusRejectsDegenerateAndNonSelfMaps) {
    EXPECT_THROW(make_mobius(1, 2, 2, 4), InvalidMapError);
    EXPECT_THROW(make_mobius(2, 0, 0, 1), InvalidMapError);  // z -> 2z leaves the disc
    EXPECT_THROW(make_mobius(-1, 0, 0, 1, Model::halfplane), InvalidMapError);  // z -> -z
    const HoloMap m = make_mobius(3, 1, 1, 3);
    EXPECT_NEAR(std::abs(m.as<Mobius>()->det() - 1.0), 0.0, 1e-14);
}

TEST(Construction, BlaschkeAndHpexpValidation) {
    EXPECT_THROW(make_blaschke({}, 2.0), InvalidMapError);
    EXPECT_THROW(make_hpexp(HalfPlanePoint(0, 1), 0.0), InvalidMapError);
    EXPECT_NO_THROW(make_hpexp(HalfPlanePoint(0, 1), 2.0 * std::numbers::pi));
}

TEST(Evaluation, AffineAndBlaschkeValues) {
    EXPECT_EQ(eval(make_affine(0.5, 0.25), cplx(0.5)), cplx(0.5));
    const HoloMap b = make_blaschke({{DiscPoint(0.5, 0.0), 2}});
    EXPECT_LT(std::abs(eval(b, cplx(0.5))), 1e-16);
    const cplx z(0.1, 0.2), q = (z - 0.5) / (1.0 - 0.5 * z);
    EXPECT_LT(std::abs(eval(b, z) - q * q), 1e-15);
}

TEST(Evaluation, EscapingImageRaises) {
    const HoloMap m = Affine{2.0, 0.0};  // bypasses the validated constructor
    EXPECT_THROW(eval(m, cplx(0.9)), NotSelfMapError);
    EXPECT_THROW(eval(make_affine(0.5, 0.0), HalfPlanePoint(0, 1)), ModelMismatchError);
}

TEST(SchwarzPick, BlaschkeProductsDoNotExpand) {
    Rng rng(2024);
    for (int k = 0; k < 100; ++k) {
        const HoloMap f = random_blaschke(rng, 1 + static_cast<unsigned>(k % 4));
        for (int j = 0; j < 50; ++j) {
            const cplx z = rng.in_disc(0.95), w = rng.in_disc(0.95);
            const double before = hyp_dist_disc(z, w);
            const double after = hyp_dist_disc(eval_raw(f, z), eval_raw(f, w));
            EXPECT_LE(after, before * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST(SchwarzPick, AutomorphismsAreIsometries) {
    Rng rng(99);
    for (int k = 0; k < 100; ++k) {
        const HoloMap f = random_blaschke(rng, 1);
        ASSERT_TRUE(is_automorphism(f));
        const cplx z = rng.in_disc(0.9), w = rng.in_disc(0.9);
        const double before = hyp_dist_disc(z, w);
        EXPECT_NEAR(hyp_dist_disc(eval_raw(f, z), eval_raw(f, w)), before, 1e-9 * std::max(1.0, before));
    }
}

TEST(Automorphisms, Recognition) {
    EXPECT_TRUE(is_automorphism(make_rotation(0.3)));
    EXPECT_TRUE(is_automorphism(make_mobius(3, 1, 1, 3)));
    EXPECT_TRUE(is_automorphism(make_mobius(2, 1, 0, 1, Model::halfplane)));
    EXPECT_FALSE(is_automorphism(make_affine(0.5, 0.0)));
    EXPECT_FALSE(is_automorphism(make_blaschke({{DiscPoint(0.1, 0.0), 2}})));
    EXPECT_FALSE(is_automorphism(make_mobius(1, cplx(0, 1), 0, 1, Model::halfplane)));  // z -> z + i
}

TEST(Composition, FusedMatrixAgreesWithChainEvaluation) {
    Rng rng(5);
    std::vector<HoloMap> maps;
    for (int k = 0; k < 30; ++k) {
        const cplx a = rng.in_disc(0.5), u = std::polar(1.0, rng.angle());
        maps.push_back(make_mobius(u, u * a, std::conj(a), 1));
    }
    const HoloMap fused = compose_all(maps);
    ASSERT_TRUE(fused.is<Mobius>());
    for (int j = 0; j < 20; ++j) {
        const cplx z = rng.in_disc(0.9);
        cplx w = z;
        for (auto it = maps.rbegin(); it != maps.rend(); ++it) w = eval_raw(*it, w);
        EXPECT_LT(hyp_dist_disc(eval_raw(fused, z), w), 1e-9);
    }
}

TEST(Composition, NonMatrixMapsFormChains) {
    const HoloMap b = make_blaschke({{DiscPoint(0.2, 0.1), 2}});
    const HoloMap a = make_affine(0.5, 0.1);
    const HoloMap c = compose(b, a);
    ASSERT_TRUE(c.is<Composite>());
    const cplx z(0.3, -0.4);
    EXPECT_EQ(eval_raw(c, z), eval_raw(b, eval_raw(a, z)));
    EXPECT_THROW(compose(a, make_mobius(2, 1, 0, 1, Model::halfplane)), ModelMismatchError);
}

TEST(Composition, AffinesFuseExactly) {
    const HoloMap c = compose(make_affine(0.5, 0.25), make_affine(0.5, 0.0));
    ASSERT_TRUE(c.is<Affine>());
    EXPECT_EQ(c.as<Affine>()->a, cplx(0.25));
    EXPECT_EQ(c.as<Affine>()->b, cplx(0.25));
}

TEST(Composition, PowerMatchesRepeatedComposition) {
    const HoloMap m = make_mobius(3, 1, 1, 3);
    const HoloMap p = power(m, 13);
    HoloMap q = Identity{};
    for (int k = 0; k < 13; ++k) q = compose(m, q);
    const cplx z(0.1, 0.3);
    EXPECT_LT(std::abs(eval_raw(p, z) - eval_raw(q, z)), 1e-12);
    EXPECT_TRUE(power(m, 0).is<Identity>());
}

TEST(Inversion, AutomorphismsInvertAndOthersThrow) {
    Rng rng(8);
    for (int k = 0; k < 20; ++k) {
        const HoloMap f = random_blaschke(rng, 1);
        const HoloMap id = compose(invert(f), f);
        const cplx z = rng.in_disc(0.9);
        EXPECT_LT(std::abs(eval_raw(id, z) - z), 1e-12);
    }
    EXPECT_THROW(invert(make_affine(0.5, 0.0)), NotAutomorphismError);
}

TEST(ModelConversion, HalfPlaneMobiusConjugatesByCayley) {
    const HoloMap h = make_mobius(2, 1, 0, 1, Model::halfplane);
    const Mobius d = to_disc_model(*as_mobius(h));
    const cplx z(0.3, 1.7);
    EXPECT_LT(std::abs(d(cayley_to_disc_raw(z)) - cayley_to_disc_raw(eval_raw(h, z))), 1e-14);
    const Mobius back = to_halfplane_model(d);
    EXPECT_LT(std::abs(back(z) - eval_raw(h, z)), 1e-13);
}

TEST(SelfMapCheck, FailuresAreDataNotExceptions) {
    const auto ok = is_self_map_check(make_affine(0.5, 0.5));
    EXPECT_TRUE(ok.pass);
    const auto bad = is_self_map_check(Affine{1.0, 0.1});
    EXPECT_FALSE(bad.pass);
    ASSERT_TRUE(bad.escaping_image.has_value());
    EXPECT_GE(std::abs(*bad.escaping_image), 1.0);
}
