#include <catch2/catch_amalgamated.hpp>

#include "billiards/classify.hpp"

using namespace billiards;

namespace {

const Conic kInner = Conic::central(4.0, 1.0);
const Conic kOuter = Conic::central(9.0, 6.0);
const Conic kHyper = Conic::central(2.0, -1.0);

BilliardScene type1_scene() {
    const ParamCurve parab = ParamCurve::graph_of(Poly({Cx(1.0), Cx(0.0), Cx(1.0)}));  // y = x^2 + 1
    return build_scene(Type1Spec{ProjLine::x_axis(), Mirror(parab)});
}

ProjMap rotation_map(double deg) {
    const double th = deg * M_PI / 180.0;
    Mat3 m;
    m << std::cos(th), -std::sin(th), 0.3,
         std::sin(th), std::cos(th), -0.2,
         0.0, 0.0, 1.0;
    return ProjMap(m);
}

} // namespace

TEST_CASE("structural classification of the three families") {
    SECTION("line-symmetric scene") {
        auto type = classify_scene(type1_scene());
        REQUIRE(type.tag == BilliardTypeTag::Type1SymmetricLine);
        REQUIRE(type.axis.has_value());
        REQUIRE(proj_equal(*type.axis, ProjLine::x_axis()));
        REQUIRE(type.scan.fraction_closing >= 0.95);
    }
    SECTION("concurrent lines with their rotation angle") {
        auto scene = build_scene(Type2Spec{ProjPoint::finite(0.0, 0.0), 0.0, 10.0, 30.0});
        auto type = classify_scene(scene);
        REQUIRE(type.tag == BilliardTypeTag::Type2ConcurrentLines);
        REQUIRE(type.rotation_degrees.has_value());
        REQUIRE(std::abs(*type.rotation_degrees - 30.0) < 1e-8);
    }
    SECTION("parallel lines: rotation about an infinite point") {
        BilliardScene scene{Mirror(ProjLine(0.0, 1.0, 0.0)), Mirror(ProjLine(0.0, 1.0, -1.0)),
                            Mirror(ProjLine(0.0, 1.0, -3.0)), Mirror(ProjLine(0.0, 1.0, -2.0))};
        auto type = classify_scene(scene);
        REQUIRE(type.tag == BilliardTypeTag::Type2ConcurrentLines);
        REQUIRE(type.center.has_value());
        REQUIRE_FALSE(type.center->is_finite());
    }
    SECTION("confocal conic pair") {
        auto type = classify_scene(build_scene(Type3Spec{kInner, kHyper}));
        REQUIRE(type.tag == BilliardTypeTag::Type3ConfocalConics);
        REQUIRE(type.confocal.has_value());
        REQUIRE(type.confocal->tag == ConfocalTag::TransverseHyperbolas);
    }
    SECTION("a non-reflective scene") {
        BilliardScene scene{Mirror(kInner), Mirror(Conic::central(9.2, 6.0)), Mirror(kInner),
                            Mirror(Conic::central(9.2, 6.0))};
        auto type = classify_scene(scene);
        REQUIRE(type.tag == BilliardTypeTag::NotFourReflective);
        REQUIRE(type.scan.fraction_closing <= 0.05);
    }
}

TEST_CASE("classification is invariant under cyclic renaming and rigid motion") {
    const BilliardScene scene = build_scene(Type3Spec{kInner, kOuter});
    for (int k = 0; k < 4; ++k) {
        auto type = classify_scene(scene.cycled(k));
        REQUIRE(type.tag == BilliardTypeTag::Type3ConfocalConics);
    }
    const ProjMap motion = rotation_map(33.0);
    BilliardScene moved;
    for (int i = 0; i < 4; ++i) moved.mirrors[i] = scene.mirrors[i].transformed(motion);
    REQUIRE(classify_scene(moved).tag == BilliardTypeTag::Type3ConfocalConics);

    const BilliardScene t1 = type1_scene();
    BilliardScene t1_moved;
    for (int i = 0; i < 4; ++i) t1_moved.mirrors[i] = t1.mirrors[i].transformed(motion);
    REQUIRE(classify_scene(t1_moved).tag == BilliardTypeTag::Type1SymmetricLine);
}

TEST_CASE("tolerance disagreements raise instead of resolving silently") {
    // opposite mirrors differing at 1e-10: structurally distinct below the
    // requested tolerance, yet the scan still closes
    const Conic wobble = Conic::central(4.0 + 4e-10, 1.0);
    BilliardScene scene{Mirror(kInner), Mirror(kOuter), Mirror(wobble), Mirror(kOuter)};
    REQUIRE_THROWS_AS(classify_scene(scene, 1e-13), Inconsistent);
}

TEST_CASE("degenerate orbit catalogue") {
    SECTION("non-tangent pair is elliptic") {
        auto cat = degenerate_catalogue(build_scene(Type3Spec{kInner, kHyper}));
        REQUIRE(cat.genus == GenusType::Elliptic);
        REQUIRE(cat.gamma.size() == 4);
        for (const auto& g : cat.gamma) {
            REQUIRE(is_isotropic(g.line, 1e-7));
            REQUIRE(std::abs(kInner.eval(g.a_touch)) < 1e-7);
            REQUIRE(std::abs(kHyper.eval(g.b_touch)) < 1e-7);
        }
    }
    SECTION("concentric circles: two smooth rational components") {
        auto scene = build_scene(Type3Spec{Conic::circle(0.0, 0.0, 1.0), Conic::circle(0.0, 0.0, 4.0)});
        auto cat = degenerate_catalogue(scene);
        REQUIRE(cat.genus == GenusType::TwoSmoothRational);
        REQUIRE(cat.gamma.size() == 2);
    }
    SECTION("codirected confocal parabolas: rational with a node") {
        auto scene = build_scene(Type3Spec{confocal_family_real(ConfocalKind::Parabola, 0.0, 1.0),
                                           confocal_family_real(ConfocalKind::Parabola, 0.0, 2.0)});
        auto cat = degenerate_catalogue(scene);
        REQUIRE(cat.genus == GenusType::RationalOneNode);
    }
    SECTION("translated isotropic parabolas: rational with a degree-two cusp") {
        const Conic c1 = Conic::from_affine(2.0, Cx(0.0, 4.0), -2.0, 2.0, 0.0, 0.0);
        Mat3 t = Mat3::Identity();
        t(0, 2) = Cx(0.5);
        t(1, 2) = Cx(0.0, -0.5);
        const Conic c2 = c1.transformed(ProjMap(t));
        BilliardScene scene{Mirror(c1), Mirror(c2), Mirror(c1), Mirror(c2)};
        auto cat = degenerate_catalogue(scene);
        REQUIRE(cat.genus == GenusType::RationalDegree2Cusp);
    }
    SECTION("only type-3 scenes have a catalogue") {
        REQUIRE_THROWS_AS(
            degenerate_catalogue(build_scene(Type2Spec{ProjPoint::finite(0.0, 0.0), 0.0, 10.0, 30.0})),
            NotType3);
    }
}

TEST_CASE("tangency curve sampling") {
    const BilliardScene scene = build_scene(Type3Spec{kInner, kOuter});

    SECTION("the quadrilateral at B = (3, 0)") {
        auto q = tangency_quadrilateral(scene, ProjPoint::finite(3.0, 0.0));
        REQUIRE(q.has_value());
        const double s5 = std::sqrt(5.0);
        REQUIRE(chordal3(q->vertices[0].h, ProjPoint::finite(4.0 / 3.0, -s5 / 3.0).h) < 1e-9);
        REQUIRE(chordal3(q->vertices[2].h, ProjPoint::finite(4.0 / 3.0, s5 / 3.0).h) < 1e-9);
        REQUIRE(q->max_residual() < 1e-9);
        REQUIRE(q->degenerate());        // edge tangency: never a periodic orbit
        REQUIRE_FALSE(q->is_valid(1e-8));
    }

    SECTION("a full sweep stays on the tangency curve") {
        auto quads = sample_T_a(scene, 100);
        REQUIRE(quads.size() == 100);
        for (const auto& q : quads) {
            REQUIRE(q.max_residual() < 1e-9);  // includes tangent-pair symmetry at B
            REQUIRE(q.degenerate());
            REQUIRE(proj_equal(q.vertices[1], q.vertices[3]));
        }
    }

    SECTION("only type-3 scenes") {
        REQUIRE_THROWS_AS(sample_T_a(type1_scene(), 10), NotType3);
    }
}

TEST_CASE("pinned degenerate curves of a shared isotropic tangent") {
    const BilliardScene scene = build_scene(Type3Spec{kInner, kOuter});
    const auto iso = isotropic_tangents(kInner);
    REQUIRE(iso.lines.size() == 4);
    const ProjLine L = iso.lines[0].line;

    auto rep = gamma_curve(scene, L, 200);
    REQUIRE(rep.quads.size() >= 190);
    REQUIRE(rep.projection_A_injective);
    REQUIRE(rep.projection_B_injective);
    for (const auto& q : rep.quads) {
        REQUIRE(proj_equal(q.edges[0], L));      // the pinned edge lies on the tangent line
        REQUIRE(q.max_residual() < 1e-8);
        REQUIRE(q.degenerate());                 // isotropic-tangency vertices are flagged
        REQUIRE((q.flags[0] & kIsotropicTangent) != 0);
        REQUIRE((q.flags[1] & kIsotropicTangent) != 0);
    }

    REQUIRE_THROWS_AS(gamma_curve(scene, ProjLine::x_axis(), 10), LineNotSharedTangent);
}
