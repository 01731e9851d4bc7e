#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "billiards/orbit.hpp"

using namespace billiards;

namespace {

std::mt19937_64 rng(5150u);

double uniform(double a, double b) {
    std::uniform_real_distribution<double> u(a, b);
    return u(rng);
}

const Conic kInner = Conic::central(4.0, 1.0);   // x^2/4 + y^2 = 1
const Conic kOuter = Conic::central(9.0, 6.0);   // x^2/9 + y^2/6 = 1, confocal
const Conic kHyper = Conic::central(2.0, -1.0);  // x^2/2 - y^2 = 1, confocal

BilliardScene ellipse_pair_scene() {
    return build_scene(Type3Spec{kInner, kOuter});
}

ProjPoint on_ellipse(double a2, double b2, double theta) {
    return ProjPoint::finite(std::sqrt(a2) * std::cos(theta), std::sqrt(b2) * std::sin(theta));
}

} // namespace

TEST_CASE("reflection residual on explicit pencils") {
    const ProjPoint origin = ProjPoint::finite(0.0, 0.0);
    const ProjLine slope1(1.0, -1.0, 0.0), slope_1(1.0, 1.0, 0.0);

    REQUIRE(reflection_residual(slope1, slope_1, ProjLine::x_axis(), origin) < 1e-14);
    REQUIRE(std::abs(reflection_residual(slope1, slope1, ProjLine::x_axis(), origin) - M_PI / 2.0) < 1e-6);

    const ProjLine iso(Cx(0.0, 1.0), Cx(-1.0), Cx(0.0));  // y = ix
    REQUIRE(reflection_residual(slope1, iso, iso, origin) < 1e-14);

    REQUIRE_THROWS_AS(
        reflection_residual(slope1, slope_1, ProjLine::x_axis(), ProjPoint::finite(0.5, 0.5)),
        PointNotIncident);
}

TEST_CASE("orbit extension on a confocal ellipse pair") {
    const BilliardScene scene = ellipse_pair_scene();

    SECTION("generic seed closes with one orbit") {
        const ProjPoint A = on_ellipse(4.0, 1.0, 0.3);
        const ProjPoint B = on_ellipse(9.0, 6.0, 1.1);
        auto orbits = extend_orbit(scene, A, B, 1e-8);
        REQUIRE(orbits.size() == 1);
        REQUIRE(orbits[0].max_residual() < 1e-9);
        REQUIRE(proj_equal(orbits[0].vertices[0], A));
        REQUIRE(proj_equal(orbits[0].vertices[1], B));
    }

    SECTION("seed with AB tangent to the second mirror is degenerate") {
        const ProjPoint B = on_ellipse(9.0, 6.0, 0.7);
        const ProjLine tb = tangent_line_at(kOuter, B);
        const ProjPoint A = intersect_line(kInner, tb).front().point;  // complex contact
        REQUIRE_THROWS_AS(extend_orbit(scene, A, B, 1e-8), DegenerateSeed);
    }

    SECTION("coinciding seed vertices are degenerate") {
        const BilliardScene eh = build_scene(Type3Spec{kInner, kHyper});
        const ProjPoint p = ProjPoint::finite(std::sqrt(8.0 / 3.0), std::sqrt(1.0 / 3.0));
        REQUIRE_THROWS_AS(extend_orbit(eh, p, p, 1e-8), DegenerateSeed);
    }

    SECTION("closure residual is invariant under cyclic relabeling") {
        const ProjPoint A = on_ellipse(4.0, 1.0, 0.9);
        const ProjPoint B = on_ellipse(9.0, 6.0, 2.0);
        auto orbits = extend_orbit(scene, A, B, 1e-8);
        REQUIRE(orbits.size() == 1);
        const QuadOrbit& q = orbits[0];
        auto shifted = extend_orbit(scene.cycled(1), q.vertices[1], q.vertices[2], 1e-8);
        REQUIRE(shifted.size() == 1);
        REQUIRE(std::abs(shifted[0].max_residual() - q.max_residual()) < 1e-12);
    }
}

TEST_CASE("perturbed outer ellipse never closes") {
    const Conic outer_bad = Conic::central(9.2, 6.0);
    BilliardScene scene{Mirror(kInner), Mirror(outer_bad), Mirror(kInner), Mirror(outer_bad)};
    const ProjPoint A = on_ellipse(4.0, 1.0, 0.4);
    const ProjPoint B = on_ellipse(9.2, 6.0, 1.3);
    REQUIRE(extend_orbit(scene, A, B, 1e-6).empty());
    auto cands = extend_orbit_candidates(scene, A, B, 1e-6);
    REQUIRE_FALSE(cands.empty());
    REQUIRE(cands.front().max_residual() > 1e-3);
}

TEST_CASE("reflectivity scan statistics") {
    SECTION("confocal ellipse pair closes almost everywhere") {
        ScanOptions opt;
        opt.grid = 10;
        auto rep = reflectivity_scan(ellipse_pair_scene(), opt);
        REQUIRE(rep.fraction_closing >= 0.95);
        REQUIRE(rep.median_residual < 1e-10);
    }
    SECTION("four concurrent lines close almost everywhere") {
        auto scene = build_scene(Type2Spec{ProjPoint::finite(0.0, 0.0), 0.0, 10.0, 30.0});
        ScanOptions opt;
        opt.grid = 10;
        auto rep = reflectivity_scan(scene, opt);
        REQUIRE(rep.fraction_closing >= 0.95);
    }
    SECTION("non-confocal pair closes almost nowhere") {
        const Conic outer_bad = Conic::central(9.2, 6.0);
        BilliardScene scene{Mirror(kInner), Mirror(outer_bad), Mirror(kInner), Mirror(outer_bad)};
        ScanOptions opt;
        opt.grid = 10;
        opt.tol = 1e-6;
        auto rep = reflectivity_scan(scene, opt);
        REQUIRE(rep.fraction_closing <= 0.05);
        REQUIRE(rep.median_residual > 1e-3);
    }
    SECTION("coinciding neighbor mirrors never report closure") {
        BilliardScene scene{Mirror(kInner), Mirror(kInner), Mirror(kHyper), Mirror(kHyper)};
        ScanOptions opt;
        opt.grid = 8;
        auto rep = reflectivity_scan(scene, opt);
        REQUIRE(rep.fraction_closing <= 0.05);
    }
    SECTION("complex jittered seeds close as well: the orbit set is open") {
        ScanOptions opt;
        opt.grid = 6;
        opt.imag_jitter = 0.02;
        opt.seed = 7;
        auto rep = reflectivity_scan(ellipse_pair_scene(), opt);
        REQUIRE(rep.fraction_closing >= 0.95);
    }
}

TEST_CASE("orbit extension is generically single-valued on type-3 scenes") {
    const BilliardScene scene = ellipse_pair_scene();
    int multi = 0, attempted = 0;
    for (int k = 0; k < 1000; ++k) {
        const ProjPoint A = on_ellipse(4.0, 1.0, uniform(0.0, 2.0 * M_PI));
        const ProjPoint B = on_ellipse(9.0, 6.0, uniform(0.0, 2.0 * M_PI));
        try {
            auto orbits = extend_orbit(scene, A, B, 1e-8);
            ++attempted;
            // count projectively distinct closing orbits
            int distinct = 0;
            for (std::size_t i = 0; i < orbits.size(); ++i) {
                bool dup = false;
                for (std::size_t j = 0; j < i; ++j) {
                    bool same = true;
                    for (int v = 0; v < 4; ++v)
                        if (!proj_equal(orbits[i].vertices[v], orbits[j].vertices[v], 1e-7)) same = false;
                    if (same) dup = true;
                }
                if (!dup) ++distinct;
            }
            if (distinct > 1) ++multi;
        } catch (const DegenerateSeed&) {
        }
    }
    REQUIRE(attempted > 950);
    REQUIRE(multi <= attempted / 100);
}

TEST_CASE("scene construction") {
    SECTION("type 1: mirror image across the axis") {
        const ParamCurve parab = ParamCurve::graph_of(Poly({Cx(1.0), Cx(0.0), Cx(1.0)}));  // y = x^2 + 1
        auto scene = build_scene(Type1Spec{ProjLine::x_axis(), Mirror(parab)});
        REQUIRE(scene.mirrors[0].kind() == MirrorKind::Line);
        REQUIRE(mirrors_equal(scene.mirrors[0], scene.mirrors[2]));
        const ParamCurve want = ParamCurve::graph_of(Poly({Cx(-1.0), Cx(0.0), Cx(-1.0)}));  // y = -x^2 - 1
        REQUIRE(mirrors_equal(scene.mirrors[3], Mirror(want)));
    }
    SECTION("type 2: the four symmetries compose to the identity") {
        auto scene = build_scene(Type2Spec{ProjPoint::finite(0.0, 0.0), 0.0, 10.0, 30.0});
        ProjMap total = line_symmetry(scene.mirrors[0].line())
                            .compose(line_symmetry(scene.mirrors[1].line()))
                            .compose(line_symmetry(scene.mirrors[2].line()))
                            .compose(line_symmetry(scene.mirrors[3].line()));
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const ProjLine l(Cx(uniform(-1, 1), uniform(-1, 1)), Cx(uniform(-1, 1), uniform(-1, 1)),
                             Cx(uniform(-1, 1), uniform(-1, 1)));
            const ProjLine img = total.apply_line(l);
            worst = std::max(worst, chordal3(img.h, l.h));
        }
        REQUIRE(worst < 1e-12);
    }
    SECTION("type 3 requires confocality") {
        REQUIRE_THROWS_AS(build_scene(Type3Spec{kInner, Conic::central(9.2, 6.0)}), InvalidSpec);
        auto scene = build_scene(Type3Spec{kInner, kHyper});
        REQUIRE(mirrors_equal(scene.mirrors[1], scene.mirrors[3]));
    }
    SECTION("type 1 closing orbits are symmetric across the axis") {
        const ParamCurve parab = ParamCurve::graph_of(Poly({Cx(1.0), Cx(0.0), Cx(1.0)}));
        auto scene = build_scene(Type1Spec{ProjLine::x_axis(), Mirror(parab)});
        const ProjMap sym = line_symmetry(ProjLine::x_axis());
        int checked = 0;
        for (int k = 0; k < 40; ++k) {
            try {
                const ProjPoint A = ProjPoint::finite(uniform(-2.0, 2.0), 0.0);
                const double t = uniform(-1.5, 1.5);
                const ProjPoint B = ProjPoint::finite(t, t * t + 1.0);
                for (const auto& q : extend_orbit(scene, A, B, 1e-8)) {
                    REQUIRE(chordal3(sym.apply(q.vertices[1]).h, q.vertices[3].h) < 1e-8);
                    ++checked;
                }
            } catch (const DegenerateSeed&) {
            }
        }
        REQUIRE(checked > 10);
    }
}

TEST_CASE("concentric circle construction") {
    SECTION("random valid seeds close to machine precision") {
        int done = 0;
        while (done < 50) {
            const double ta = uniform(0.0, 2.0 * M_PI), tb = uniform(0.0, 2.0 * M_PI);
            try {
                const QuadOrbit q = concentric_circle_orbit(1.0, 2.0, ta, tb);
                REQUIRE(q.max_residual() < 1e-10);
                ++done;
            } catch (const SegmentCrossesSmallDisk&) {
            }
        }
    }
    SECTION("the worked seed closes") {
        const QuadOrbit q = concentric_circle_orbit(1.0, 2.0, M_PI / 3.0, 0.0);
        REQUIRE(q.max_residual() < 1e-10);
    }
    SECTION("construction is equivariant under reflection of the seed") {
        // mirror-image seeds give the mirror-image quadrilateral
        const double ta = 0.8, tb = 0.4;
        const QuadOrbit q = concentric_circle_orbit(1.0, 2.0, ta, tb);
        const QuadOrbit m = concentric_circle_orbit(1.0, 2.0, -ta, -tb);
        for (int v = 0; v < 4; ++v) {
            REQUIRE(std::abs(q.vertices[v].x() - m.vertices[v].x()) < 1e-12);
            REQUIRE(std::abs(q.vertices[v].y() + m.vertices[v].y()) < 1e-12);
        }
    }
    SECTION("a segment through the small disk is rejected") {
        REQUIRE_THROWS_AS(concentric_circle_orbit(1.0, 2.0, 5.0 * M_PI / 6.0, 0.0),
                          SegmentCrossesSmallDisk);
    }
}
