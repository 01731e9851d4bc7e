#pragma once

#include <optional>
#include <string>

#include "billiards/orbit.hpp"

namespace billiards {

enum class BilliardTypeTag {
    Type1SymmetricLine,
    Type2ConcurrentLines,
    Type3ConfocalConics,
    NotFourReflective,
};

struct BilliardType {
    BilliardTypeTag tag = BilliardTypeTag::NotFourReflective;
    std::optional<ProjLine> axis;               // type 1
    std::optional<ProjPoint> center;            // type 2
    std::optional<Cx> rotation_ratio;           // type 2: multiplier in the direction z-chart
    std::optional<double> rotation_degrees;     // real part of the rotation when unimodular
    std::optional<ConfocalClass> confocal;      // type 3
    ScanReport scan;
};

namespace detail {

inline std::optional<ProjLine> match_type1(const BilliardScene& scene, double tol) {
    for (int shift = 0; shift < 4; ++shift) {
        const Mirror& a = scene.mirror(shift);
        const Mirror& c = scene.mirror(shift + 2);
        if (a.kind() != MirrorKind::Line || c.kind() != MirrorKind::Line) continue;
        if (!proj_equal(a.line(), c.line(), tol)) continue;
        if (is_isotropic(a.line())) continue;
        const Mirror& b = scene.mirror(shift + 1);
        const Mirror& d = scene.mirror(shift + 3);
        if (b.kind() == MirrorKind::Line && proj_equal(b.line(), a.line(), tol)) continue;
        const ProjMap sym = line_symmetry(a.line());
        try {
            if (mirrors_equal(d, b.transformed(sym), std::max(tol, 1e-8))) return a.line();
        } catch (const GeometryError&) {
        }
    }
    return std::nullopt;
}

struct Type2Match {
    ProjPoint center;
    Cx ratio;
};

inline std::optional<Type2Match> match_type2(const BilliardScene& scene, double tol) {
    std::array<ProjLine, 4> l;
    for (int i = 0; i < 4; ++i) {
        if (scene.mirrors[i].kind() != MirrorKind::Line) return std::nullopt;
        l[i] = scene.mirrors[i].line();
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (proj_equal(l[i], l[j], tol)) return std::nullopt;
    ProjPoint center = meet(l[0], l[1]);
    for (int i = 2; i < 4; ++i)
        if (std::abs(dotc(l[i].h, center.h)) > tol * 10.0) return std::nullopt;

    // the four symmetries must compose to the identity
    Mat3 total = Mat3::Identity();
    for (int i = 0; i < 4; ++i) total = total * line_symmetry(l[i]).m;
    total /= total.norm() / std::sqrt(3.0);
    Cx trace = (total(0, 0) + total(1, 1) + total(2, 2)) / 3.0;
    if ((total - trace * Mat3::Identity()).norm() > 1e-7) return std::nullopt;

    const ExtComplex za = direction_z(l[0]), zb = direction_z(l[1]);
    const ExtComplex zc = direction_z(l[2]), zd = direction_z(l[3]);
    if (za.infinite || zb.infinite || zc.infinite || zd.infinite) return std::nullopt;
    const Cx r1 = zd.value / za.value, r2 = zc.value / zb.value;
    if (std::abs(r1 - r2) > 1e-8 * std::max(1.0, std::abs(r1))) return std::nullopt;
    return Type2Match{center, r1};
}

struct Type3Match {
    Conic a, b;
    ConfocalClass confocal;
};

inline std::optional<Type3Match> match_type3(const BilliardScene& scene, double tol) {
    for (int i = 0; i < 4; ++i)
        if (scene.mirrors[i].kind() != MirrorKind::Conic) return std::nullopt;
    const Conic& a = scene.mirrors[0].conic();
    const Conic& b = scene.mirrors[1].conic();
    if (!proj_equal(a, scene.mirrors[2].conic(), tol)) return std::nullopt;
    if (!proj_equal(b, scene.mirrors[3].conic(), tol)) return std::nullopt;
    if (proj_equal(a, b, tol)) return std::nullopt;
    if (!a.is_smooth() || !b.is_smooth()) return std::nullopt;
    auto cls = confocality_class(a, b);
    if (cls.tag == ConfocalTag::NotConfocal) return std::nullopt;
    return Type3Match{a, b, cls};
}

inline BilliardType classify_structural(const BilliardScene& scene, double tol) {
    BilliardType out;
    if (auto axis = match_type1(scene, tol)) {
        out.tag = BilliardTypeTag::Type1SymmetricLine;
        out.axis = *axis;
        return out;
    }
    if (auto t2 = match_type2(scene, tol)) {
        out.tag = BilliardTypeTag::Type2ConcurrentLines;
        out.center = t2->center;
        out.rotation_ratio = t2->ratio;
        if (std::abs(std::abs(t2->ratio) - 1.0) < 1e-8) {
            double deg = std::arg(t2->ratio) / 2.0 * 180.0 / M_PI;
            out.rotation_degrees = deg;
        }
        return out;
    }
    if (auto t3 = match_type3(scene, tol)) {
        out.tag = BilliardTypeTag::Type3ConfocalConics;
        out.confocal = t3->confocal;
        return out;
    }
    return out;
}

} // namespace detail

// Structural decision with a scan as a tolerance guard: the two must agree,
// otherwise the classification is reported as Inconsistent rather than
// silently resolved.
inline BilliardType classify_scene(const BilliardScene& scene, double tol = 1e-8,
                                   const ScanOptions& scan_options = ScanOptions{.grid = 8}) {
    BilliardType out = detail::classify_structural(scene, tol);
    out.scan = reflectivity_scan(scene, scan_options);
    const bool structural_positive = out.tag != BilliardTypeTag::NotFourReflective;
    if (structural_positive && out.scan.fraction_closing < 0.95)
        throw Inconsistent("structural type found but the scan does not close");
    if (!structural_positive && out.scan.fraction_closing > 0.05)
        throw Inconsistent("no structural type but the scan closes");
    return out;
}

enum class GenusType { Elliptic, RationalOneNode, RationalDegree2Cusp, TwoSmoothRational };

inline const char* genus_name(GenusType g) {
    switch (g) {
        case GenusType::Elliptic: return "Elliptic";
        case GenusType::RationalOneNode: return "RationalOneNode";
        case GenusType::RationalDegree2Cusp: return "RationalDegree2Cusp";
        case GenusType::TwoSmoothRational: return "TwoSmoothRational";
    }
    return "?";
}

struct GammaDescriptor {
    ProjLine line;        // shared isotropic tangent line
    ProjPoint a_touch;    // tangency point on mirror a
    ProjPoint b_touch;    // tangency point on mirror b
};

// Catalogue of the degenerate-orbit curves of a type-3 scene: the two
// tangency curves (with their genus label driven by the contact pattern of
// the conic pair) and one quadruple of pinned curves per shared isotropic
// tangent line.
struct DegenerateCatalogue {
    GenusType genus = GenusType::Elliptic;
    TangencyClass tangency;
    std::vector<GammaDescriptor> gamma;
};

namespace detail {

inline Type3Match require_type3(const BilliardScene& scene, double tol = 1e-8) {
    auto t3 = match_type3(scene, tol);
    if (!t3) throw NotType3("operation requires a type-3 scene");
    return *t3;
}

} // namespace detail

inline DegenerateCatalogue degenerate_catalogue(const BilliardScene& scene, double tol = 1e-8) {
    auto t3 = detail::require_type3(scene, tol);
    DegenerateCatalogue out;
    out.tangency = tangency_class(t3.a, t3.b);
    switch (out.tangency.tag) {
        case TangencyTag::NotTangent: out.genus = GenusType::Elliptic; break;
        case TangencyTag::SingleQuadratic: out.genus = GenusType::RationalOneNode; break;
        case TangencyTag::TripleContact: out.genus = GenusType::RationalDegree2Cusp; break;
        case TangencyTag::TwoIsotropicPoints: out.genus = GenusType::TwoSmoothRational; break;
    }
    // one descriptor per distinct shared isotropic tangent line
    std::vector<ProjLine> seen;
    for (const auto& t : isotropic_tangents(t3.a).lines) {
        bool dup = false;
        for (const auto& s : seen)
            if (proj_equal(t.line, s, 1e-8)) dup = true;
        if (dup) continue;
        seen.push_back(t.line);
        GammaDescriptor g;
        g.line = t.line;
        auto pa = intersect_line(t3.a, t.line);
        auto pb = intersect_line(t3.b, t.line);
        if (pa.size() != 1 || pb.size() != 1) continue;  // not tangent to both: skip
        g.a_touch = pa[0].point;
        g.b_touch = pb[0].point;
        out.gamma.push_back(g);
    }
    return out;
}

// Degenerate quadrilateral A B C B at a given B on mirror b: the two tangent
// lines from B touch mirror a at A and C.
inline std::optional<QuadOrbit> tangency_quadrilateral(const BilliardScene& scene,
                                                       const ProjPoint& B, double margin = 1e-4) {
    auto t3 = detail::require_type3(scene);
    if (std::abs(t3.a.eval(B)) < margin) return std::nullopt;  // too close to mirror a
    ProjLine tangent_b;
    try {
        tangent_b = tangent_line_at(t3.b, B, 1e-6);
    } catch (const GeometryError&) {
        return std::nullopt;
    }
    if (is_isotropic(tangent_b)) return std::nullopt;          // marked point
    auto tangents = tangents_from_point(t3.a, B);
    if (tangents.size() != 2) return std::nullopt;
    // order the two contact points deterministically
    std::sort(tangents.begin(), tangents.end(), [](const TangentLine& x, const TangentLine& y) {
        const Cx xy = x.touch.h(1) / x.touch.h(2), yy = y.touch.h(1) / y.touch.h(2);
        if (xy.real() != yy.real()) return xy.real() < yy.real();
        return xy.imag() < yy.imag();
    });
    QuadOrbit q;
    q.vertices = {tangents[0].touch, B, tangents[1].touch, B};
    q.tangents = {tangents[0].line, tangent_b, tangents[1].line, tangent_b};
    q.edges = {tangents[0].line, tangents[1].line, tangents[1].line, tangents[0].line};
    try {
        detail::fill_residuals(q, 1e-5);
    } catch (const GeometryError&) {
        return std::nullopt;
    }
    detail::fill_flags(q, 1e-9);
    return q;
}

// Tangency curve sampler over a sweep of B on mirror b.
inline std::vector<QuadOrbit> sample_T_a(const BilliardScene& scene, int n, double margin = 1e-4) {
    detail::require_type3(scene);
    std::vector<QuadOrbit> out;
    const Mirror& mb = scene.mirrors[1];
    for (int k = 0; k < n; ++k) {
        const double t01 = (k + 0.5) / n;
        try {
            if (auto q = tangency_quadrilateral(scene, mb.sample(Cx(t01)), margin)) out.push_back(*q);
        } catch (const GeometryError&) {
        }
    }
    return out;
}

struct GammaCurveReport {
    std::vector<QuadOrbit> quads;
    bool projection_A_injective = true;
    bool projection_B_injective = true;
    int excluded = 0;
};

// Pinned degenerate curve of a shared isotropic tangent line L: quadrilaterals
// A0 B0 A B with the fixed tangency vertices and the ordinary law at A and B.
inline GammaCurveReport gamma_curve(const BilliardScene& scene, const ProjLine& L, int n,
                                    double margin = 1e-3) {
    auto t3 = detail::require_type3(scene);
    auto pa = intersect_line(t3.a, L);
    auto pb = intersect_line(t3.b, L);
    if (pa.size() != 1 || pa[0].multiplicity != 2 || pb.size() != 1 || pb[0].multiplicity != 2)
        throw LineNotSharedTangent("line is not a shared isotropic tangent of the pair");
    const ProjPoint A0 = pa[0].point, B0 = pb[0].point;

    GammaCurveReport rep;
    const Mirror& ma = scene.mirrors[0];
    for (int k = 0; k < n; ++k) {
        const double t01 = (k + 0.5) / n;
        ProjPoint A;
        try {
            A = ma.sample(Cx(t01));
        } catch (const GeometryError&) {
            ++rep.excluded;
            continue;
        }
        if (proj_equal(A, A0, margin) || proj_equal(A, B0, margin)) {
            ++rep.excluded;
            continue;
        }
        try {
            const ProjLine e1 = join(B0, A);
            const ProjLine ta = tangent_line_at(t3.a, A, 1e-6);
            if (is_isotropic(ta)) { ++rep.excluded; continue; }
            const ProjLine e2 = line_symmetry(ta).apply_line(e1);
            QuadOrbit best;
            double best_res = std::numeric_limits<double>::infinity();
            for (const auto& bp : intersect_line(t3.b, e2)) {
                const ProjPoint& B = bp.point;
                if (proj_equal(B, B0, margin) || proj_equal(B, A, detail::kVertexTol)) continue;
                const ProjLine tb = tangent_line_at(t3.b, B, 1e-6);
                if (is_isotropic(tb)) continue;
                const ProjLine e3 = join(B, A0);
                const double res = reflection_residual(e2, e3, tb, B, 1e-5);
                if (res < best_res) {
                    best_res = res;
                    best.vertices = {A0, B0, A, B};
                    best.tangents = {L, L, ta, tb};
                    best.edges = {L, e1, e2, e3};
                }
            }
            if (!std::isfinite(best_res) || best_res > 1e-6) {
                ++rep.excluded;
                continue;
            }
            detail::fill_residuals(best, 1e-5);
            detail::fill_flags(best, 1e-9);
            rep.quads.push_back(best);
        } catch (const GeometryError&) {
            ++rep.excluded;
        }
    }

    auto injective = [](const GammaCurveReport& r, int idx) {
        for (std::size_t i = 0; i < r.quads.size(); ++i)
            for (std::size_t j = i + 1; j < r.quads.size(); ++j)
                if (proj_equal(r.quads[i].vertices[idx], r.quads[j].vertices[idx], 1e-8)) return false;
        return true;
    };
    rep.projection_A_injective = injective(rep, 2);
    rep.projection_B_injective = injective(rep, 3);
    return rep;
}

} // namespace billiards
