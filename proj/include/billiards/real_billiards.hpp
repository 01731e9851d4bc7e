#pragma once

#include <functional>
#include <map>
#include <string>

#include "billiards/classify.hpp"

namespace billiards {

enum class ReflectionLaw { Usual, Skew, NotReflective };

inline char law_letter(ReflectionLaw l) {
    switch (l) {
        case ReflectionLaw::Usual: return 'U';
        case ReflectionLaw::Skew: return 'S';
        case ReflectionLaw::NotReflective: return '-';
    }
    return '?';
}

// Real reflection law of the triple A, B, C against a line through B: usual
// when A and C lie on the same side of the line, skew when the line bisects
// the angle ABC (opposite sides).
inline ReflectionLaw classify_reflection_law(const Eigen::Vector2d& A, const Eigen::Vector2d& B,
                                             const Eigen::Vector2d& C, const ProjLine& L,
                                             double tol = 1e-8) {
    if ((A - B).norm() < 1e-12 || (C - B).norm() < 1e-12)
        throw VertexOnMirrorLine("degenerate triple: coinciding vertices");
    const double u = L.h(0).real(), v = L.h(1).real(), w = L.h(2).real();
    if (std::abs(L.h(0).imag()) + std::abs(L.h(1).imag()) + std::abs(L.h(2).imag()) > 1e-8)
        throw VertexOnMirrorLine("mirror line is not real");
    if (std::abs(u * B.x() + v * B.y() + w) > 1e-6 * (1.0 + B.norm()))
        throw PointNotIncident("mirror line must pass through the middle vertex");
    const double side_a = u * A.x() + v * A.y() + w;
    const double side_c = u * C.x() + v * C.y() + w;
    if (std::abs(side_a) < 1e-10 * (1.0 + A.norm()) || std::abs(side_c) < 1e-10 * (1.0 + C.norm()))
        throw VertexOnMirrorLine("vertex lies on the mirror line");

    const Eigen::Vector2d d(v, -u);  // line direction
    const Eigen::Vector2d in = A - B, out = C - B;
    const Eigen::Vector2d reflected = 2.0 * (in.dot(d) / d.squaredNorm()) * d - in;
    const double cross = reflected.x() * out.y() - reflected.y() * out.x();
    if (std::abs(cross) > tol * reflected.norm() * out.norm()) return ReflectionLaw::NotReflective;
    return side_a * side_c > 0.0 ? ReflectionLaw::Usual : ReflectionLaw::Skew;
}

struct LawSignature {
    std::array<ReflectionLaw, 4> at{ReflectionLaw::NotReflective, ReflectionLaw::NotReflective,
                                    ReflectionLaw::NotReflective, ReflectionLaw::NotReflective};

    std::string str() const {
        std::string s;
        for (auto l : at) s.push_back(law_letter(l));
        return s;
    }
    bool opposite_laws_equal() const { return at[0] == at[2] && at[1] == at[3]; }
    bool has_skew_pair() const {
        return (at[0] == ReflectionLaw::Skew && at[2] == ReflectionLaw::Skew) ||
               (at[1] == ReflectionLaw::Skew && at[3] == ReflectionLaw::Skew);
    }
};

struct RealBranch {
    std::string name;
    std::function<Eigen::Vector2d(double)> point;  // t in (0,1) -> plane point
};

// Real scene: a complex scene whose mirrors carry real points, together with
// per-mirror samplers of every real branch.
struct RealScene {
    BilliardScene scene;
    std::array<std::vector<RealBranch>, 4> branches;
};

namespace detail {

struct RealConicFrame {
    enum class Kind { Ellipse, Hyperbola, Parabola } kind;
    Eigen::Matrix2d rot;      // columns: local axes
    Eigen::Vector2d offset;   // center (vertex for a parabola)
    double a2 = 1.0, b2 = 1.0;  // canonical squared semi-axes
    double p = 1.0;             // parabola: local X^2 = 2 p Y
};

inline RealConicFrame analyze_real_conic(const Conic& conic) {
    Mat3 mc = conic.m;
    double imag_norm = 0.0, real_norm = 0.0;
    // a real conic may be normalized by a complex pivot; re-phase first
    int bi = 0, bj = 0;
    double bm = -1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::norm(mc(i, j)) > bm) { bm = std::norm(mc(i, j)); bi = i; bj = j; }
    mc /= mc(bi, bj);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            imag_norm += std::abs(mc(i, j).imag());
            real_norm += std::abs(mc(i, j).real());
        }
    if (imag_norm > 1e-8 * real_norm) throw SceneNotReflective("conic mirror has no real form");

    Eigen::Matrix2d A;
    A << mc(0, 0).real(), mc(0, 1).real(), mc(1, 0).real(), mc(1, 1).real();
    const Eigen::Vector2d b(mc(0, 2).real(), mc(1, 2).real());
    const double c = mc(2, 2).real();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
    const Eigen::Vector2d lam = es.eigenvalues();
    const Eigen::Matrix2d R = es.eigenvectors();
    const double scale = std::max(std::abs(lam(0)), std::abs(lam(1)));

    RealConicFrame out;
    if (std::min(std::abs(lam(0)), std::abs(lam(1))) > 1e-9 * scale) {
        // central conic
        const Eigen::Vector2d center = -A.ldlt().solve(b);
        const double f = c + b.dot(center);
        out.offset = center;
        if (lam(0) * lam(1) > 0.0) {
            out.kind = RealConicFrame::Kind::Ellipse;
            if (f * lam(0) >= 0.0) throw SceneNotReflective("ellipse has no real points");
            out.rot = R;
            out.a2 = -f / lam(0);
            out.b2 = -f / lam(1);
        } else {
            out.kind = RealConicFrame::Kind::Hyperbola;
            // orient the transverse axis first
            int ix = (-f / lam(0) > 0.0) ? 0 : 1;
            int iy = 1 - ix;
            out.rot.col(0) = R.col(ix);
            out.rot.col(1) = R.col(iy);
            out.a2 = -f / lam(ix);
            out.b2 = f / lam(iy);
            if (out.a2 <= 0.0 || out.b2 <= 0.0) throw SceneNotReflective("degenerate hyperbola frame");
        }
        return out;
    }

    // parabola: the near-null eigenvector is the axis direction
    const int in = (std::abs(lam(0)) <= std::abs(lam(1))) ? 0 : 1;
    const int iq = 1 - in;
    out.kind = RealConicFrame::Kind::Parabola;
    const Eigen::Vector2d axis = R.col(in), trans = R.col(iq);
    const double lq = lam(iq);
    const double beta = b.dot(axis);       // linear term along the axis
    const double gamma = b.dot(trans);     // linear term along the transverse direction
    if (std::abs(beta) < 1e-12 * scale) throw SceneNotReflective("degenerate parabola");
    // lq Y^2 + 2 gamma Y + 2 beta X + c = 0 in the (trans, axis) frame
    const double y0 = -gamma / lq;
    const double x0 = -(c - gamma * gamma / lq) / (2.0 * beta);
    out.rot.col(0) = trans;
    out.rot.col(1) = axis;
    out.offset = x0 * axis + y0 * trans;
    out.p = -beta / lq;  // local X^2 = 2 p Y
    return out;
}

inline std::vector<RealBranch> real_branches(const Mirror& m) {
    std::vector<RealBranch> out;
    switch (m.kind()) {
        case MirrorKind::Line: {
            const ProjLine l = m.line();
            if (std::abs(l.h(0).imag()) + std::abs(l.h(1).imag()) + std::abs(l.h(2).imag()) > 1e-8)
                throw SceneNotReflective("line mirror has no real form");
            const double u = l.h(0).real(), v = l.h(1).real(), w = l.h(2).real();
            const Eigen::Vector2d d(v, -u);
            const Eigen::Vector2d p0 = -w / (u * u + v * v) * Eigen::Vector2d(u, v);
            out.push_back({"line", [p0, d](double t) {
                               return Eigen::Vector2d(p0 + std::tan(M_PI * (t - 0.5)) * d);
                           }});
            break;
        }
        case MirrorKind::Conic: {
            const RealConicFrame f = analyze_real_conic(m.conic());
            if (f.kind == RealConicFrame::Kind::Ellipse) {
                const double a = std::sqrt(f.a2), bb = std::sqrt(f.b2);
                out.push_back({"ellipse", [f, a, bb](double t) {
                                   const double th = 2.0 * M_PI * t;
                                   return Eigen::Vector2d(
                                       f.rot * Eigen::Vector2d(a * std::cos(th), bb * std::sin(th)) +
                                       f.offset);
                               }});
            } else if (f.kind == RealConicFrame::Kind::Hyperbola) {
                const double a = std::sqrt(f.a2), bb = std::sqrt(f.b2);
                for (double sign : {1.0, -1.0}) {
                    out.push_back({sign > 0 ? "branch+" : "branch-", [f, a, bb, sign](double t) {
                                       const double s = 3.0 * (2.0 * t - 1.0);
                                       return Eigen::Vector2d(
                                           f.rot * Eigen::Vector2d(sign * a * std::cosh(s),
                                                                   bb * std::sinh(s)) +
                                           f.offset);
                                   }});
                }
            } else {
                out.push_back({"parabola", [f](double t) {
                                   const double u = 6.0 * (2.0 * t - 1.0) * std::sqrt(std::abs(f.p));
                                   return Eigen::Vector2d(
                                       f.rot * Eigen::Vector2d(u, u * u / (2.0 * f.p)) + f.offset);
                               }});
            }
            break;
        }
        case MirrorKind::Param: {
            const ParamCurve& pc = m.param();
            for (const Cx& co : pc.x.c)
                if (std::abs(co.imag()) > 1e-10) throw SceneNotReflective("curve mirror is not real");
            for (const Cx& co : pc.y.c)
                if (std::abs(co.imag()) > 1e-10) throw SceneNotReflective("curve mirror is not real");
            out.push_back({"curve", [pc](double t) {
                               const double s = std::tan(M_PI * (t - 0.5));
                               return Eigen::Vector2d(pc.x.eval(s).real(), pc.y.eval(s).real());
                           }});
            break;
        }
    }
    return out;
}

inline bool orbit_is_real(const QuadOrbit& q, double tol = 1e-6, double max_coord = 1e6) {
    for (const auto& v : q.vertices) {
        if (!v.is_finite(1.0 / max_coord)) return false;
        const Cx x = v.x(), y = v.y();
        const double scale = std::max({1.0, std::abs(x.real()), std::abs(y.real())});
        if (std::abs(x.imag()) > tol * scale || std::abs(y.imag()) > tol * scale) return false;
        if (std::abs(x.real()) > max_coord || std::abs(y.real()) > max_coord) return false;
    }
    return true;
}

// Flat quadrilaterals (all vertices on one line, e.g. bouncing along a common
// symmetry axis) are isolated periodic orbits, not members of the open
// two-parameter family.
inline bool orbit_is_flat(const QuadOrbit& q, double tol = 1e-9) {
    for (int i = 1; i < 4; ++i)
        if (chordal3(q.edges[0].h, q.edges[i].h) > tol) return false;
    return true;
}

} // namespace detail

inline RealScene make_real_scene(const BilliardScene& scene) {
    RealScene out;
    out.scene = scene;
    for (int i = 0; i < 4; ++i) out.branches[i] = detail::real_branches(scene.mirrors[i]);
    return out;
}

inline LawSignature label_orbit(const QuadOrbit& q) {
    LawSignature sig;
    for (int i = 0; i < 4; ++i) {
        auto v2 = [&](int k) {
            const auto& v = q.vertices[((k % 4) + 4) % 4];
            return Eigen::Vector2d(v.x().real(), v.y().real());
        };
        sig.at[i] = classify_reflection_law(v2(i - 1), v2(i), v2(i + 1), q.tangents[i]);
    }
    return sig;
}

struct RealOrbit {
    QuadOrbit orbit;
    LawSignature signature;
};

// Complex orbit extension restricted to real seeds; keeps closing orbits with
// real finite vertices and labels the law at every vertex.
inline std::vector<RealOrbit> find_real_orbits(const RealScene& rs,
                                               const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>>& seeds,
                                               double tol = 1e-8) {
    std::vector<RealOrbit> out;
    for (const auto& [pa, pb] : seeds) {
        try {
            const ProjPoint A = ProjPoint::finite(pa.x(), pa.y());
            const ProjPoint B = ProjPoint::finite(pb.x(), pb.y());
            for (const auto& q : extend_orbit(rs.scene, A, B, tol)) {
                if (!detail::orbit_is_real(q) || detail::orbit_is_flat(q)) continue;
                try {
                    out.push_back({q, label_orbit(q)});
                } catch (const GeometryError&) {
                }
            }
        } catch (const GeometryError&) {
        }
    }
    return out;
}

struct CensusEntry {
    int count = 0;
    RealOrbit representative;
};

using Census = std::map<std::string, CensusEntry>;

// Stratified law census: seeds are spread over every pair of real branches of
// the first two mirrors. The reduction is a commutative multiset union, so
// seed order does not matter.
inline Census law_signature_census(const RealScene& rs, int n, double tol = 1e-8) {
    if (detail::classify_structural(rs.scene, 1e-8).tag == BilliardTypeTag::NotFourReflective)
        throw SceneNotReflective("census requires a structurally reflective scene");
    const auto& ba = rs.branches[0];
    const auto& bb = rs.branches[1];
    const int strata = int(ba.size() * bb.size());
    const int per = std::max(2, int(std::ceil(std::sqrt(double(n) / std::max(1, strata)))));
    Census census;
    for (const auto& br_a : ba) {
        for (const auto& br_b : bb) {
            std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> seeds;
            for (int i = 0; i < per; ++i)
                for (int j = 0; j < per; ++j)
                    seeds.emplace_back(br_a.point((i + 0.5) / per), br_b.point((j + 0.5) / per));
            for (const auto& ro : find_real_orbits(rs, seeds, tol)) {
                auto& entry = census[ro.signature.str()];
                if (entry.count == 0) entry.representative = ro;
                entry.count += 1;
            }
        }
    }
    return census;
}

} // namespace billiards
