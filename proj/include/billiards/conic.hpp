#pragma once

#include <array>
#include <optional>
#include <vector>

#include "billiards/polynomial.hpp"
#include "billiards/projective.hpp"

namespace billiards {

inline constexpr double kClusterTol = 1e-7;  // multiplicity clustering of intersection points

namespace detail {

inline Mat3 adjugate3(const Mat3& m) {
    Mat3 a;
    a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return a;
}

inline Mat3 normalize_matrix(const Mat3& m) {
    double best = 0.0;
    Cx pivot{1.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::norm(m(i, j)) > best) { best = std::norm(m(i, j)); pivot = m(i, j); }
    if (best < 1e-300) throw ZeroHomogeneousTriple("conic matrix is numerically zero");
    return m / pivot;
}

inline double matrix_chordal(const Mat3& a, const Mat3& b) {
    Eigen::Matrix<Cx, 9, 1> va, vb;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) { va(3 * i + j) = a(i, j); vb(3 * i + j) = b(i, j); }
    const double na = va.norm(), nb = vb.norm();
    double s2 = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) s2 += std::norm(va(i) * vb(j) - va(j) * vb(i));
    return std::sqrt(s2) / (na * nb);
}

} // namespace detail

struct Conic {
    Mat3 m;  // symmetric, normalized so the largest-modulus entry is 1

    Conic() : m(Mat3::Identity()) {}
    explicit Conic(const Mat3& mat) {
        Mat3 s = (mat + mat.transpose()) / 2.0;
        m = detail::normalize_matrix(s);
    }

    // a x^2 + b xy + c y^2 + d x + e y + f = 0
    static Conic from_affine(Cx a, Cx b, Cx c, Cx d, Cx e, Cx f) {
        Mat3 mat;
        mat << a, b / 2.0, d / 2.0,
               b / 2.0, c, e / 2.0,
               d / 2.0, e / 2.0, f;
        return Conic(mat);
    }

    static Conic circle(Cx cx, Cx cy, Cx r2) {
        return from_affine(1.0, 0.0, 1.0, -2.0 * cx, -2.0 * cy, cx * cx + cy * cy - r2);
    }

    // x^2/ax + y^2/by = 1 (ellipse for positive, hyperbola when one is negative)
    static Conic central(Cx ax, Cx by) {
        return from_affine(1.0 / ax, 0.0, 1.0 / by, 0.0, 0.0, Cx(-1.0));
    }

    Cx eval(const ProjPoint& p) const { return dotc(p.h, m * p.h); }
    bool contains(const ProjPoint& p, double tol = kDefaultTol) const {
        return std::abs(eval(p)) <= tol;
    }
    bool is_smooth(double tol = kDefaultTol) const { return std::abs(m.determinant()) > tol; }
    Mat3 dual() const { return detail::adjugate3(m); }

    // image under a projective point map
    Conic transformed(const ProjMap& map) const {
        const Mat3 inv_t = map.adjugate();  // proportional to the inverse
        return Conic(inv_t.transpose() * m * inv_t);
    }
};

inline bool proj_equal(const Conic& a, const Conic& b, double tol = kProjEqTol) {
    return detail::matrix_chordal(a.m, b.m) < tol;
}

struct ConicPoint {
    ProjPoint point;
    int multiplicity = 1;
};

struct TangentLine {
    ProjLine line;
    int multiplicity = 1;
    ProjPoint touch;       // tangency point on the conic
    int through_index = 0; // 1 or 2 when issued from an isotropic point
};

struct IsotropicTangents {
    std::vector<TangentLine> lines;  // two through each isotropic point, with multiplicities

    int total_multiplicity() const {
        int s = 0;
        for (const auto& t : lines) s += t.multiplicity;
        return s;
    }
    std::vector<TangentLine> through(int idx) const {
        std::vector<TangentLine> out;
        for (const auto& t : lines)
            if (t.through_index == idx) out.push_back(t);
        return out;
    }
};

struct Focus {
    ProjPoint point;
    std::vector<std::pair<int, int>> pairs;  // indices into the tangent list (I1 side, I2 side)
};

struct FocusSet {
    std::vector<Focus> points;
    IsotropicTangents tangents;

    std::vector<ProjPoint> finite_points(double tol = 1e-9) const {
        std::vector<ProjPoint> out;
        for (const auto& f : points)
            if (f.point.is_finite(tol)) out.push_back(f.point);
        return out;
    }
};

namespace detail {

// two best-conditioned generators of the pencil of points on a line
inline std::pair<Vec3, Vec3> span_points(const ProjLine& l) {
    std::array<Vec3, 3> cand;
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e(k) = 1.0;
        cand[k] = crossc(l.h, e);
    }
    std::sort(cand.begin(), cand.end(), [](const Vec3& a, const Vec3& b) { return a.norm() > b.norm(); });
    Vec3 p0 = cand[0].normalized();
    // pick the remaining candidate least collinear with p0
    Vec3 p1 = cand[1];
    if (crossc(p0, cand[2]).norm() > crossc(p0, cand[1]).norm()) p1 = cand[2];
    return {p0, p1.normalized()};
}

// two best-conditioned generators of the pencil of lines through a point
inline std::pair<Vec3, Vec3> span_lines(const ProjPoint& p) {
    ProjLine as_line(p.h);  // dual trick: lines through p <-> points on p*
    auto [a, b] = span_points(as_line);
    return {a, b};
}

struct QuadraticOnPencil {
    // roots of a t^2 + b t + c as points g0 + t g1 (t = infinity gives g1)
    std::vector<std::pair<Vec3, int>> solutions;  // homogeneous solution, multiplicity
};

inline QuadraticOnPencil solve_pencil_quadratic(const Vec3& g0, const Vec3& g1, Cx a, Cx b, Cx c,
                                                double cluster_tol) {
    QuadraticOnPencil out;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale < 1e-300) return out;  // identically zero: pencil contained, caller guards
    const double eps = 1e-14 * scale;
    auto value_at = [&](Cx t) { return Vec3(g0 + t * g1); };
    if (std::abs(a) <= eps) {
        if (std::abs(b) <= eps) {
            out.solutions.emplace_back(g1, 2);  // double root at parameter infinity
            return out;
        }
        out.solutions.emplace_back(value_at(-c / b), 1);
        out.solutions.emplace_back(g1, 1);  // root at infinity of the parameter
        return out;
    }
    const Cx disc = b * b - 4.0 * a * c;
    Cx s = std::sqrt(disc);
    if (std::real(std::conj(b) * s) < 0.0) s = -s;
    const Cx q = -(b + s) / 2.0;
    const Cx t1 = q / a;
    const Cx t2 = (std::abs(q) > eps) ? (c / q) : t1;
    const Vec3 p1 = value_at(t1), p2 = value_at(t2);
    if (chordal3(p1, p2) < cluster_tol) {
        out.solutions.emplace_back(value_at(-b / (2.0 * a)), 2);
    } else {
        out.solutions.emplace_back(p1, 1);
        out.solutions.emplace_back(p2, 1);
    }
    return out;
}

inline void cluster_points(std::vector<ConicPoint>& pts, double tol) {
    std::vector<ConicPoint> merged;
    for (const auto& p : pts) {
        bool found = false;
        for (auto& q : merged) {
            if (proj_equal(p.point, q.point, tol)) {
                q.multiplicity += p.multiplicity;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(p);
    }
    pts = std::move(merged);
}

} // namespace detail

// Polar line of a point on the conic.
inline ProjLine tangent_line_at(const Conic& c, const ProjPoint& p, double tol = 1e-7) {
    if (!c.is_smooth()) throw PointNotOnConic("tangent on a degenerate conic");
    if (std::abs(c.eval(p)) > tol) throw PointNotOnConic("point is not on the conic");
    return ProjLine(Vec3(c.m * p.h));
}

inline std::vector<ConicPoint> intersect_line(const Conic& c, const ProjLine& l,
                                              double cluster_tol = kClusterTol) {
    auto [g0, g1] = detail::span_points(l);
    const Cx a = dotc(g1, c.m * g1);
    const Cx b = 2.0 * dotc(g0, c.m * g1);
    const Cx cc = dotc(g0, c.m * g0);
    auto sol = detail::solve_pencil_quadratic(g0, g1, a, b, cc, cluster_tol);
    std::vector<ConicPoint> out;
    for (auto& [h, mult] : sol.solutions) out.push_back({ProjPoint(h), mult});
    detail::cluster_points(out, cluster_tol);
    return out;
}

inline std::vector<TangentLine> tangents_from_point(const Conic& c, const ProjPoint& p,
                                                    double cluster_tol = kClusterTol) {
    const Mat3 d = c.dual();
    auto [g0, g1] = detail::span_lines(p);
    const Cx a = dotc(g1, d * g1);
    const Cx b = 2.0 * dotc(g0, d * g1);
    const Cx cc = dotc(g0, d * g0);
    auto sol = detail::solve_pencil_quadratic(g0, g1, a, b, cc, cluster_tol);
    std::vector<TangentLine> out;
    for (auto& [h, mult] : sol.solutions) {
        TangentLine t;
        t.line = ProjLine(h);
        t.multiplicity = mult;
        t.touch = ProjPoint(Vec3(d * t.line.h));  // pole of a tangent line
        out.push_back(t);
    }
    return out;
}

// Four isotropic tangent lines with multiplicities, two through each of
// (1:i:0) and (1:-i:0).
inline IsotropicTangents isotropic_tangents(const Conic& c, double cluster_tol = kClusterTol) {
    IsotropicTangents out;
    for (int idx = 1; idx <= 2; ++idx) {
        const ProjPoint& ip = (idx == 1) ? kIsotropicPoint1 : kIsotropicPoint2;
        for (auto t : tangents_from_point(c, ip, cluster_tol)) {
            t.through_index = idx;
            out.lines.push_back(t);
        }
    }
    return out;
}

// All pairwise intersections of a tangent through I1 with a distinct tangent
// through I2.
inline FocusSet foci(const Conic& c, double cluster_tol = kClusterTol) {
    FocusSet out;
    out.tangents = isotropic_tangents(c, cluster_tol);
    const auto& lines = out.tangents.lines;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].through_index != 1) continue;
        for (std::size_t j = 0; j < lines.size(); ++j) {
            if (lines[j].through_index != 2) continue;
            if (proj_equal(lines[i].line, lines[j].line, 1e-8)) continue;
            ProjPoint f = meet(lines[i].line, lines[j].line);
            bool merged = false;
            for (auto& existing : out.points) {
                if (proj_equal(existing.point, f, 1e-8)) {
                    existing.pairs.emplace_back(int(i), int(j));
                    merged = true;
                    break;
                }
            }
            if (!merged) out.points.push_back({f, {{int(i), int(j)}}});
        }
    }
    return out;
}

// Conic-conic intersection through pencil degeneration: pick a degenerate
// member det(M1 + t M2) = 0, split it into two lines, intersect with C1.
inline std::vector<ConicPoint> intersect_conic(const Conic& c1, const Conic& c2,
                                               double cluster_tol = kClusterTol) {
    if (proj_equal(c1, c2)) throw IdenticalConics("conic self-intersection");
    // det(A + t B) = sum over column substitutions
    const Mat3& A = c1.m;
    const Mat3& B = c2.m;
    auto det_cols = [](const Vec3& a, const Vec3& b, const Vec3& c) { return dotc(a, crossc(b, c)); };
    const Vec3 a0 = A.col(0), a1 = A.col(1), a2 = A.col(2);
    const Vec3 b0 = B.col(0), b1 = B.col(1), b2 = B.col(2);
    Poly cubic({det_cols(a0, a1, a2),
                det_cols(b0, a1, a2) + det_cols(a0, b1, a2) + det_cols(a0, a1, b2),
                det_cols(a0, b1, b2) + det_cols(b0, a1, b2) + det_cols(b0, b1, a2),
                det_cols(b0, b1, b2)});
    auto raw_roots = poly_roots(cubic);
    if (raw_roots.empty()) throw IdenticalConics("pencil has no degenerate member");

    // multiple roots of the pencil cubic come out smeared; a k-fold cluster is
    // a simple (hence well-conditioned) root of the (k-1)-th derivative
    std::vector<Cx> roots;
    std::vector<bool> used(raw_roots.size(), false);
    for (std::size_t i = 0; i < raw_roots.size(); ++i) {
        if (used[i]) continue;
        Cx sum = raw_roots[i];
        int count = 1;
        for (std::size_t j = i + 1; j < raw_roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(raw_roots[j] - raw_roots[i]) < 1e-4 * (1.0 + std::abs(raw_roots[i]))) {
                sum += raw_roots[j];
                used[j] = true;
                ++count;
            }
        }
        Cx lambda = sum / double(count);
        if (count >= 2) {
            Poly d = cubic;
            for (int k = 1; k < count; ++k) d = d.derivative();
            Cx best = lambda;
            double best_dist = std::numeric_limits<double>::infinity();
            for (const Cx& r : poly_roots(d)) {
                const double dist = std::abs(r - lambda);
                if (dist < best_dist) { best_dist = dist; best = r; }
            }
            if (best_dist < 1e-3 * (1.0 + std::abs(lambda))) lambda = best;
        }
        roots.push_back(lambda);
    }

    // prefer a rank-2 degenerate member (largest adjugate)
    Mat3 best_d;
    double best_adj = -1.0;
    for (const auto& r : roots) {
        Mat3 d = A + r * B;
        d = (d + d.transpose().eval()) / 2.0;
        const double na = detail::adjugate3(d).norm();
        const double nd = d.norm();
        if (nd < 1e-300) continue;
        const double score = na / (nd * nd);
        if (score > best_adj) { best_adj = score; best_d = d; }
    }
    Mat3 d = detail::normalize_matrix(best_d);
    Mat3 adj = detail::adjugate3(d);

    // split the degenerate conic into two lines g, h
    Vec3 g, h;
    if (adj.norm() > 1e-10) {
        int i = 0;
        double best = 0.0;
        for (int k = 0; k < 3; ++k)
            if (std::norm(adj(k, k)) > best) { best = std::norm(adj(k, k)); i = k; }
        const Cx beta = std::sqrt(-adj(i, i));
        Mat3 skew = Mat3::Zero();
        if (std::abs(beta) > 1e-300) {
            const Vec3 p = adj.col(i) / beta;
            skew << Cx(0.0), -p(2), p(1),
                    p(2), Cx(0.0), -p(0),
                    -p(1), p(0), Cx(0.0);
        }
        const Mat3 rank1 = d + skew;
        int bi = 0, bj = 0;
        double bm = -1.0;
        for (int r = 0; r < 3; ++r)
            for (int cidx = 0; cidx < 3; ++cidx)
                if (std::norm(rank1(r, cidx)) > bm) { bm = std::norm(rank1(r, cidx)); bi = r; bj = cidx; }
        g = rank1.row(bi).transpose();
        h = rank1.col(bj);
    } else {
        // double line
        int bj = 0;
        double bm = -1.0;
        for (int cidx = 0; cidx < 3; ++cidx)
            if (d.col(cidx).norm() > bm) { bm = d.col(cidx).norm(); bj = cidx; }
        g = d.col(bj);
        h = g;
    }

    std::vector<ConicPoint> out;
    for (const Vec3& lv : {g, h}) {
        for (auto& pt : intersect_line(c1, ProjLine(lv), cluster_tol)) out.push_back(pt);
    }
    detail::cluster_points(out, cluster_tol);
    return out;
}

enum class ConfocalTag { TransverseHyperbolas, NonIsotropicParabolas, IsotropicParabolas, NotConfocal };

struct ConfocalClass {
    ConfocalTag tag = ConfocalTag::NotConfocal;
    std::vector<ProjLine> shared_lines;            // matched isotropic tangents
    std::optional<ProjPoint> infinity_contact;     // common tangency point with the infinity line
    std::optional<std::pair<Cx, Cx>> translation;  // case-3 witness vector
};

enum class TangencyTag { NotTangent, SingleQuadratic, TwoIsotropicPoints, TripleContact };

struct TangencyClass {
    TangencyTag tag = TangencyTag::NotTangent;
    std::vector<ConicPoint> contacts;       // tangency points with multiplicities
    std::vector<ProjLine> contact_lines;    // common tangent lines at the contacts
    std::vector<ConicPoint> intersections;  // full intersection pattern
};

namespace detail {

inline bool match_line_multisets(const std::vector<TangentLine>& a, const std::vector<TangentLine>& b,
                                 std::vector<ProjLine>* matched, double tol) {
    int ta = 0, tb = 0;
    for (const auto& t : a) ta += t.multiplicity;
    for (const auto& t : b) tb += t.multiplicity;
    if (ta != tb) return false;
    std::vector<int> remaining(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) remaining[j] = b[j].multiplicity;
    for (const auto& t : a) {
        int need = t.multiplicity;
        for (std::size_t j = 0; j < b.size() && need > 0; ++j) {
            if (remaining[j] == 0) continue;
            if (proj_equal(t.line, b[j].line, tol)) {
                const int take = std::min(need, remaining[j]);
                remaining[j] -= take;
                need -= take;
            }
        }
        if (need > 0) return false;
        if (matched) matched->push_back(t.line);
    }
    return true;
}

inline bool tangent_to_infinity_line(const Conic& c, double tol) {
    // infinity line on the dual conic
    const Mat3 d = c.dual();
    const Cx v = d(2, 2);
    return std::abs(v) <= tol * d.norm();
}

inline ProjPoint infinity_tangency_point(const Conic& c) {
    Vec3 p = c.dual() * Vec3(0.0, 0.0, 1.0);  // pole of the infinity line
    return ProjPoint(p);
}

} // namespace detail

// Decides how (and whether) two smooth conics are confocal, by the shape of
// their isotropic tangent configurations.
inline ConfocalClass confocality_class(const Conic& c1, const Conic& c2, double tol = 1e-8) {
    if (proj_equal(c1, c2)) throw IdenticalConics("confocality of a conic with itself");
    if (!c1.is_smooth() || !c2.is_smooth()) throw IdenticalConics("confocality needs smooth conics");

    ConfocalClass out;
    const bool t1 = detail::tangent_to_infinity_line(c1, tol);
    const bool t2 = detail::tangent_to_infinity_line(c2, tol);
    if (t1 != t2) return out;

    const auto iso1 = isotropic_tangents(c1);
    const auto iso2 = isotropic_tangents(c2);

    if (!t1) {
        std::vector<ProjLine> matched;
        if (detail::match_line_multisets(iso1.lines, iso2.lines, &matched, tol)) {
            out.tag = ConfocalTag::TransverseHyperbolas;
            out.shared_lines = std::move(matched);
        }
        return out;
    }

    const ProjPoint o1 = detail::infinity_tangency_point(c1);
    const ProjPoint o2 = detail::infinity_tangency_point(c2);
    if (!proj_equal(o1, o2, tol)) return out;
    out.infinity_contact = o1;

    const bool iso_contact = proj_equal(o1, kIsotropicPoint1, tol) || proj_equal(o1, kIsotropicPoint2, tol);

    auto finite_lines = [&](const IsotropicTangents& iso) {
        std::vector<TangentLine> fin;
        for (const auto& t : iso.lines)
            if (!is_infinity_line(t.line, tol)) fin.push_back(t);
        return fin;
    };
    const auto f1 = finite_lines(iso1), f2 = finite_lines(iso2);
    std::vector<ProjLine> matched;
    if (!detail::match_line_multisets(f1, f2, &matched, tol)) return out;

    if (!iso_contact) {
        out.tag = ConfocalTag::NonIsotropicParabolas;
        out.shared_lines = std::move(matched);
        return out;
    }

    // isotropic contact: conics must be translates of each other, which is
    // equivalent to contact of order >= 3 at the common infinite point
    auto pts = intersect_conic(c1, c2);
    int contact_mult = 0;
    for (const auto& p : pts)
        if (proj_equal(p.point, o1, 1e-6)) contact_mult = std::max(contact_mult, p.multiplicity);
    if (contact_mult < 3) return out;

    out.tag = ConfocalTag::IsotropicParabolas;
    out.shared_lines = matched;
    // translation witness from the tangency points of the shared finite
    // isotropic tangent line
    if (!matched.empty()) {
        auto p1 = intersect_line(c1, matched.front());
        auto p2 = intersect_line(c2, matched.front());
        if (p1.size() == 1 && p2.size() == 1 && p1[0].point.is_finite() && p2[0].point.is_finite()) {
            out.translation = std::make_pair(p2[0].point.x() - p1[0].point.x(),
                                             p2[0].point.y() - p1[0].point.y());
        }
    }
    return out;
}

// Contact pattern of a confocal pair, from intersection multiplicities.
inline TangencyClass tangency_class(const Conic& c1, const Conic& c2, double tol = 1e-8) {
    const auto cls = confocality_class(c1, c2, tol);
    if (cls.tag == ConfocalTag::NotConfocal) throw NotConfocal("tangency class needs a confocal pair");

    TangencyClass out;
    out.intersections = intersect_conic(c1, c2);
    int max_mult = 1;
    for (const auto& p : out.intersections) {
        if (p.multiplicity >= 2) {
            out.contacts.push_back(p);
            out.contact_lines.push_back(tangent_line_at(c1, p.point, 1e-6));
        }
        max_mult = std::max(max_mult, p.multiplicity);
    }
    if (out.contacts.empty()) {
        out.tag = TangencyTag::NotTangent;
    } else if (max_mult >= 3) {
        out.tag = TangencyTag::TripleContact;
    } else if (out.contacts.size() == 2) {
        out.tag = TangencyTag::TwoIsotropicPoints;
    } else {
        out.tag = TangencyTag::SingleQuadratic;
    }
    return out;
}

enum class ConfocalKind { Ellipse, Hyperbola, Parabola };

// Classical real confocal families. Central kinds: foci (+-c, 0) and member
// x^2/(c^2+1+lambda) + y^2/(1+lambda) = 1. Parabola kind: focus at the
// origin, axis vertical, member x^2 = 2p(y + p/2) with p = lambda.
inline Conic confocal_family_real(ConfocalKind kind, double c, double lambda) {
    switch (kind) {
        case ConfocalKind::Ellipse: {
            const double s = 1.0 + lambda;
            if (s <= 1e-12) throw LambdaOutOfRange("ellipse member needs lambda > -1");
            return Conic::central(c * c + s, s);
        }
        case ConfocalKind::Hyperbola: {
            const double s = 1.0 + lambda;
            if (s >= -1e-12 || c * c + s <= 1e-12)
                throw LambdaOutOfRange("hyperbola member needs -1-c^2 < lambda < -1");
            return Conic::central(c * c + s, s);
        }
        case ConfocalKind::Parabola: {
            const double p = lambda;
            if (std::abs(p) <= 1e-12) throw LambdaOutOfRange("parabola member needs p != 0");
            return Conic::from_affine(1.0, 0.0, 0.0, 0.0, -2.0 * p, -p * p);
        }
    }
    throw LambdaOutOfRange("unknown confocal family kind");
}

} // namespace billiards
