#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

#include "billiards/errors.hpp"

namespace billiards {

using Cx = std::complex<double>;
using Vec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;

inline constexpr double kDefaultTol = 1e-9;   // incidence / isotropy
inline constexpr double kProjEqTol = 1e-10;   // projective equality of triples

inline const Cx kI{0.0, 1.0};

// Complex-bilinear dot and cross products (no conjugation); the Hermitian
// variants of Eigen are wrong for incidence tests in CP^2.
inline Cx dotc(const Vec3& a, const Vec3& b) {
    return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

inline Vec3 crossc(const Vec3& a, const Vec3& b) {
    return Vec3(a(1) * b(2) - a(2) * b(1),
                a(2) * b(0) - a(0) * b(2),
                a(0) * b(1) - a(1) * b(0));
}

// sin of the Fubini-Study angle between complex rays; 0 iff proportional,
// stable near 0 (no cancellation: Lagrange identity with bilinear minors).
inline double chordal3(const Vec3& a, const Vec3& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return crossc(a, b).norm() / (na * nb);
}

inline double chordal2(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(a(0) * b(1) - a(1) * b(0)) / (na * nb);
}

inline double angle2(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    return std::asin(std::min(1.0, chordal2(a, b)));
}

namespace detail {

inline int argmax_modulus(const Vec3& v) {
    int k = 0;
    double best = std::norm(v(0));
    for (int i = 1; i < 3; ++i) {
        const double m = std::norm(v(i));
        if (m > best) { best = m; k = i; }
    }
    return k;
}

// Scale so the largest-modulus component is exactly 1; idempotent.
inline Vec3 normalize_triple(const Vec3& v) {
    const int k = argmax_modulus(v);
    if (std::norm(v(k)) < 1e-300) throw ZeroHomogeneousTriple("homogeneous triple is numerically zero");
    if (v(k) == Cx(1.0, 0.0)) return v;
    Vec3 w = v / v(k);
    w(k) = Cx(1.0, 0.0);
    return w;
}

} // namespace detail

// complex value on the Riemann sphere (used for azimuths and the z-chart of
// the infinity line)
struct ExtComplex {
    Cx value{0.0, 0.0};
    bool infinite = false;

    static ExtComplex inf() { return ExtComplex{Cx{0.0, 0.0}, true}; }
    static ExtComplex of(Cx v) { return ExtComplex{v, false}; }
};

inline bool ext_close(const ExtComplex& a, const ExtComplex& b, double tol = 1e-9) {
    // chordal comparison on CP^1: (v:1), infinity = (1:0)
    Eigen::Vector2cd u = a.infinite ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(a.value, 1.0);
    Eigen::Vector2cd v = b.infinite ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(b.value, 1.0);
    return chordal2(u, v) < tol;
}

struct ProjPoint {
    Vec3 h;

    ProjPoint() : h(0.0, 0.0, 1.0) {}
    explicit ProjPoint(const Vec3& v) : h(detail::normalize_triple(v)) {}
    ProjPoint(Cx x, Cx y, Cx z) : ProjPoint(Vec3(x, y, z)) {}

    static ProjPoint finite(Cx x, Cx y) { return ProjPoint(x, y, Cx(1.0)); }

    bool is_finite(double tol = kDefaultTol) const { return std::abs(h(2)) > tol; }
    Cx x() const { return h(0) / h(2); }
    Cx y() const { return h(1) / h(2); }
};

struct ProjLine {
    Vec3 h;  // {u x + v y + w z = 0}

    ProjLine() : h(0.0, 0.0, 1.0) {}
    explicit ProjLine(const Vec3& v) : h(detail::normalize_triple(v)) {}
    ProjLine(Cx u, Cx v, Cx w) : ProjLine(Vec3(u, v, w)) {}

    static ProjLine infinity_line() { return ProjLine(Cx(0.0), Cx(0.0), Cx(1.0)); }
    // affine line u x + v y + w = 0
    static ProjLine affine(Cx u, Cx v, Cx w) { return ProjLine(u, v, w); }
    static ProjLine x_axis() { return ProjLine(Cx(0.0), Cx(1.0), Cx(0.0)); }
    static ProjLine y_axis() { return ProjLine(Cx(1.0), Cx(0.0), Cx(0.0)); }

    Cx eval(const ProjPoint& p) const { return dotc(h, p.h); }
    bool contains(const ProjPoint& p, double tol = kDefaultTol) const {
        return std::abs(eval(p)) <= tol;
    }
};

inline const ProjPoint kIsotropicPoint1{Cx(1.0), Cx(0.0, 1.0), Cx(0.0)};
inline const ProjPoint kIsotropicPoint2{Cx(1.0), Cx(0.0, -1.0), Cx(0.0)};

inline bool proj_equal(const ProjPoint& a, const ProjPoint& b, double tol = kProjEqTol) {
    return chordal3(a.h, b.h) < tol;
}

inline bool proj_equal(const ProjLine& a, const ProjLine& b, double tol = kProjEqTol) {
    return chordal3(a.h, b.h) < tol;
}

inline ProjLine join(const ProjPoint& p, const ProjPoint& q) {
    const Vec3 c = crossc(p.h, q.h);
    if (c.norm() < kProjEqTol * 10.0) throw CoincidentPoints("join of projectively equal points");
    return ProjLine(c);
}

inline ProjPoint meet(const ProjLine& l, const ProjLine& m) {
    const Vec3 c = crossc(l.h, m.h);
    if (c.norm() < kProjEqTol * 10.0) throw CoincidentLines("meet of projectively equal lines");
    return ProjPoint(c);
}

// Def: a line is isotropic when it passes through (1:+-i:0) or is the
// infinity line itself.
inline bool is_isotropic(const ProjLine& l, double tol = kDefaultTol) {
    return std::abs(dotc(l.h, kIsotropicPoint1.h)) <= tol ||
           std::abs(dotc(l.h, kIsotropicPoint2.h)) <= tol;
}

inline bool is_infinity_line(const ProjLine& l, double tol = kProjEqTol) {
    return proj_equal(l, ProjLine::infinity_line(), tol);
}

// Affine chart of CP^2. Rows of `frame` are the X, Y and W forms; affine
// coordinates of a point p are (X(p)/W(p), Y(p)/W(p)) and the chart's own
// infinity line is {W = 0}.
struct AffineChart {
    Mat3 frame;
    Mat3 line_map;  // transforms line coefficients into chart coordinates

    explicit AffineChart(const Mat3& f) : frame(f) {
        const Cx det = f.determinant();
        if (std::abs(det) < 1e-14) throw SingularMap("affine chart frame is singular");
        line_map = f.inverse().transpose();
    }

    static AffineChart finite() { return AffineChart(Mat3::Identity()); }

    // denom = 0,1,2 chooses which homogeneous coordinate plays the role of z
    static AffineChart standard(int denom) {
        Mat3 f = Mat3::Zero();
        const int ix = (denom + 1) % 3, iy = (denom + 2) % 3;
        f(0, ix) = 1.0;
        f(1, iy) = 1.0;
        f(2, denom) = 1.0;
        return AffineChart(f);
    }

    // Chart centered at `origin` with `x_axis` as its x-axis. The remaining
    // forms are chosen deterministically to maximize the frame determinant.
    static AffineChart centered(const ProjPoint& origin, const ProjLine& x_axis) {
        if (!x_axis.contains(origin, 1e-7))
            throw PointNotIncident("chart origin must lie on the requested x-axis");
        Mat3 best;
        double best_det = -1.0;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e(k) = 1.0;
            const Vec3 x_form = crossc(origin.h, e);  // a line through the origin
            if (x_form.norm() < 1e-12) continue;
            for (int j = 0; j < 3; ++j) {
                Vec3 w_form = Vec3::Zero();
                w_form(j) = 1.0;
                Mat3 f;
                f.row(0) = x_form.normalized();
                f.row(1) = x_axis.h.normalized();
                f.row(2) = w_form;
                const double d = std::abs(f.determinant());
                if (d > best_det) { best_det = d; best = f; }
            }
        }
        if (best_det <= 1e-12) throw SingularMap("could not build a chart frame");
        return AffineChart(best);
    }

    Vec3 line_coeffs(const ProjLine& l) const { return line_map * l.h; }
};

// Slope dy/dx of a line in the given chart; the direction coordinate of its
// intersection with the chart's infinity line.
inline ExtComplex azimuth(const ProjLine& l, const AffineChart& chart = AffineChart::finite(),
                          double tol = kDefaultTol) {
    Vec3 c = chart.line_coeffs(l);
    c = detail::normalize_triple(c);
    const double su = std::abs(c(0)), sv = std::abs(c(1));
    if (su <= tol && sv <= tol) throw LineAtInfinity("azimuth of the chart's infinity line");
    if (sv <= tol * std::max(1.0, su)) return ExtComplex::inf();
    return ExtComplex::of(-c(0) / c(1));
}

// Projective transformation acting on homogeneous point coordinates.
struct ProjMap {
    Mat3 m;
    bool is_involution = false;

    ProjMap() : m(Mat3::Identity()) {}
    explicit ProjMap(const Mat3& mat, bool involution = false) : m(mat), is_involution(involution) {
        if (std::abs(m.determinant()) < 1e-300) throw SingularMap("projective map is singular");
    }

    // skips the determinant guard: for maps invertible by construction, where
    // a naive determinant cancels catastrophically (near-isotropic mirrors)
    static ProjMap trusted(const Mat3& mat, bool involution) {
        ProjMap out;
        out.m = mat;
        out.is_involution = involution;
        return out;
    }

    ProjPoint apply(const ProjPoint& p) const { return ProjPoint(m * p.h); }

    ProjLine apply_line(const ProjLine& l) const { return ProjLine(adjugate().transpose() * l.h); }

    Mat3 adjugate() const {
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

    ProjMap compose(const ProjMap& other) const {  // this after other
        return ProjMap(m * other.m);
    }
};

// The nontrivial involution fixing the points of a non-isotropic line and
// preserving the complexified form dz1^2 + dz2^2.
inline ProjMap line_symmetry(const ProjLine& line, double tol = kDefaultTol) {
    const Cx u = line.h(0), v = line.h(1), w = line.h(2);
    if (is_isotropic(line, tol)) throw IsotropicMirror("symmetry is undefined for isotropic lines");
    const Cx q = u * u + v * v;
    Mat3 m;
    m << v * v - u * u, -2.0 * u * v, -2.0 * u * w,
         -2.0 * u * v, u * u - v * v, -2.0 * v * w,
         Cx(0.0), Cx(0.0), q;
    return ProjMap::trusted(m, /*involution=*/true);
}

struct ReflectedLine {
    ProjLine line;
    bool degenerate_isotropic = false;  // mirror was isotropic: image is the mirror itself
};

// Reflection of a line about a mirror line at a common point. Isotropic
// finite mirrors act by the limit law: the image of any other line is the
// mirror itself.
inline ReflectedLine reflect_line(const ProjLine& l, const ProjLine& mirror, const ProjPoint& at,
                                  double tol = kDefaultTol) {
    if (!l.contains(at, tol) || !mirror.contains(at, tol))
        throw PointNotIncident("reflect_line: point not incident to line and mirror");
    if (is_infinity_line(mirror, tol))
        throw InfinityMirror("reflection about the infinity line is undefined");
    if (is_isotropic(mirror, tol)) return ReflectedLine{mirror, true};
    return ReflectedLine{line_symmetry(mirror, tol).apply_line(l), false};
}

// Action of a non-isotropic line symmetry on the infinity line, in the
// coordinate z with I1 = 0 and I2 = infinity: z -> eps^2 / z, where eps is
// the mirror direction.
inline ExtComplex reflect_infinity_coordinate(const ExtComplex& zval, const Cx& eps,
                                              double tol = kDefaultTol) {
    if (std::abs(eps) <= tol) throw IsotropicEps("mirror direction at an isotropic point");
    if (zval.infinite) return ExtComplex::of(Cx(0.0));
    if (std::abs(zval.value) <= tol * std::abs(eps) * std::abs(eps)) return ExtComplex::inf();
    return ExtComplex::of(eps * eps / zval.value);
}

// z-coordinate of the direction of a line: the Moebius chart on the infinity
// line sending slopes +-i to {0, infinity}.
inline ExtComplex direction_z(const ProjLine& l) {
    // infinite point of l is (v : -u : 0)
    const Cx x = l.h(1), y = -l.h(0);
    const Cx num = y - kI * x, den = y + kI * x;
    const double scale = std::max(std::abs(x), std::abs(y));
    if (std::abs(den) <= 1e-14 * scale) return ExtComplex::inf();
    return ExtComplex::of(num / den);
}

inline ExtComplex slope_to_z(const ExtComplex& slope) {
    if (slope.infinite) return ExtComplex::of(Cx(1.0));
    const Cx den = slope.value + kI;
    if (std::abs(den) < 1e-14) return ExtComplex::inf();
    return ExtComplex::of((slope.value - kI) / den);
}

// CP^1 representative of a line inside the pencil of lines through a point:
// its direction in the standard chart where the point has bounded affine
// coordinates (chart keyed by the point's largest homogeneous component).
inline Eigen::Vector2cd pencil_direction(const ProjLine& l, int chart_denom) {
    const int ix = (chart_denom + 1) % 3, iy = (chart_denom + 2) % 3;
    return Eigen::Vector2cd(l.h(iy), -l.h(ix));
}

// Round-metric distance between two lines of the pencil at `at`.
inline double pencil_distance(const ProjLine& l, const ProjLine& m, const ProjPoint& at) {
    const int denom = detail::argmax_modulus(at.h);
    return angle2(pencil_direction(l, denom), pencil_direction(m, denom));
}

} // namespace billiards
