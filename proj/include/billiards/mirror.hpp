#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "billiards/conic.hpp"
#include "billiards/polynomial.hpp"
#include "billiards/projective.hpp"

namespace billiards {

// Polynomially parametrized plane curve t -> (x(t), y(t)), compactified at
// t = infinity through the degree-d homogeneous rewriting.
struct ParamCurve {
    Poly x, y;

    ParamCurve() = default;
    ParamCurve(Poly px, Poly py) : x(std::move(px)), y(std::move(py)) {
        if (x.effective_degree() < 0 && y.effective_degree() < 0)
            throw NonAlgebraicInput("constant parametrized curve");
    }

    static ParamCurve graph_of(Poly fy) {  // t -> (t, f(t))
        return ParamCurve(Poly({Cx(0.0), Cx(1.0)}), std::move(fy));
    }

    int homogeneous_degree() const {
        return std::max({x.effective_degree(), y.effective_degree(), 1});
    }

    Vec3 h(Cx t) const { return Vec3(x.eval(t), y.eval(t), Cx(1.0)); }
    ProjPoint at(Cx t) const { return ProjPoint(h(t)); }

    // homogeneous parametrization reversed around t = infinity (tau = 1/t)
    std::array<Poly, 3> reversed() const {
        const int d = homogeneous_degree();
        auto rev = [&](const Poly& p) {
            std::vector<Cx> c(d + 1, Cx(0.0));
            for (int k = 0; k <= p.degree() && k <= d; ++k) c[d - k] = p.c[k];
            return Poly(c);
        };
        std::vector<Cx> w(d + 1, Cx(0.0));
        w[d] = 1.0;
        return {rev(x), rev(y), Poly(w)};
    }

    ProjPoint point_at_infinity() const {
        auto r = reversed();
        return ProjPoint(Vec3(r[0].eval(0.0), r[1].eval(0.0), r[2].eval(0.0)));
    }

    // projective tangent line from the first non-degenerate jet (handles cusps)
    static ProjLine tangent_from_jets(const std::array<Poly, 3>& phi, Cx t) {
        Vec3 base(phi[0].eval(t), phi[1].eval(t), phi[2].eval(t));
        std::array<Poly, 3> d = phi;
        const double scale = std::max(base.norm(), 1e-30);
        for (int k = 1; k <= 8; ++k) {
            for (auto& p : d) p = p.derivative();
            Vec3 jet(d[0].eval(t), d[1].eval(t), d[2].eval(t));
            Vec3 cr = crossc(base, jet);
            if (cr.norm() > 1e-12 * scale * std::max(jet.norm(), 1e-30)) return ProjLine(cr);
        }
        throw NonAlgebraicInput("tangent jet is degenerate to order 8");
    }

    ProjLine tangent_at(Cx t) const {
        std::array<Poly, 3> phi = {x, y, Poly({Cx(1.0)})};
        return tangent_from_jets(phi, t);
    }

    ProjLine tangent_at_infinity() const { return tangent_from_jets(reversed(), Cx(0.0)); }

    // finite parameters where the curve meets a line
    std::vector<Cx> line_params(const ProjLine& l) const {
        Poly p = x.scaled(l.h(0)) + y.scaled(l.h(1)) + Poly::constant(l.h(2));
        return poly_roots(p);
    }

    int infinity_multiplicity_on(const ProjLine& l) const {
        Poly p = x.scaled(l.h(0)) + y.scaled(l.h(1)) + Poly::constant(l.h(2));
        const int d = p.effective_degree();
        return homogeneous_degree() - std::max(d, 0);
    }

    struct ParamHits {
        std::vector<Cx> finite;
        bool at_infinity = false;
    };

    ParamHits params_at_point(const ProjPoint& p, double tol = 1e-7) const {
        ParamHits hits;
        if (!p.is_finite()) {
            hits.at_infinity = proj_equal(point_at_infinity(), p, 1e-7);
            return hits;
        }
        const Cx px = p.x(), py = p.y();
        auto try_roots = [&](const Poly& lead, Cx target, const Poly& other, Cx other_target) {
            Poly q = lead;
            if (q.c.empty()) q.c.push_back(Cx(0.0));
            q.c[0] -= target;
            for (const Cx& t : poly_roots(q)) {
                if (std::abs(other.eval(t) - other_target) <= tol * (1.0 + std::abs(other_target))) {
                    bool dup = false;
                    for (const Cx& u : hits.finite)
                        if (std::abs(u - t) <= 1e-9 * (1.0 + std::abs(t))) dup = true;
                    if (!dup) hits.finite.push_back(t);
                }
            }
        };
        if (x.effective_degree() >= 1) try_roots(x, px, y, py);
        else try_roots(y, py, x, px);
        return hits;
    }

    ParamCurve transformed(const ProjMap& map) const {
        const Mat3& s = map.m;
        if (std::abs(s(2, 0)) > 1e-12 * s.norm() || std::abs(s(2, 1)) > 1e-12 * s.norm())
            throw NonAlgebraicInput("parametrized curves only transform under affine maps");
        const Cx w = s(2, 2);
        Poly nx = x.scaled(s(0, 0) / w) + y.scaled(s(0, 1) / w) + Poly::constant(s(0, 2) / w);
        Poly ny = x.scaled(s(1, 0) / w) + y.scaled(s(1, 1) / w) + Poly::constant(s(1, 2) / w);
        return ParamCurve(std::move(nx), std::move(ny));
    }
};

enum class MirrorKind { Line, Conic, Param };

// One billiard mirror: a non-isotropic line, a smooth conic, or a
// parametrized algebraic curve.
struct Mirror {
    std::variant<ProjLine, Conic, ParamCurve> v;

    Mirror() : v(ProjLine::x_axis()) {}
    explicit Mirror(const ProjLine& l) : v(l) {
        if (is_isotropic(l)) throw InvalidSpec("line mirrors must not be isotropic");
    }
    explicit Mirror(const Conic& c) : v(c) {}
    explicit Mirror(const ParamCurve& p) : v(p) {}

    MirrorKind kind() const { return static_cast<MirrorKind>(v.index()); }
    const ProjLine& line() const { return std::get<ProjLine>(v); }
    const Conic& conic() const { return std::get<Conic>(v); }
    const ParamCurve& param() const { return std::get<ParamCurve>(v); }

    bool contains(const ProjPoint& p, double tol = 1e-7) const {
        switch (kind()) {
            case MirrorKind::Line: return line().contains(p, tol);
            case MirrorKind::Conic: return std::abs(conic().eval(p)) <= tol;
            case MirrorKind::Param: {
                auto hits = param().params_at_point(p, tol);
                return !hits.finite.empty() || hits.at_infinity;
            }
        }
        return false;
    }

    std::vector<ProjLine> tangents_at(const ProjPoint& p, double tol = 1e-7) const {
        switch (kind()) {
            case MirrorKind::Line: return {line()};
            case MirrorKind::Conic: return {tangent_line_at(conic(), p, tol)};
            case MirrorKind::Param: {
                auto hits = param().params_at_point(p, tol);
                std::vector<ProjLine> out;
                for (const Cx& t : hits.finite) out.push_back(param().tangent_at(t));
                if (hits.at_infinity) out.push_back(param().tangent_at_infinity());
                if (out.empty()) throw PointNotIncident("tangent requested off the mirror");
                return out;
            }
        }
        return {};
    }

    std::vector<ProjPoint> intersect_with_line(const ProjLine& l) const {
        std::vector<ProjPoint> out;
        switch (kind()) {
            case MirrorKind::Line: {
                if (proj_equal(l, line(), 1e-12)) return out;
                out.push_back(meet(l, line()));
                break;
            }
            case MirrorKind::Conic: {
                for (const auto& cp : intersect_line(conic(), l)) out.push_back(cp.point);
                break;
            }
            case MirrorKind::Param: {
                for (const Cx& t : param().line_params(l)) out.push_back(param().at(t));
                if (param().infinity_multiplicity_on(l) > 0) out.push_back(param().point_at_infinity());
                break;
            }
        }
        return out;
    }

    // Deterministic real-analytic sweep used by scan grids; t01 may carry a
    // small imaginary jitter to probe genuinely complex seeds.
    ProjPoint sample(Cx t01) const {
        const Cx t = std::tan(M_PI * (t01 - 0.5));
        switch (kind()) {
            case MirrorKind::Line: {
                auto [g0, g1] = detail::span_points(line());
                return ProjPoint(Vec3(g0 + t * g1));
            }
            case MirrorKind::Param:
                return param().at(t);
            case MirrorKind::Conic: {
                const ProjPoint base = conic_base_point();
                const Cx phi = M_PI * t01;
                const Vec3 dir(std::cos(phi), std::sin(phi), Cx(0.0));
                const ProjLine l = ProjLine(crossc(base.h, Vec3(base.h + dir)));
                auto pts = intersect_line(conic(), l);
                for (const auto& cp : pts)
                    if (!proj_equal(cp.point, base, 1e-9)) return cp.point;
                return base;  // tangent direction: sweep degenerates to the base point
            }
        }
        return ProjPoint();
    }

    ProjPoint conic_base_point() const {
        static const double ladder[] = {0.0, 1.0, -1.0, 0.5, -0.5, 2.0, -2.0, 3.0, -3.0};
        const Conic& c = conic();
        ProjPoint fallback;
        bool have_fallback = false;
        for (double cval : ladder) {
            const ProjLine l = ProjLine::affine(Cx(0.0), Cx(1.0), Cx(-cval));  // y = c
            for (const auto& cp : intersect_line(c, l)) {
                if (!cp.point.is_finite()) continue;
                if (!have_fallback) { fallback = cp.point; have_fallback = true; }
                if (std::abs(cp.point.x().imag()) < 1e-9 && std::abs(cp.point.y().imag()) < 1e-9)
                    return cp.point;
            }
        }
        if (have_fallback) return fallback;
        throw InvalidSpec("could not find a base point on the conic");
    }

    Mirror transformed(const ProjMap& map) const {
        switch (kind()) {
            case MirrorKind::Line: return Mirror(map.apply_line(line()));
            case MirrorKind::Conic: return Mirror(conic().transformed(map));
            case MirrorKind::Param: return Mirror(param().transformed(map));
        }
        return *this;
    }
};

inline bool mirrors_equal(const Mirror& a, const Mirror& b, double tol = 1e-8) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case MirrorKind::Line: return proj_equal(a.line(), b.line(), tol);
        case MirrorKind::Conic: return proj_equal(a.conic(), b.conic(), tol);
        case MirrorKind::Param: {
            for (int k = 0; k < 9; ++k) {
                const Cx t = -2.0 + 0.5 * k;
                if (!b.contains(a.param().at(t), tol * 10.0)) return false;
                if (!a.contains(b.param().at(t), tol * 10.0)) return false;
            }
            return true;
        }
    }
    return false;
}

} // namespace billiards
