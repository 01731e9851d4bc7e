#pragma once

#include <functional>
#include <vector>

#include "billiards/mirror.hpp"
#include "billiards/rational.hpp"

namespace billiards {

enum class GermBase {
    Finite,                   // finite isotropic tangency point
    InfiniteNonIsotropic,     // infinite point away from (1:+-i:0)
    IsotropicFiniteTangent,   // base point (1:+-i:0), finite tangent line
    IsotropicInfiniteTangent, // base point (1:+-i:0), tangent is the infinity line
};

// Leading behavior y = sigma x^r (1 + o(1)) of a nonlinear curve branch in a
// chart where the tangent line is the x-axis.
struct Germ {
    GermBase base = GermBase::Finite;
    Rational r{2, 1};
    Cx sigma{1.0, 0.0};

    Germ() = default;
    Germ(GermBase b, Rational exponent, Cx leading) : base(b), r(exponent), sigma(leading) {
        if (!(r > Rational(1))) throw InvalidExponent("branch exponent must exceed 1");
        if (std::abs(sigma) == 0.0) throw DegenerateInput("branch leading coefficient must be nonzero");
    }
};

struct NewtonEdge {
    std::pair<Rational, Rational> from, to;  // ordered by decreasing first coordinate
    Rational slope;
    std::vector<int> support;  // indices of input points on this edge
};

struct NewtonDiagram {
    std::vector<std::pair<Rational, Rational>> points;
    std::vector<NewtonEdge> edges;  // ordered by increasing slope magnitude
};

// Lower boundary of the Newton polygon: edges of strictly negative slope,
// computed in exact rational arithmetic.
inline NewtonDiagram newton_edges(const std::vector<std::pair<Rational, Rational>>& input) {
    NewtonDiagram out;
    out.points = input;
    std::vector<std::pair<Rational, Rational>> pts;
    for (const auto& p : input) {
        if (p.first < Rational(0) || p.second < Rational(0))
            throw DegenerateInput("diagram points need nonnegative coordinates");
        bool dup = false;
        for (const auto& q : pts)
            if (p == q) dup = true;
        if (!dup) pts.push_back(p);
    }
    if (pts.size() < 2) throw DegenerateInput("a diagram needs at least two distinct points");

    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    // monotone chain for the lower hull
    std::vector<std::pair<Rational, Rational>> hull;
    auto cross_sign = [](const std::pair<Rational, Rational>& o, const std::pair<Rational, Rational>& a,
                         const std::pair<Rational, Rational>& b) {
        const Rational v = (a.first - o.first) * (b.second - o.second) -
                           (a.second - o.second) * (b.first - o.first);
        if (v < Rational(0)) return -1;
        if (Rational(0) < v) return 1;
        return 0;
    };
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross_sign(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    // keep only strictly decreasing (negative-slope) edges, emitted from the
    // shallow right end towards the steep left end
    std::vector<NewtonEdge> edges;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[i + 1];
        if (!(b.second < a.second)) continue;  // slope >= 0: not part of the diagram
        NewtonEdge e;
        e.from = b;  // larger x
        e.to = a;
        e.slope = (b.second - a.second) / (b.first - a.first);
        for (std::size_t k = 0; k < input.size(); ++k) {
            const Rational lhs = (input[k].first - a.first) * (b.second - a.second);
            const Rational rhs = (input[k].second - a.second) * (b.first - a.first);
            const bool within = !(input[k].first < std::min(a.first, b.first)) &&
                                !(std::max(a.first, b.first) < input[k].first);
            if (lhs == rhs && within) e.support.push_back(static_cast<int>(k));
        }
        edges.push_back(e);
    }
    std::reverse(edges.begin(), edges.end());
    out.edges = std::move(edges);
    return out;
}

struct AsymptoticBranch {
    Rational u_exponent;                 // u = coeff * v^exponent (1 + o(1))
    std::vector<Cx> u_coefficients;
    Rational alpha_exponent;             // tangent-line azimuth along the branch
    std::vector<Cx> alpha_coefficients;  // aligned with u_coefficients
    std::vector<Cx> s_roots;             // roots of the defining coefficient relation
};

struct TangencyAsymptotics {
    int case_id = 0;  // 1: r_a > r_b, 2: equal, 3: r_a < r_b
    std::vector<AsymptoticBranch> branches;
    NewtonDiagram diagram;
};

// Leading asymptotics of the tangency correspondence of two tangent branches:
// for t on branch a with x(t) = v, the tangency points u of tangent lines to
// branch b through t. Branch b is normalized to leading coefficient 1; sigma
// is carried by branch a.
inline TangencyAsymptotics tangency_asymptotics(const Germ& germ_a, const Germ& germ_b) {
    if (germ_a.base != germ_b.base)
        throw NonTangentGerms("branches must be tangent at a common point");
    if (std::abs(germ_b.sigma - Cx(1.0)) > 1e-12)
        throw DegenerateInput("second branch must be normalized to leading coefficient 1");
    const Rational ra = germ_a.r, rb = germ_b.r;
    const Cx sigma = germ_a.sigma;

    TangencyAsymptotics out;
    out.diagram = newton_edges({{rb, Rational(0)}, {rb - Rational(1), Rational(1)}, {Rational(0), ra}});

    const std::int64_t p = rb.num, q = rb.den;        // rb = p / q
    const double rb_val = rb.value();

    if (ra > rb) {
        out.case_id = 1;
        {
            AsymptoticBranch br;
            br.u_exponent = Rational(1);
            const Rational s = rb / (rb - Rational(1));
            br.s_roots = {Cx(s.value())};
            br.u_coefficients = {Cx(s.value())};
            br.alpha_exponent = rb - Rational(1);
            br.alpha_coefficients = {rb_val * std::pow(Cx(s.value()), rb_val - 1.0)};
            out.branches.push_back(br);
        }
        {
            AsymptoticBranch br;
            br.u_exponent = (ra - Rational(1)) / (rb - Rational(1));
            // s^(rb-1) = sigma / rb, presented as the polynomial s^(p-q) = (sigma/rb)^q
            br.s_roots = all_kth_roots(std::pow(sigma / rb_val, double(q)), int(p - q));
            br.u_coefficients = br.s_roots;
            br.alpha_exponent = ra - Rational(1);
            br.alpha_coefficients.assign(br.s_roots.size(), sigma);
            out.branches.push_back(br);
        }
        return out;
    }
    if (ra == rb) {
        out.case_id = 2;
        AsymptoticBranch br;
        br.u_exponent = Rational(1);
        // s^p (r - 1) - r s^(p-q) + sigma = 0
        std::vector<Cx> coeffs(p + 1, Cx(0.0));
        coeffs[0] = sigma;
        coeffs[p - q] += -rb_val;
        coeffs[p] += rb_val - 1.0;
        br.s_roots = poly_roots(Poly(coeffs));
        br.alpha_exponent = rb - Rational(1);
        for (const Cx& s : br.s_roots) {
            br.u_coefficients.push_back(std::pow(s, double(q)));
            br.alpha_coefficients.push_back(rb_val * std::pow(s, double(p - q)));
        }
        out.branches.push_back(br);
        return out;
    }
    out.case_id = 3;
    AsymptoticBranch br;
    br.u_exponent = ra / rb;
    // s^(p_b) = sigma / (1 - r_b)
    br.s_roots = all_kth_roots(sigma / (1.0 - rb_val), int(p));
    br.alpha_exponent = ra * (rb - Rational(1)) / rb;
    for (const Cx& s : br.s_roots) {
        br.u_coefficients.push_back(std::pow(s, double(q)));
        br.alpha_coefficients.push_back(rb_val * std::pow(s, double(p - q)));
    }
    out.branches.push_back(br);
    return out;
}

struct ReflectedAzimuth {
    Rational exponent;            // az of the reflected family decays like |x|^exponent
    bool order_bound_only;        // finite base point: only an order bound
    Rational p{0, 1};             // leading coefficient multiplier p for infinite base points
};

// Decay law of reflected azimuths near an isotropic tangency.
inline ReflectedAzimuth reflected_azimuth_asymptotics(const Germ& germ) {
    const Rational r = germ.r;
    switch (germ.base) {
        case GermBase::Finite:
            return {(r - Rational(1)) * Rational(2), true, Rational(0)};
        case GermBase::InfiniteNonIsotropic:
            return {r - Rational(1), false, r / Rational(2)};
        case GermBase::IsotropicFiniteTangent:
            return {r - Rational(1), false, Rational(1)};
        case GermBase::IsotropicInfiniteTangent:
            return {r - Rational(1), false, (r * r) / (Rational(2) * r - Rational(1))};
    }
    throw InvalidExponent("unknown germ base class");
}

// Foot of the tangent line on the branch's tangent axis: x(P_t) ~ ((r-1)/r) x(t).
inline Rational tangent_foot_coefficient(const Rational& r) {
    if (!(r > Rational(1))) throw InvalidExponent("foot coefficient needs r > 1");
    return (r - Rational(1)) / r;
}

// Exponent inequality r_b (2 - r_a) < r_a.
inline bool lemgerm_condition_iv(const Rational& ra, const Rational& rb) {
    if (!(ra > Rational(1)) || !(rb > Rational(1)))
        throw InvalidExponent("exponent inequality needs r > 1 on both sides");
    return rb * (Rational(2) - ra) < ra;
}

struct ExponentFit {
    double exponent = 0.0;
    Cx coefficient{0.0, 0.0};
    double rms = 0.0;
    bool reliable = false;
};

// Log-log least squares on samples (v, u); the coefficient is read off the
// smallest-|v| sample.
inline ExponentFit fit_exponent(const std::vector<std::pair<Cx, Cx>>& samples) {
    std::vector<std::pair<Cx, Cx>> use;
    for (const auto& s : samples)
        if (std::abs(s.first) > 0.0 && std::abs(s.second) > 0.0) use.push_back(s);
    if (use.size() < 4) throw InsufficientSamples("exponent fit needs at least 4 nonzero samples");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [v, u] : use) {
        const double x = std::log(std::abs(v)), y = std::log(std::abs(u));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = double(use.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14) throw InsufficientSamples("degenerate abscissa spread");
    ExponentFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (const auto& [v, u] : use) {
        const double e = std::log(std::abs(u)) - (intercept + fit.exponent * std::log(std::abs(v)));
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    auto smallest = std::min_element(use.begin(), use.end(), [](const auto& a, const auto& b) {
        return std::abs(a.first) < std::abs(b.first);
    });
    fit.coefficient = smallest->second / std::pow(smallest->first, Cx(fit.exponent));
    fit.reliable = fit.rms < 0.1;
    return fit;
}

struct IsotropicTangencyReport {
    bool at_infinity = false;
    Cx param{0.0, 0.0};
    ProjLine line;
    int multiplicity = 0;     // intersection index at the tangency parameter
    int distinct_points = 0;  // parameter clusters met by the tangent line
    bool ok = false;
};

struct PropertyICheck {
    bool holds = false;
    std::vector<IsotropicTangencyReport> report;
};

enum class CoordFrame { Standard, Isotropic };

namespace detail {

inline std::array<Vec3, 2> cyclic_points(CoordFrame frame) {
    if (frame == CoordFrame::Standard)
        return {Vec3(1.0, Cx(0.0, 1.0), 0.0), Vec3(1.0, Cx(0.0, -1.0), 0.0)};
    return {Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)};
}

} // namespace detail

// Maximal-isotropic-tangency check: every isotropic tangent line of the
// parametrized curve must meet it at a single parameter with intersection
// index equal to the curve degree.
inline PropertyICheck property_I_check(const ParamCurve& curve, int degree, double tol = 1e-7,
                                       CoordFrame frame = CoordFrame::Standard) {
    if (degree < 2 || curve.homogeneous_degree() != degree)
        throw NonAlgebraicInput("degree must match the parametrization degree");
    const auto cyclic = detail::cyclic_points(frame);
    auto isotropic_here = [&](const ProjLine& l) {
        const double scale = l.h.norm();
        return std::abs(dotc(l.h, cyclic[0])) <= tol * scale ||
               std::abs(dotc(l.h, cyclic[1])) <= tol * scale;
    };

    // candidate parameters: isotropic tangent direction, plus t = infinity
    const Poly dx = curve.x.derivative(), dy = curve.y.derivative();
    std::vector<Cx> candidates;
    auto add_roots = [&](Poly f) {
        for (const Cx& t : poly_roots(f)) {
            bool dup = false;
            for (const Cx& s : candidates)
                if (std::abs(s - t) < 1e-8 * (1.0 + std::abs(t))) dup = true;
            if (!dup) candidates.push_back(t);
        }
    };
    if (frame == CoordFrame::Standard) {
        add_roots(dx + dy.scaled(kI));
        add_roots(dx + dy.scaled(-kI));
    } else {
        add_roots(dx);
        add_roots(dy);
    }

    PropertyICheck out;
    out.holds = true;
    auto inspect = [&](bool at_inf, Cx t0) {
        IsotropicTangencyReport rep;
        rep.at_infinity = at_inf;
        rep.param = t0;
        try {
            rep.line = at_inf ? curve.tangent_at_infinity() : curve.tangent_at(t0);
        } catch (const GeometryError&) {
            return;  // no defined tangent: not an isotropic tangency
        }
        if (!isotropic_here(rep.line)) return;

        Poly f = curve.x.scaled(rep.line.h(0)) + curve.y.scaled(rep.line.h(1)) +
                 Poly::constant(rep.line.h(2));
        const int inf_mult = degree - std::max(f.effective_degree(), 0);
        auto roots = poly_roots(f);
        // cluster finite roots
        std::vector<std::pair<Cx, int>> clusters;
        for (const Cx& r : roots) {
            bool merged = false;
            for (auto& [c, m] : clusters) {
                if (std::abs(r - c) < 1e-5 * (1.0 + std::abs(c))) {
                    c = (c * double(m) + r) / double(m + 1);
                    ++m;
                    merged = true;
                    break;
                }
            }
            if (!merged) clusters.emplace_back(r, 1);
        }
        rep.distinct_points = int(clusters.size()) + (inf_mult > 0 ? 1 : 0);
        if (at_inf) {
            rep.multiplicity = inf_mult;
            rep.ok = clusters.empty() && inf_mult == degree;
        } else {
            rep.multiplicity = 0;
            for (const auto& [c, m] : clusters)
                if (std::abs(c - t0) < 1e-4 * (1.0 + std::abs(t0))) rep.multiplicity = m;
            rep.ok = clusters.size() == 1 && inf_mult == 0 && rep.multiplicity == degree;
        }
        if (!rep.ok) out.holds = false;
        out.report.push_back(rep);
    };

    for (const Cx& t : candidates) inspect(false, t);
    inspect(true, Cx(0.0));
    return out;
}

} // namespace billiards
