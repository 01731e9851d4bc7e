#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "billiards/scene.hpp"

namespace billiards {

// Deviation from the reflection law at `at`, as a round-metric distance on
// the pencil of lines there. An isotropic mirror tangent degenerates the law:
// the residual is then the distance of the nearer edge to the tangent itself.
inline double reflection_residual(const ProjLine& incoming, const ProjLine& outgoing,
                                  const ProjLine& mirror_tangent, const ProjPoint& at,
                                  double tol = 1e-6) {
    if (!incoming.contains(at, tol) || !outgoing.contains(at, tol) || !mirror_tangent.contains(at, tol))
        throw PointNotIncident("reflection residual needs three concurrent lines");
    if (is_isotropic(mirror_tangent))
        return std::min(pencil_distance(incoming, mirror_tangent, at),
                        pencil_distance(outgoing, mirror_tangent, at));
    const ProjLine image = line_symmetry(mirror_tangent).apply_line(incoming);
    return pencil_distance(image, outgoing, at);
}

namespace detail {

inline constexpr double kVertexTol = 1e-8;  // neighbor-collision threshold
inline constexpr double kEdgeTangentTol = 1e-9;

inline void fill_flags(QuadOrbit& q, double tol) {
    for (int i = 0; i < 4; ++i) {
        unsigned f = 0;
        const auto& prev = q.vertices[(i + 3) % 4];
        const auto& next = q.vertices[(i + 1) % 4];
        if (proj_equal(q.vertices[i], prev, kVertexTol) || proj_equal(q.vertices[i], next, kVertexTol))
            f |= kVertexCollision;
        if (is_isotropic(q.tangents[i], tol)) f |= kIsotropicTangent;
        const ProjLine& in_edge = q.edges[(i + 3) % 4];
        const ProjLine& out_edge = q.edges[i];
        if (proj_equal(in_edge, q.tangents[i], kEdgeTangentTol) ||
            proj_equal(out_edge, q.tangents[i], kEdgeTangentTol))
            f |= kEdgeTangency;
        q.flags[i] = f;
    }
}

inline void fill_residuals(QuadOrbit& q, double incidence_tol) {
    for (int i = 0; i < 4; ++i) {
        const ProjLine& in_edge = q.edges[(i + 3) % 4];
        const ProjLine& out_edge = q.edges[i];
        q.residuals[i] = reflection_residual(in_edge, out_edge, q.tangents[i], q.vertices[i], incidence_tol);
    }
}

} // namespace detail

// Extends a seed pair (A, B) on the first two mirrors to all candidate
// quadrilaterals, ordered by closure residual. Candidates enumerate every
// intersection branch on mirrors c and d.
inline std::vector<QuadOrbit> extend_orbit_candidates(const BilliardScene& scene, const ProjPoint& A,
                                                      const ProjPoint& B, double tol = 1e-8) {
    const Mirror& ma = scene.mirrors[0];
    const Mirror& mb = scene.mirrors[1];
    const Mirror& mc = scene.mirrors[2];
    const Mirror& md = scene.mirrors[3];

    if (proj_equal(A, B, detail::kVertexTol)) throw DegenerateSeed("seed vertices coincide");
    if (!ma.contains(A, 1e-6) || !mb.contains(B, 1e-6))
        throw DegenerateSeed("seed vertices must lie on their mirrors");

    const ProjLine edge_ab = join(A, B);
    std::vector<ProjLine> tangents_a, tangents_b;
    try {
        tangents_a = ma.tangents_at(A);
        tangents_b = mb.tangents_at(B);
    } catch (const GeometryError&) {
        throw DegenerateSeed("tangent lookup failed at a seed vertex");
    }

    std::vector<QuadOrbit> out;
    for (const ProjLine& tb : tangents_b) {
        if (is_isotropic(tb)) throw DegenerateSeed("isotropic tangent at seed vertex B");
        if (proj_equal(edge_ab, tb, 1e-10)) throw DegenerateSeed("seed edge tangent to mirror b");
        const ProjLine edge_bc = line_symmetry(tb).apply_line(edge_ab);
        for (const ProjPoint& C : mc.intersect_with_line(edge_bc)) {
            if (proj_equal(C, B, detail::kVertexTol)) continue;
            std::vector<ProjLine> tangents_c;
            try {
                tangents_c = mc.tangents_at(C);
            } catch (const GeometryError&) {
                continue;
            }
            for (const ProjLine& tc : tangents_c) {
                if (is_isotropic(tc)) continue;
                const ProjLine edge_cd = line_symmetry(tc).apply_line(edge_bc);
                for (const ProjPoint& D : md.intersect_with_line(edge_cd)) {
                    if (proj_equal(D, C, detail::kVertexTol) || proj_equal(D, A, detail::kVertexTol))
                        continue;
                    std::vector<ProjLine> tangents_d;
                    try {
                        tangents_d = md.tangents_at(D);
                    } catch (const GeometryError&) {
                        continue;
                    }
                    const ProjLine edge_da = join(D, A);
                    for (const ProjLine& td : tangents_d) {
                        for (const ProjLine& ta : tangents_a) {
                            QuadOrbit q;
                            q.vertices = {A, B, C, D};
                            q.tangents = {ta, tb, tc, td};
                            q.edges = {edge_ab, edge_bc, edge_cd, edge_da};
                            try {
                                detail::fill_residuals(q, 1e-5);
                            } catch (const GeometryError&) {
                                continue;
                            }
                            detail::fill_flags(q, 1e-9);
                            out.push_back(q);
                        }
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const QuadOrbit& x, const QuadOrbit& y) { return x.max_residual() < y.max_residual(); });
    (void)tol;
    return out;
}

// Closing, non-degenerate orbits only; an empty result is a valid outcome.
inline std::vector<QuadOrbit> extend_orbit(const BilliardScene& scene, const ProjPoint& A,
                                           const ProjPoint& B, double tol = 1e-8) {
    std::vector<QuadOrbit> out;
    for (const auto& q : extend_orbit_candidates(scene, A, B, tol))
        if (q.is_valid(tol)) out.push_back(q);
    return out;
}

struct ScanOptions {
    int grid = 20;
    double tol = 1e-8;
    double margin = 1e-4;          // parameter margin around degenerate seeds
    std::uint64_t seed = 0;        // drives the jitter stream
    double imag_jitter = 0.0;      // imaginary perturbation of seed parameters
};

struct ScanRow {
    double ta = 0.0, tb = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool closed = false;
    bool degenerate = false;
};

struct ScanReport {
    double fraction_closing = 0.0;
    double median_residual = std::numeric_limits<double>::infinity();
    int degenerate_count = 0;
    int closed_count = 0;
    int total = 0;
    std::vector<ScanRow> rows;
};

// Seed grid over the first two mirrors. The per-seed work is independent and
// the reduction is order-insensitive (counts and a median), so the loop may
// be parallelized; it is kept serial so reports are bytewise reproducible.
inline ScanReport reflectivity_scan(const BilliardScene& scene, const ScanOptions& opt = {}) {
    ScanReport rep;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> residuals;
    const int n = std::max(1, opt.grid);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            ScanRow row;
            row.ta = (i + 0.5) / n;
            row.tb = (j + 0.5) / n;
            const Cx jit_a = opt.imag_jitter * unit(rng) * kI;
            const Cx jit_b = opt.imag_jitter * unit(rng) * kI;
            rep.total += 1;
            try {
                const ProjPoint A = scene.mirrors[0].sample(Cx(row.ta) + jit_a);
                const ProjPoint B = scene.mirrors[1].sample(Cx(row.tb) + jit_b);
                auto candidates = extend_orbit_candidates(scene, A, B, opt.tol);
                for (const auto& q : candidates) {
                    if (!q.degenerate()) {
                        row.residual = q.max_residual();
                        break;
                    }
                }
                if (!candidates.empty() && row.residual == std::numeric_limits<double>::infinity())
                    row.residual = candidates.front().max_residual();
                row.closed = row.residual < opt.tol;
            } catch (const GeometryError&) {
                row.degenerate = true;
            }
            if (row.degenerate) {
                rep.degenerate_count += 1;
            } else {
                residuals.push_back(row.residual);
                if (row.closed) rep.closed_count += 1;
            }
            rep.rows.push_back(row);
        }
    }
    const int attempted = rep.total - rep.degenerate_count;
    rep.fraction_closing = attempted > 0 ? double(rep.closed_count) / attempted : 0.0;
    if (!residuals.empty()) {
        std::sort(residuals.begin(), residuals.end());
        rep.median_residual = residuals[residuals.size() / 2];
    }
    return rep;
}

// Quadrilateral construction on two concentric circles: reflect the ray BA in
// the diameter through B to locate C on the small circle, then mirror B in
// the diameter orthogonal to AC to obtain D.
inline QuadOrbit concentric_circle_orbit(double r_small, double r_big, double theta_A, double theta_B) {
    if (!(0.0 < r_small && r_small < r_big))
        throw InvalidSpec("concentric construction needs 0 < r_small < r_big");
    using V2 = Eigen::Vector2d;
    const V2 A(r_small * std::cos(theta_A), r_small * std::sin(theta_A));
    const V2 B(r_big * std::cos(theta_B), r_big * std::sin(theta_B));

    // the open segment AB must avoid the open small disk
    const V2 ab = B - A;
    const double t_star = std::clamp(-A.dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double min_dist2 = (A + t_star * ab).squaredNorm();
    if (min_dist2 < r_small * r_small * (1.0 - 1e-12))
        throw SegmentCrossesSmallDisk("segment AB enters the small disk");

    auto reflect_across_direction = [](const V2& p, const V2& dir) {
        const V2 n = dir.normalized();
        return V2(2.0 * p.dot(n) * n - p);
    };

    // ray from B symmetric to ray BA about the diameter through B
    const V2 a_mirrored = reflect_across_direction(A, B);
    const V2 u = (a_mirrored - B).normalized();
    const double half_b = B.dot(u);
    double disc = half_b * half_b - (B.squaredNorm() - r_small * r_small);
    if (std::abs(disc) < 1e-12 * B.squaredNorm()) disc = 0.0;  // grazing ray: exact tangency point
    if (disc < 0.0) throw SegmentCrossesSmallDisk("reflected ray misses the small circle");
    const double s2 = -half_b + std::sqrt(disc);  // the farther (second) intersection
    const V2 C = B + s2 * u;

    // mirror B in the diameter orthogonal to AC
    const V2 ac = (C - A).normalized();
    const V2 axis(-ac.y(), ac.x());
    const V2 D = reflect_across_direction(B, axis);

    auto circle_tangent = [](const V2& p, double r) {
        return ProjLine(Cx(p.x()), Cx(p.y()), Cx(-r * r));
    };

    QuadOrbit q;
    q.vertices = {ProjPoint::finite(A.x(), A.y()), ProjPoint::finite(B.x(), B.y()),
                  ProjPoint::finite(C.x(), C.y()), ProjPoint::finite(D.x(), D.y())};
    q.tangents = {circle_tangent(A, r_small), circle_tangent(B, r_big), circle_tangent(C, r_small),
                  circle_tangent(D, r_big)};
    for (int i = 0; i < 4; ++i) q.edges[i] = join(q.vertices[i], q.vertices[(i + 1) % 4]);
    detail::fill_residuals(q, 1e-6);
    detail::fill_flags(q, 1e-9);
    return q;
}

} // namespace billiards
