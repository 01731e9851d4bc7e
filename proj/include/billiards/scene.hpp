#pragma once

#include <array>
#include <variant>

#include "billiards/mirror.hpp"

namespace billiards {

// Ordered mirror quadruple (a, b, c, d); indices are cyclic.
struct BilliardScene {
    std::array<Mirror, 4> mirrors;

    BilliardScene() = default;
    BilliardScene(Mirror a, Mirror b, Mirror c, Mirror d)
        : mirrors{std::move(a), std::move(b), std::move(c), std::move(d)} {}

    const Mirror& mirror(int i) const { return mirrors[((i % 4) + 4) % 4]; }

    BilliardScene cycled(int shift) const {
        BilliardScene out;
        for (int i = 0; i < 4; ++i) out.mirrors[i] = mirror(i + shift);
        return out;
    }
};

enum DegeneracyFlag : unsigned {
    kVertexCollision = 1u,
    kEdgeTangency = 2u,
    kIsotropicTangent = 4u,
};

// Candidate quadrilateral orbit with per-vertex reflection residuals.
// edge(i) joins vertex i to vertex i+1.
struct QuadOrbit {
    std::array<ProjPoint, 4> vertices;
    std::array<ProjLine, 4> tangents;
    std::array<ProjLine, 4> edges;
    std::array<double, 4> residuals{0.0, 0.0, 0.0, 0.0};
    std::array<unsigned, 4> flags{0u, 0u, 0u, 0u};

    double max_residual() const {
        double m = 0.0;
        for (double r : residuals) m = std::max(m, r);
        return m;
    }

    bool degenerate() const {
        for (unsigned f : flags)
            if (f != 0u) return true;
        return false;
    }

    // strict periodic-orbit predicate
    bool is_valid(double tol) const { return !degenerate() && max_residual() < tol; }

    QuadOrbit cycled(int shift) const {
        QuadOrbit out;
        for (int i = 0; i < 4; ++i) {
            const int j = ((i + shift) % 4 + 4) % 4;
            out.vertices[i] = vertices[j];
            out.tangents[i] = tangents[j];
            out.edges[i] = edges[j];
            out.residuals[i] = residuals[j];
            out.flags[i] = flags[j];
        }
        return out;
    }
};

struct Type1Spec {
    ProjLine axis;
    Mirror curve_b;
};

struct Type2Spec {
    ProjPoint center = ProjPoint::finite(0.0, 0.0);
    double theta_a_deg = 0.0;
    double theta_b_deg = 0.0;
    double theta_rot_deg = 0.0;
};

struct Type3Spec {
    Conic first;
    Conic second;
};

using SceneSpec = std::variant<Type1Spec, Type2Spec, Type3Spec>;

inline ProjLine line_at_angle(const ProjPoint& through, double theta_deg) {
    const double th = theta_deg * M_PI / 180.0;
    const Vec3 normal(-std::sin(th), std::cos(th), Cx(0.0));
    // u x + v y + w z with (u, v) the direction normal
    return ProjLine(Vec3(normal(0), normal(1), -(normal(0) * through.h(0) + normal(1) * through.h(1)) / through.h(2)));
}

inline BilliardScene build_scene(const SceneSpec& spec) {
    if (std::holds_alternative<Type1Spec>(spec)) {
        const auto& s = std::get<Type1Spec>(spec);
        if (is_isotropic(s.axis)) throw InvalidSpec("type-1 axis must be non-isotropic");
        if (s.curve_b.kind() == MirrorKind::Line && proj_equal(s.curve_b.line(), s.axis))
            throw InvalidSpec("type-1 curve must differ from the axis");
        const ProjMap sym = line_symmetry(s.axis);
        return BilliardScene(Mirror(s.axis), s.curve_b, Mirror(s.axis), s.curve_b.transformed(sym));
    }
    if (std::holds_alternative<Type2Spec>(spec)) {
        const auto& s = std::get<Type2Spec>(spec);
        const double angles[4] = {s.theta_a_deg, s.theta_b_deg, s.theta_b_deg + s.theta_rot_deg,
                                  s.theta_a_deg + s.theta_rot_deg};
        std::array<ProjLine, 4> lines;
        for (int i = 0; i < 4; ++i) lines[i] = line_at_angle(s.center, angles[i]);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (proj_equal(lines[i], lines[j], 1e-12))
                    throw InvalidSpec("type-2 lines must be pairwise distinct");
        return BilliardScene(Mirror(lines[0]), Mirror(lines[1]), Mirror(lines[2]), Mirror(lines[3]));
    }
    const auto& s = std::get<Type3Spec>(spec);
    if (confocality_class(s.first, s.second).tag == ConfocalTag::NotConfocal)
        throw InvalidSpec("type-3 conics must be confocal");
    return BilliardScene(Mirror(s.first), Mirror(s.second), Mirror(s.first), Mirror(s.second));
}

} // namespace billiards
