#pragma once

#include <string>
#include <vector>

#include "billiards/format.hpp"
#include "billiards/real_billiards.hpp"

namespace billiards {

struct RenderSpec {
    double x0 = -5.0, y0 = -5.0, x1 = 5.0, y1 = 5.0;  // world viewport
    int width_px = 640, height_px = 640;
    double stroke_width = 1.5;
    double marker_radius = 4.0;
    std::vector<std::string> mirror_colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
};

namespace svg_detail {

struct Mapper {
    RenderSpec spec;
    double sx, sy;

    explicit Mapper(const RenderSpec& s) : spec(s) {
        if (!(spec.x1 > spec.x0) || !(spec.y1 > spec.y0) || spec.width_px <= 0 || spec.height_px <= 0)
            throw EmptyViewport("viewport must have positive extent");
        sx = spec.width_px / (spec.x1 - spec.x0);
        sy = spec.height_px / (spec.y1 - spec.y0);
    }

    // mathematical orientation: the y axis points up
    std::pair<double, double> to_px(const Eigen::Vector2d& w) const {
        return {(w.x() - spec.x0) * sx, (spec.y1 - w.y()) * sy};
    }
    bool inside(const Eigen::Vector2d& w, double pad = 0.0) const {
        return w.x() >= spec.x0 - pad && w.x() <= spec.x1 + pad && w.y() >= spec.y0 - pad &&
               w.y() <= spec.y1 + pad;
    }
    double pad() const { return 0.25 * std::max(spec.x1 - spec.x0, spec.y1 - spec.y0); }
};

// adaptive refinement: split until the midpoint deviates < 0.5 px
inline void refine(const RealBranch& branch, double t0, double t1, const Eigen::Vector2d& p0,
                   const Eigen::Vector2d& p1, const Mapper& map, int depth,
                   std::vector<std::pair<double, Eigen::Vector2d>>& out) {
    const double tm = 0.5 * (t0 + t1);
    const Eigen::Vector2d pm = branch.point(tm);
    if (depth < 10) {
        const auto a = map.to_px(p0), b = map.to_px(p1), m = map.to_px(pm);
        const double dx = b.first - a.first, dy = b.second - a.second;
        const double len = std::hypot(dx, dy);
        double dev = std::hypot(m.first - a.first, m.second - a.second);
        if (len > 1e-9) {
            const double proj = ((m.first - a.first) * dx + (m.second - a.second) * dy) / len;
            dev = std::hypot(m.first - a.first - proj * dx / len, m.second - a.second - proj * dy / len);
        }
        const bool visible = map.inside(p0, map.pad()) || map.inside(p1, map.pad()) || map.inside(pm, map.pad());
        if (dev > 0.5 && visible) {
            refine(branch, t0, tm, p0, pm, map, depth + 1, out);
            out.emplace_back(tm, pm);
            refine(branch, tm, t1, pm, p1, map, depth + 1, out);
            return;
        }
    }
    // segment accepted as straight
}

inline std::string branch_path(const RealBranch& branch, const Mapper& map, const std::string& color,
                               double stroke) {
    const int coarse = 96;
    std::vector<std::pair<double, Eigen::Vector2d>> pts;
    for (int i = 0; i <= coarse; ++i) {
        const double t = 0.002 + (0.996 * i) / coarse;
        pts.emplace_back(t, branch.point(t));
    }
    std::vector<std::pair<double, Eigen::Vector2d>> dense;
    for (int i = 0; i + 1 <= coarse; ++i) {
        dense.push_back(pts[i]);
        refine(branch, pts[i].first, pts[i + 1].first, pts[i].second, pts[i + 1].second, map, 0, dense);
    }
    dense.push_back(pts.back());

    // periodic branches (ellipses) close up
    if ((pts.front().second - pts.back().second).norm() <
        0.01 * (pts.front().second.norm() + 1.0))
        dense.push_back(pts.front());

    std::string d;
    bool pen_down = false;
    for (const auto& [t, w] : dense) {
        if (!map.inside(w, map.pad()) || !std::isfinite(w.x()) || !std::isfinite(w.y())) {
            pen_down = false;
            continue;
        }
        const auto [px, py] = map.to_px(w);
        d += (pen_down ? "L" : "M") + fixed_px(px) + " " + fixed_px(py);
        pen_down = true;
    }
    if (d.empty()) return "";
    return "  <path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           fixed_px(stroke) + "\"/>\n";
}

} // namespace svg_detail

struct OrbitOverlay {
    QuadOrbit orbit;
    std::optional<LawSignature> laws;
};

// Static figure: one element per distinct real mirror branch (true circles
// become <circle>), one polygon per orbit, law markers at the vertices
// (solid = usual, hollow = skew). Byte-stable for identical inputs.
inline std::string render_svg(const RealScene& rs, const std::vector<OrbitOverlay>& orbits,
                              const RenderSpec& spec) {
    svg_detail::Mapper map(spec);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(spec.width_px) + "\" height=\"" + std::to_string(spec.height_px) + "\">\n";
    out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // deduplicate repeated mirrors so a (a, b, a, b) scene draws two curves
    std::vector<int> drawn;
    for (int i = 0; i < 4; ++i) {
        bool dup = false;
        for (int j : drawn)
            if (mirrors_equal(rs.scene.mirrors[i], rs.scene.mirrors[j])) dup = true;
        if (dup) continue;
        drawn.push_back(i);
        const std::string color = spec.mirror_colors[i % spec.mirror_colors.size()];

        bool as_circle = false;
        if (rs.scene.mirrors[i].kind() == MirrorKind::Conic) {
            try {
                const auto f = detail::analyze_real_conic(rs.scene.mirrors[i].conic());
                if (f.kind == detail::RealConicFrame::Kind::Ellipse &&
                    std::abs(f.a2 - f.b2) < 1e-9 * (f.a2 + f.b2)) {
                    const auto [cx, cy] = map.to_px(f.offset);
                    out += "  <circle cx=\"" + fixed_px(cx) + "\" cy=\"" + fixed_px(cy) + "\" r=\"" +
                           fixed_px(std::sqrt(f.a2) * map.sx) + "\" fill=\"none\" stroke=\"" + color +
                           "\" stroke-width=\"" + fixed_px(spec.stroke_width) + "\"/>\n";
                    as_circle = true;
                }
            } catch (const GeometryError&) {
            }
        }
        if (!as_circle)
            for (const auto& branch : rs.branches[i])
                out += svg_detail::branch_path(branch, map, color, spec.stroke_width);
    }

    for (const auto& ov : orbits) {
        std::string pts;
        bool ok = true;
        for (const auto& v : ov.orbit.vertices) {
            if (!v.is_finite(1e-9)) { ok = false; break; }
            const auto [px, py] = map.to_px(Eigen::Vector2d(v.x().real(), v.y().real()));
            if (!pts.empty()) pts += " ";
            pts += fixed_px(px) + "," + fixed_px(py);
        }
        if (!ok) continue;
        out += "  <polygon points=\"" + pts +
               "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"" + fixed_px(spec.stroke_width) +
               "\"/>\n";
        if (ov.laws) {
            for (int i = 0; i < 4; ++i) {
                const auto& v = ov.orbit.vertices[i];
                const auto [px, py] = map.to_px(Eigen::Vector2d(v.x().real(), v.y().real()));
                const bool solid = ov.laws->at[i] == ReflectionLaw::Usual;
                out += "  <circle cx=\"" + fixed_px(px) + "\" cy=\"" + fixed_px(py) + "\" r=\"" +
                       fixed_px(spec.marker_radius) + "\" fill=\"" + (solid ? "#333333" : "none") +
                       "\" stroke=\"#333333\" stroke-width=\"" + fixed_px(1.0) + "\"/>\n";
            }
        }
    }

    out += "</svg>\n";
    return out;
}

} // namespace billiards
