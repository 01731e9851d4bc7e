#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "billiards/format.hpp"
#include "billiards/real_billiards.hpp"

namespace billiards {

struct RunOptions {
    double tol = 1e-8;
    int grid = 20;
    std::uint64_t seed = 0;
    double margin = 1e-4;
};

struct LoadedScene {
    BilliardScene scene;
    RunOptions options;
    bool is_real = false;  // all mirrors carry real points

    RealScene real() const {
        if (!is_real) throw CommandSceneMismatch("scene has no real form");
        return make_real_scene(scene);
    }
};

namespace io_detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
}

inline Cx parse_number(const json& v, const std::string& where) {
    if (v.is_number()) return Cx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Cx(v[0].get<double>(), v[1].get<double>());
    throw ValidationError("expected a real number or [re, im] pair in " + where);
}

inline std::vector<Cx> parse_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError("expected an array in " + where);
    std::vector<Cx> out;
    for (const auto& e : v) out.push_back(parse_number(e, where));
    return out;
}

inline Mirror parse_mirror(const json& m, const std::string& where) {
    if (!m.is_object()) throw ValidationError("mirror must be an object in " + where);
    const std::string kind = m.value("kind", "");
    if (kind == "line") {
        reject_unknown_keys(m, {"kind", "coeffs"}, where);
        auto c = parse_numbers(m.at("coeffs"), where + ".coeffs");
        if (c.size() != 3) throw ValidationError("line mirrors need 3 coefficients in " + where);
        try {
            return Mirror(ProjLine(c[0], c[1], c[2]));
        } catch (const InvalidSpec& e) {
            throw ValidationError(std::string(e.what()) + " in " + where);
        }
    }
    if (kind == "conic") {
        reject_unknown_keys(m, {"kind", "matrix"}, where);
        auto c = parse_numbers(m.at("matrix"), where + ".matrix");
        if (c.size() != 6)
            throw ValidationError("conic mirrors need the 6 upper-triangular entries in " + where);
        Mat3 mat;
        mat << c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5];
        const Conic conic(mat);
        if (!conic.is_smooth()) throw ValidationError("conic mirror is degenerate in " + where);
        return Mirror(conic);
    }
    if (kind == "param") {
        reject_unknown_keys(m, {"kind", "x", "y"}, where);
        Poly px(parse_numbers(m.at("x"), where + ".x"));
        Poly py(parse_numbers(m.at("y"), where + ".y"));
        try {
            return Mirror(ParamCurve(std::move(px), std::move(py)));
        } catch (const NonAlgebraicInput& e) {
            throw ValidationError(std::string(e.what()) + " in " + where);
        }
    }
    throw ValidationError("mirror kind must be line | conic | param in " + where);
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; }
        else ++col;
    }
    return {line, col};
}

inline json mirror_to_json(const Mirror& m) {
    json out;
    auto num = [](const Cx& v) { return json::array({v.real(), v.imag()}); };
    switch (m.kind()) {
        case MirrorKind::Line: {
            out["kind"] = "line";
            out["coeffs"] = json::array({num(m.line().h(0)), num(m.line().h(1)), num(m.line().h(2))});
            break;
        }
        case MirrorKind::Conic: {
            out["kind"] = "conic";
            const Mat3& mm = m.conic().m;
            out["matrix"] = json::array({num(mm(0, 0)), num(mm(0, 1)), num(mm(0, 2)), num(mm(1, 1)),
                                         num(mm(1, 2)), num(mm(2, 2))});
            break;
        }
        case MirrorKind::Param: {
            out["kind"] = "param";
            json xs = json::array(), ys = json::array();
            for (const Cx& c : m.param().x.c) xs.push_back(num(c));
            for (const Cx& c : m.param().y.c) ys.push_back(num(c));
            out["x"] = xs;
            out["y"] = ys;
            break;
        }
    }
    return out;
}

} // namespace io_detail

inline LoadedScene parse_scene_text(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = io_detail::line_column(text, e.byte);
        throw ParseError("scene file parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("scene document must be an object");
    io_detail::reject_unknown_keys(
        doc, {"version", "mirrors", "type1", "type2", "type3", "type3_parabolas", "options"}, "document");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
        throw ValidationError("scene files require \"version\": 1");

    LoadedScene out;
    int constructions = 0;
    for (const char* k : {"mirrors", "type1", "type2", "type3", "type3_parabolas"})
        if (doc.contains(k)) ++constructions;
    if (constructions != 1)
        throw ValidationError("exactly one of mirrors/type1/type2/type3/type3_parabolas is required");

    if (doc.contains("mirrors")) {
        const auto& ms = doc["mirrors"];
        if (!ms.is_array() || ms.size() != 4) throw ValidationError("\"mirrors\" must list 4 mirrors");
        for (int i = 0; i < 4; ++i)
            out.scene.mirrors[i] = io_detail::parse_mirror(ms[i], "mirrors[" + std::to_string(i) + "]");
    } else if (doc.contains("type1")) {
        const auto& t = doc["type1"];
        io_detail::reject_unknown_keys(t, {"axis", "curve"}, "type1");
        auto axis = io_detail::parse_numbers(t.at("axis"), "type1.axis");
        if (axis.size() != 3) throw ValidationError("type1.axis needs 3 coefficients");
        try {
            out.scene = build_scene(
                Type1Spec{ProjLine(axis[0], axis[1], axis[2]), io_detail::parse_mirror(t.at("curve"), "type1.curve")});
        } catch (const InvalidSpec& e) {
            throw ValidationError(e.what());
        }
    } else if (doc.contains("type2")) {
        const auto& t = doc["type2"];
        io_detail::reject_unknown_keys(t, {"center", "angles_deg", "rot_deg"}, "type2");
        Type2Spec spec;
        if (t.contains("center")) {
            auto c = io_detail::parse_numbers(t["center"], "type2.center");
            if (c.size() != 2) throw ValidationError("type2.center needs 2 coordinates");
            spec.center = ProjPoint::finite(c[0], c[1]);
        }
        auto angles = io_detail::parse_numbers(t.at("angles_deg"), "type2.angles_deg");
        if (angles.size() != 2) throw ValidationError("type2.angles_deg needs 2 angles");
        spec.theta_a_deg = angles[0].real();
        spec.theta_b_deg = angles[1].real();
        spec.theta_rot_deg = io_detail::parse_number(t.at("rot_deg"), "type2.rot_deg").real();
        try {
            out.scene = build_scene(spec);
        } catch (const InvalidSpec& e) {
            throw ValidationError(e.what());
        }
    } else if (doc.contains("type3")) {
        const auto& t = doc["type3"];
        io_detail::reject_unknown_keys(t, {"foci", "lambdas"}, "type3");
        auto f = io_detail::parse_numbers(t.at("foci"), "type3.foci");
        auto l = io_detail::parse_numbers(t.at("lambdas"), "type3.lambdas");
        if (f.size() != 2 || l.size() != 2)
            throw ValidationError("type3 needs a focus [fx, fy] and two lambdas");
        const double fx = f[0].real(), fy = f[1].real();
        const double c = std::hypot(fx, fy);
        if (c < 1e-12) throw ValidationError("type3 focus must be away from the origin");
        auto member = [&](double lambda) {
            const double s = 1.0 + lambda;
            if (std::abs(s) < 1e-12 || s <= -c * c)
                throw ValidationError("type3 lambda outside the confocal family range");
            Conic conic = (s > 0.0) ? confocal_family_real(ConfocalKind::Ellipse, c, lambda)
                                    : confocal_family_real(ConfocalKind::Hyperbola, c, lambda);
            const double th = std::atan2(fy, fx);
            Mat3 rot;
            rot << std::cos(th), -std::sin(th), 0.0, std::sin(th), std::cos(th), 0.0, 0.0, 0.0, 1.0;
            return conic.transformed(ProjMap(rot));
        };
        try {
            out.scene = build_scene(Type3Spec{member(l[0].real()), member(l[1].real())});
        } catch (const InvalidSpec& e) {
            throw ValidationError(e.what());
        }
    } else {
        const auto& t = doc["type3_parabolas"];
        io_detail::reject_unknown_keys(t, {"p"}, "type3_parabolas");
        auto p = io_detail::parse_numbers(t.at("p"), "type3_parabolas.p");
        if (p.size() != 2) throw ValidationError("type3_parabolas needs two parameters");
        try {
            out.scene = build_scene(Type3Spec{confocal_family_real(ConfocalKind::Parabola, 0.0, p[0].real()),
                                              confocal_family_real(ConfocalKind::Parabola, 0.0, p[1].real())});
        } catch (const InvalidSpec& e) {
            throw ValidationError(e.what());
        } catch (const LambdaOutOfRange& e) {
            throw ValidationError(e.what());
        }
    }

    if (doc.contains("options")) {
        const auto& o = doc["options"];
        io_detail::reject_unknown_keys(o, {"tol", "grid", "seed", "margin"}, "options");
        if (o.contains("tol")) out.options.tol = o["tol"].get<double>();
        if (o.contains("grid")) out.options.grid = o["grid"].get<int>();
        if (o.contains("seed")) out.options.seed = o["seed"].get<std::uint64_t>();
        if (o.contains("margin")) out.options.margin = o["margin"].get<double>();
    }

    try {
        (void)make_real_scene(out.scene);
        out.is_real = true;
    } catch (const GeometryError&) {
        out.is_real = false;
    }
    return out;
}

inline LoadedScene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scene file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene_text(buf.str());
}

inline std::string serialize_scene(const BilliardScene& scene, const RunOptions& options = {}) {
    nlohmann::json doc;
    doc["version"] = 1;
    nlohmann::json ms = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) ms.push_back(io_detail::mirror_to_json(scene.mirrors[i]));
    doc["mirrors"] = ms;
    doc["options"] = {{"tol", options.tol}, {"grid", options.grid}, {"seed", options.seed},
                      {"margin", options.margin}};
    return doc.dump(2) + "\n";
}

// CSV writers: header row, comma separated, 17 significant digits.

inline std::string scan_csv(const ScanReport& rep) {
    std::string out = "seed_ta,seed_tb,residual,closed,degenerate\n";
    for (const auto& r : rep.rows) {
        out += g17(r.ta) + "," + g17(r.tb) + "," + g17(r.residual) + "," +
               (r.closed ? "1" : "0") + "," + (r.degenerate ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string census_csv(const Census& census) {
    std::string out = "signature,count,ax,ay,bx,by,cx,cy,dx,dy\n";
    for (const auto& [sig, entry] : census) {
        out += sig + "," + std::to_string(entry.count);
        for (int i = 0; i < 4; ++i) {
            const auto& v = entry.representative.orbit.vertices[i];
            out += "," + g17(v.x().real()) + "," + g17(v.y().real());
        }
        out += "\n";
    }
    return out;
}

inline std::string orbit_csv(const std::vector<QuadOrbit>& orbits) {
    std::string out = "orbit,vertex,x_re,x_im,y_re,y_im,residual,flags\n";
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        for (int i = 0; i < 4; ++i) {
            const auto& v = orbits[k].vertices[i];
            out += std::to_string(k) + "," + std::to_string(i) + "," + g17(v.x().real()) + "," +
                   g17(v.x().imag()) + "," + g17(v.y().real()) + "," + g17(v.y().imag()) + "," +
                   g17(orbits[k].residuals[i]) + "," + std::to_string(orbits[k].flags[i]) + "\n";
        }
    }
    return out;
}

} // namespace billiards
