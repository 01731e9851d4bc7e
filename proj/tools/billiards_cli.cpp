#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "billiards/classify.hpp"
#include "billiards/puiseaux.hpp"
#include "billiards/scene_io.hpp"
#include "billiards/svg.hpp"

namespace fs = std::filesystem;
using namespace billiards;

namespace {

struct CommonArgs {
    std::string scene_path;
    std::string out_dir = ".";
    std::string svg_path;
    std::string viewport;
    double tol = -1.0;      // negative: take the scene-file value
    int grid = -1;
    std::int64_t seed = -1;
    double ta = 0.31, tb = 0.57;
    int orbit_count = 1;
    std::string ra = "2", rb = "2";
    std::string sigma = "-3";
};

RunOptions merged_options(const LoadedScene& loaded, const CommonArgs& args) {
    RunOptions opt = loaded.options;
    if (args.tol > 0.0) opt.tol = args.tol;
    if (args.grid > 0) opt.grid = args.grid;
    if (args.seed >= 0) opt.seed = static_cast<std::uint64_t>(args.seed);
    return opt;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << content;
    std::cout << "wrote " << path.string() << "\n";
}

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

Cx parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return Cx(std::stod(s), 0.0);
    return Cx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

RenderSpec parse_viewport(const std::string& s) {
    RenderSpec spec;
    if (s.empty()) return spec;
    double v[4];
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) != 4)
        throw ValidationError("viewport must be x0,y0,x1,y1");
    spec.x0 = v[0];
    spec.y0 = v[1];
    spec.x1 = v[2];
    spec.y1 = v[3];
    return spec;
}

const char* type_name(BilliardTypeTag tag) {
    switch (tag) {
        case BilliardTypeTag::Type1SymmetricLine: return "Type1SymmetricLine";
        case BilliardTypeTag::Type2ConcurrentLines: return "Type2ConcurrentLines";
        case BilliardTypeTag::Type3ConfocalConics: return "Type3ConfocalConics";
        case BilliardTypeTag::NotFourReflective: return "NotFourReflective";
    }
    return "?";
}

const char* confocal_name(ConfocalTag tag) {
    switch (tag) {
        case ConfocalTag::TransverseHyperbolas: return "TransverseHyperbolas";
        case ConfocalTag::NonIsotropicParabolas: return "NonIsotropicParabolas";
        case ConfocalTag::IsotropicParabolas: return "IsotropicParabolas";
        case ConfocalTag::NotConfocal: return "NotConfocal";
    }
    return "?";
}

int run_classify(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    const RunOptions opt = merged_options(loaded, args);
    ScanOptions scan;
    scan.grid = std::min(opt.grid, 12);
    scan.tol = opt.tol;
    scan.seed = opt.seed;
    const BilliardType type = classify_scene(loaded.scene, 1e-8, scan);

    std::string report = std::string(type_name(type.tag));
    if (type.rotation_degrees) report += ", rotation " + g17(*type.rotation_degrees) + " deg";
    if (type.confocal) report += std::string(", ") + confocal_name(type.confocal->tag);
    report += "\n";
    report += "scan: fraction_closing=" + g17(type.scan.fraction_closing) +
              " median_residual=" + g17(type.scan.median_residual) +
              " degenerate=" + std::to_string(type.scan.degenerate_count) + "\n";
    std::cout << report;
    write_file(fs::path(args.out_dir) / "classify.txt", report);
    return 0;
}

int run_scan(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    const RunOptions opt = merged_options(loaded, args);
    ScanOptions scan;
    scan.grid = opt.grid;
    scan.tol = opt.tol;
    scan.seed = opt.seed;
    scan.margin = opt.margin;
    const ScanReport rep = reflectivity_scan(loaded.scene, scan);
    std::cout << "fraction_closing=" << g17(rep.fraction_closing)
              << " median_residual=" << g17(rep.median_residual)
              << " degenerate=" << rep.degenerate_count << " of " << rep.total << "\n";
    write_file(fs::path(args.out_dir) / "scan.csv", scan_csv(rep));
    return 0;
}

int run_orbit(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    const RunOptions opt = merged_options(loaded, args);
    const ProjPoint A = loaded.scene.mirrors[0].sample(Cx(args.ta));
    const ProjPoint B = loaded.scene.mirrors[1].sample(Cx(args.tb));
    const auto orbits = extend_orbit(loaded.scene, A, B, opt.tol);
    std::cout << "seed (" << g17(args.ta) << ", " << g17(args.tb) << "): " << orbits.size()
              << " closing orbit(s)\n";
    for (const auto& q : orbits) std::cout << "  max residual " << g17(q.max_residual()) << "\n";
    write_file(fs::path(args.out_dir) / "orbit.csv", orbit_csv(orbits));
    return 0;
}

int run_degenerate(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    const auto cat = degenerate_catalogue(loaded.scene);
    std::string report = "tangency curves T_a, T_b: ";
    report += genus_name(cat.genus);
    report += "\n";
    report += "conic intersection multiplicities:";
    for (const auto& p : cat.tangency.intersections) report += " " + std::to_string(p.multiplicity);
    report += "\n";
    for (std::size_t i = 0; i < cat.gamma.size(); ++i) {
        const auto& g = cat.gamma[i];
        report += "isotropic tangent line " + std::to_string(i) + ": [" + g17(g.line.h(0)) + ", " +
                  g17(g.line.h(1)) + ", " + g17(g.line.h(2)) + "]\n";
        report += "  touch on a: (" + g17(g.a_touch.h(0)) + " : " + g17(g.a_touch.h(1)) + " : " +
                  g17(g.a_touch.h(2)) + ")\n";
        report += "  touch on b: (" + g17(g.b_touch.h(0)) + " : " + g17(g.b_touch.h(1)) + " : " +
                  g17(g.b_touch.h(2)) + ")\n";
        report += "  pinned curves: G_ab, G_bc, G_cd, G_da\n";
    }
    std::cout << report;
    write_file(fs::path(args.out_dir) / "degenerate.txt", report);
    return 0;
}

int run_puiseaux(const CommonArgs& args) {
    const Rational ra = parse_rational(args.ra), rb = parse_rational(args.rb);
    const Cx sigma = parse_complex(args.sigma);
    const Germ germ_a(GermBase::Finite, ra, sigma);
    const Germ germ_b(GermBase::Finite, rb, Cx(1.0));
    const auto asym = tangency_asymptotics(germ_a, germ_b);

    std::string report = "tangency correspondence for r_a=" + ra.str() + ", r_b=" + rb.str() +
                         ", sigma=" + g17(sigma) + "\n";
    report += "case " + std::to_string(asym.case_id) + ", " +
              std::to_string(asym.diagram.edges.size()) + " diagram edge(s)\n";
    for (std::size_t b = 0; b < asym.branches.size(); ++b) {
        const auto& br = asym.branches[b];
        report += "branch " + std::to_string(b) + ": u ~ s * v^(" + br.u_exponent.str() +
                  "), alpha ~ c * v^(" + br.alpha_exponent.str() + ")\n";
        for (std::size_t k = 0; k < br.u_coefficients.size(); ++k)
            report += "  s=" + g17(br.u_coefficients[k]) + "  c=" + g17(br.alpha_coefficients[k]) + "\n";
    }
    report += "reflected azimuth decay:\n";
    const GermBase bases[] = {GermBase::Finite, GermBase::InfiniteNonIsotropic,
                              GermBase::IsotropicFiniteTangent, GermBase::IsotropicInfiniteTangent};
    const char* names[] = {"finite", "infinite non-isotropic", "isotropic, finite tangent",
                           "isotropic, infinite tangent"};
    for (int i = 0; i < 4; ++i) {
        const auto dec = reflected_azimuth_asymptotics(Germ(bases[i], ra, sigma));
        report += std::string("  ") + names[i] + ": exponent " + dec.exponent.str();
        if (!dec.order_bound_only) report += ", p = " + dec.p.str();
        report += "\n";
    }
    report += "tangent foot coefficient (r_a): " + tangent_foot_coefficient(ra).str() + "\n";
    report += std::string("exponent inequality r_b(2-r_a) < r_a: ") +
              (lemgerm_condition_iv(ra, rb) ? "holds" : "fails") + "\n";
    std::cout << report;
    write_file(fs::path(args.out_dir) / "puiseaux.txt", report);
    return 0;
}

int run_census(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    if (!loaded.is_real) throw CommandSceneMismatch("census requires a scene with real mirrors");
    const RunOptions opt = merged_options(loaded, args);
    const RealScene rs = loaded.real();
    const Census census = law_signature_census(rs, std::max(opt.grid * opt.grid, 100), opt.tol);
    for (const auto& [sig, entry] : census)
        std::cout << sig << ": " << entry.count << " orbit(s)\n";
    write_file(fs::path(args.out_dir) / "census.csv", census_csv(census));
    return 0;
}

int run_render(const CommonArgs& args) {
    const LoadedScene loaded = load_scene(args.scene_path);
    if (!loaded.is_real) throw CommandSceneMismatch("render requires a scene with real mirrors");
    const RunOptions opt = merged_options(loaded, args);
    const RealScene rs = loaded.real();
    RenderSpec spec = parse_viewport(args.viewport);

    std::vector<OrbitOverlay> overlays;
    if (args.orbit_count > 0) {
        std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> seeds;
        const int per = 8;
        for (const auto& ba : rs.branches[0])
            for (const auto& bb : rs.branches[1])
                for (int i = 0; i < per && int(seeds.size()) < 64; ++i)
                    seeds.emplace_back(ba.point((i + 0.5) / per), bb.point((0.37 + 0.11 * i)));
        for (const auto& ro : find_real_orbits(rs, seeds, opt.tol)) {
            bool in_view = true;
            for (const auto& v : ro.orbit.vertices) {
                if (v.x().real() < spec.x0 || v.x().real() > spec.x1 || v.y().real() < spec.y0 ||
                    v.y().real() > spec.y1)
                    in_view = false;
            }
            if (!in_view) continue;
            overlays.push_back({ro.orbit, ro.signature});
            if (int(overlays.size()) >= args.orbit_count) break;
        }
    }

    const std::string svg = render_svg(rs, overlays, spec);
    const fs::path path = args.svg_path.empty() ? fs::path(args.out_dir) / "scene.svg"
                                                : fs::path(args.svg_path);
    write_file(path, svg);
    std::cout << "rendered " << overlays.size() << " orbit overlay(s)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification toolkit for quadrilateral orbits of planar reflection scenes"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool needs_scene) {
        auto* opt = cmd->add_option("--scene", args.scene_path, "scene file (JSON)");
        if (needs_scene) opt->required();
        cmd->add_option("--tol", args.tol, "closure tolerance");
        cmd->add_option("--grid", args.grid, "seed grid size");
        cmd->add_option("--seed", args.seed, "random seed");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--svg", args.svg_path, "SVG output path");
        cmd->add_option("--viewport", args.viewport, "viewport x0,y0,x1,y1");
    };

    auto* c_classify = app.add_subcommand("classify", "decide the scene type");
    add_common(c_classify, true);
    auto* c_scan = app.add_subcommand("scan", "seed-grid closure statistics");
    add_common(c_scan, true);
    auto* c_orbit = app.add_subcommand("orbit", "extend one seed pair to quadrilaterals");
    add_common(c_orbit, true);
    c_orbit->add_option("--ta", args.ta, "seed parameter on the first mirror");
    c_orbit->add_option("--tb", args.tb, "seed parameter on the second mirror");
    auto* c_degenerate = app.add_subcommand("degenerate", "catalogue of degenerate orbit curves");
    add_common(c_degenerate, true);
    auto* c_puiseaux = app.add_subcommand("puiseaux", "local tangency asymptotics tables");
    add_common(c_puiseaux, false);
    c_puiseaux->add_option("--ra", args.ra, "first branch exponent p/q");
    c_puiseaux->add_option("--rb", args.rb, "second branch exponent p/q");
    c_puiseaux->add_option("--sigma", args.sigma, "leading coefficient re[,im]");
    auto* c_census = app.add_subcommand("census", "real reflection-law census");
    add_common(c_census, true);
    auto* c_render = app.add_subcommand("render", "SVG figure of the scene and orbits");
    add_common(c_render, true);
    c_render->add_option("--orbits", args.orbit_count, "orbit overlays to draw");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_classify->parsed()) return run_classify(args);
        if (c_scan->parsed()) return run_scan(args);
        if (c_orbit->parsed()) return run_orbit(args);
        if (c_degenerate->parsed()) return run_degenerate(args);
        if (c_puiseaux->parsed()) return run_puiseaux(args);
        if (c_census->parsed()) return run_census(args);
        if (c_render->parsed()) return run_render(args);
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
