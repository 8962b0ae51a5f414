#include "wgspec/harness.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace wgspec {

using nlohmann::json;

uint64_t fnv1a_hash(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

CurveModel ExperimentConfig::make_curve() const {
    if (curve_kind == "line") return CurveModel::line(x_lo, x_hi);
    if (curve_kind == "circle") return CurveModel::circle(circle_radius);
    if (curve_kind == "helix") return CurveModel::helix(helix_a, helix_b, x_lo, x_hi);
    if (curve_kind == "bump_curve") return CurveModel::bump_curve(bump_strength, x_lo, x_hi);
    if (curve_kind == "sampled") {
        std::ifstream in(curve_file);
        if (!in) throw ConfigError("cannot open curve file " + curve_file);
        std::vector<double> xs;
        std::vector<Vec3> cs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (char& c : line)
                if (c == ',') c = ' ';
            std::istringstream ls(line);
            double x, cx, cy, cz;
            if (ls >> x >> cx >> cy >> cz) {
                xs.push_back(x);
                cs.push_back(Vec3(cx, cy, cz));
            }
        }
        const bool closed = !cs.empty() && (cs.front() - cs.back()).norm() < 1e-8;
        return CurveModel::sampled(xs, cs, closed);
    }
    throw ConfigError("unknown curve kind '" + curve_kind + "'");
}

VectorPotential ExperimentConfig::make_potential() const {
    if (potential_kind == "uniform") return VectorPotential::uniform(uniform_B);
    if (potential_kind == "pure_gauge")
        return VectorPotential::pure_gauge(Expr::parse_p(chi_source));
    if (potential_kind == "axial_gradient")
        return VectorPotential::axial_gradient(axial_B0, axial_slope);
    if (potential_kind == "zero") return VectorPotential::zero();
    throw ConfigError("unknown potential kind '" + potential_kind + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.raw_json = text;

    const json& c = j.at("curve");
    cfg.curve_kind = c.at("kind").get<std::string>();
    if (c.contains("R")) cfg.circle_radius = c["R"].get<double>();
    if (c.contains("a")) cfg.helix_a = c["a"].get<double>();
    if (c.contains("b")) cfg.helix_b = c["b"].get<double>();
    if (c.contains("strength")) cfg.bump_strength = c["strength"].get<double>();
    if (c.contains("file")) cfg.curve_file = c["file"].get<std::string>();
    if (c.contains("x_range")) {
        cfg.x_lo = c["x_range"].at(0).get<double>();
        cfg.x_hi = c["x_range"].at(1).get<double>();
    }

    const json& f = j.at("fiber");
    const std::string fk = f.at("kind").get<std::string>();
    if (fk == "disk") {
        cfg.fiber.kind = FiberKind::MassiveDisk;
        if (f.contains("radius")) cfg.fiber.radius = f["radius"].get<double>();
    } else if (fk == "grid") {
        cfg.fiber.kind = FiberKind::MassiveGrid;
        cfg.mask_name = f.at("mask").get<std::string>();
        if (f.contains("h")) cfg.h_f = f["h"].get<double>();
        cfg.fiber.mask = MaskSpec::named(cfg.mask_name, cfg.h_f);
    } else if (fk == "circle") {
        cfg.fiber.kind = FiberKind::HollowCircle;
    } else {
        throw ConfigError("unknown fiber kind '" + fk + "'");
    }
    if (j.contains("scale")) cfg.fiber.scale = Expr::parse_x(j["scale"].get<std::string>());
    if (j.contains("twist")) cfg.fiber.twist = Expr::parse_x(j["twist"].get<std::string>());

    const json& p = j.at("potential");
    cfg.potential_kind = p.at("kind").get<std::string>();
    if (p.contains("B")) {
        cfg.uniform_B = Vec3(p["B"].at(0).get<double>(), p["B"].at(1).get<double>(),
                             p["B"].at(2).get<double>());
    }
    if (p.contains("chi")) cfg.chi_source = p["chi"].get<std::string>();
    if (p.contains("B0")) cfg.axial_B0 = p["B0"].get<double>();
    if (p.contains("slope")) cfg.axial_slope = p["slope"].get<double>();

    cfg.sigma = j.value("sigma", 0);
    cfg.alpha = j.value("alpha", 2.0);
    cfg.window_C = j.value("window_C", 1.0);
    for (const auto& v : j.at("variants")) cfg.variants.push_back(v.get<std::string>());
    for (const auto& e : j.at("epsilons")) cfg.epsilons.push_back(e.get<double>());

    if (j.contains("grid")) {
        const json& g = j["grid"];
        cfg.n_x = g.value("n_x", cfg.n_x);
        cfg.n_y = g.value("n_y", cfg.n_y);
        if (g.contains("h_f")) cfg.h_f = g["h_f"].get<double>();
        cfg.n_eigs = g.value("n_eigs", cfg.n_eigs);
        cfg.unknown_cap = g.value("unknown_cap", cfg.unknown_cap);
    }
    if (cfg.fiber.kind == FiberKind::MassiveGrid && cfg.fiber.mask.name.rfind("file:", 0) != 0)
        cfg.fiber.mask = MaskSpec::named(cfg.mask_name, cfg.h_f);
    cfg.fiber.h = cfg.h_f;

    cfg.out_dir = j.value("out_dir", std::string("out"));
    cfg.seed = j.value("seed", 0ull);
    if (j.contains("expect_min_slope"))
        for (auto it = j["expect_min_slope"].begin(); it != j["expect_min_slope"].end(); ++it)
            cfg.expect_min_slope[it.key()] = it.value().get<double>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

struct Problem {
    CurveModel curve;
    FrameField frame;
    VectorPotential A;
    FieldOnCurve foc;
    VerticalSpectrum vs_eff;             // analytic data where available
    std::optional<VerticalSpectrum> vs_full;  // grid-backed data for the reference
};

Problem build_problem(const ExperimentConfig& cfg) {
    Problem pr{cfg.make_curve(), {}, cfg.make_potential(), {}, {}, {}};
    pr.frame = build_parallel_frame(pr.curve, cfg.n_x + 1);
    pr.foc = field_on_curve(pr.A, pr.frame);
    switch (cfg.fiber.kind) {
        case FiberKind::MassiveDisk:
            pr.vs_eff = solve_vertical_disk(cfg.fiber.radius);
            pr.vs_full = solve_vertical_grid(MaskSpec::disk(cfg.fiber.radius), cfg.h_f, 2);
            break;
        case FiberKind::MassiveGrid:
            pr.vs_eff = solve_vertical_grid(cfg.fiber.mask, cfg.h_f, 6);
            pr.vs_full = pr.vs_eff;
            break;
        case FiberKind::HollowCircle:
            pr.vs_eff = solve_vertical_circle();
            break;
    }
    return pr;
}

} // namespace

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> diags;
    for (size_t i = 0; i + 1 < cfg.epsilons.size(); ++i)
        if (cfg.epsilons[i] <= cfg.epsilons[i + 1])
            diags.push_back("ConfigError: epsilon list must be positive descending");
    if (!cfg.epsilons.empty() && cfg.epsilons.back() <= 0.0)
        diags.push_back("ConfigError: epsilon values must be positive");

    for (const std::string& v : cfg.variants) {
        Variant var;
        try {
            var = variant_from_string(v);
        } catch (const Error& e) {
            diags.push_back(std::string("ConfigError: ") + e.what());
            continue;
        }
        const bool hollow = cfg.fiber.kind == FiberKind::HollowCircle;
        if (var == Variant::HollowStrong && !hollow)
            diags.push_back("UnsupportedFiber: hollow_strong requires the circle fiber");
        if ((var == Variant::RigidModerate || var == Variant::RigidStrong ||
             var == Variant::StrongAlpha0) &&
            hollow)
            diags.push_back("UnsupportedFiber: " + v + " requires a massive fiber");
    }

    try {
        CurveModel curve = cfg.make_curve();
        FrameField frame = build_parallel_frame(curve, std::min(cfg.n_x + 1, 257));
        if (!cfg.epsilons.empty()) check_admissibility(frame, cfg.fiber, cfg.epsilons.front());

        if (frame.closed) {
            if (cfg.fiber.kind == FiberKind::HollowCircle) {
                const double dy = 2.0 * M_PI / cfg.n_y;
                const long shift = std::lround(frame.holonomy_angle / dy);
                if (std::abs(frame.holonomy_angle - shift * dy) > 1e-6)
                    diags.push_back("SeamIncompatible: holonomy " +
                                    std::to_string(frame.holonomy_angle) +
                                    " is not a multiple of the angular step");
            } else {
                const double rho = frame.holonomy_angle +
                                   cfg.fiber.phi(frame.grid.back()) -
                                   cfg.fiber.phi(frame.grid.front());
                const long q = std::lround(rho / (0.5 * M_PI));
                if (std::abs(rho - q * 0.5 * M_PI) > 1e-6)
                    diags.push_back("SeamIncompatible: seam rotation " + std::to_string(rho) +
                                    " rad is not a quarter-turn");
            }
        }

        size_t n_fiber = static_cast<size_t>(cfg.n_y);
        if (cfg.fiber.kind != FiberKind::HollowCircle) {
            const MaskSpec mask = cfg.fiber.kind == FiberKind::MassiveDisk
                                      ? MaskSpec::disk(cfg.fiber.radius)
                                      : cfg.fiber.mask;
            // estimate without building: pi R^2 / h^2 (disk), box/h^2 otherwise
            const double area = (mask.hi - mask.lo).prod();
            n_fiber = static_cast<size_t>(area / (cfg.h_f * cfg.h_f));
        }
        const size_t unknowns = static_cast<size_t>(cfg.n_x) * n_fiber;
        if (unknowns > cfg.unknown_cap)
            diags.push_back("MemoryBudget: ~" + std::to_string(unknowns) +
                            " unknowns exceed the cap of " + std::to_string(cfg.unknown_cap));
    } catch (const AdmissibilityViolated& e) {
        diags.push_back(std::string("AdmissibilityViolated: ") + e.what());
    } catch (const SeamIncompatible& e) {
        diags.push_back(std::string("SeamIncompatible: ") + e.what());
    } catch (const MemoryBudget& e) {
        diags.push_back(std::string("MemoryBudget: ") + e.what());
    } catch (const Error& e) {
        diags.push_back(std::string("Error: ") + e.what());
    }
    return diags;
}

RunRecord run_experiment(const ExperimentConfig& cfg,
                         const std::optional<std::string>& out_override) {
    const auto t_start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.config_hash = fnv1a_hash(cfg.raw_json);

    Problem pr = build_problem(cfg);

    const bool hollow = cfg.fiber.kind == FiberKind::HollowCircle;
    std::map<std::string, std::vector<std::pair<double, double>>> dist_pairs;

    // comparison reference for unrescaled variants: the bottom of the
    // analytic vertical band
    double eff_band_min = 0.0;
    if (!hollow) {
        double lmax = 0.0;
        for (double x : pr.frame.grid) lmax = std::max(lmax, cfg.fiber.ell(x));
        eff_band_min = pr.vs_eff.lambda0() / (lmax * lmax);
    }

    for (double eps : cfg.epsilons) {
        // effective operators first; a ground-targeted run reuses the first
        // variant's eigenvector as the Lanczos start for the full solve
        std::vector<CellResult> eff_cells;
        std::vector<double> hint_base;
        for (const std::string& vname : cfg.variants) {
            const Variant variant = variant_from_string(vname);
            const auto t1 = std::chrono::steady_clock::now();
            EffectiveOperator1D op =
                assemble_effective(variant, pr.frame, cfg.fiber, pr.vs_eff, pr.foc, eps);
            CellResult ec;
            ec.eps = eps;
            ec.variant = vname;
            EigenResult er = lowest_eigenpairs(op.matrix(), cfg.n_eigs, 1e-10, hint_base.empty());
            for (double v : er.eigenvalues) {
                ec.raw.push_back(op.lambda_raw(v));
                // unrescaled variants are offset-matched with the band bottom
                ec.rescaled.push_back(op.rescaled ? v : (v - eff_band_min) / (eps * eps));
            }
            if (hint_base.empty() && !er.eigenvectors.empty()) {
                hint_base.assign(pr.frame.size(), 0.0);
                if (op.boundary == Boundary::Dirichlet) {
                    for (size_t q = 1; q + 1 < pr.frame.size(); ++q)
                        hint_base[q] = er.eigenvectors[0][q - 1].real();
                } else {
                    for (size_t q = 0; q + 1 < pr.frame.size(); ++q)
                        hint_base[q] = er.eigenvectors[0][q].real();
                }
            }
            ec.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
            eff_cells.push_back(std::move(ec));
        }

        const auto t0 = std::chrono::steady_clock::now();
        FullOperatorAssembly full =
            hollow ? assemble_hollow_surface(pr.frame, cfg.fiber, pr.A, cfg.sigma, eps, cfg.n_y,
                                             cfg.unknown_cap)
                   : assemble_massive_tube(pr.frame, cfg.fiber, *pr.vs_full, pr.A, cfg.sigma, eps,
                                           cfg.unknown_cap);
        CellResult fc;
        fc.eps = eps;
        fc.variant = "full";
        // a start hint is only safe when the run targets the ground state;
        // window sweeps need an unbiased start so no comb state is skipped
        std::vector<cplx> hint;
        if (cfg.n_eigs <= 2 && !hint_base.empty()) {
            const std::vector<double>* fw =
                (!hollow && pr.vs_full->grid) ? &pr.vs_full->grid->phi0 : nullptr;
            hint = full.lift_base_state(hint_base, fw);
        }
        fc.raw = full.eigenvalues_raw(cfg.n_eigs, 1e-9, hint.empty() ? nullptr : &hint);
        for (double v : fc.raw) fc.rescaled.push_back(full.rescale(v));
        fc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.cells.push_back(fc);
        std::cout << "  [full] eps=" << eps << " lowest=" << fc.raw.front()
                  << " rescaled=" << fc.rescaled.front() << " (" << fc.seconds << " s)\n";

        // window below lambda_0_min + C eps^alpha, in offset-matched units
        const double hi_rescaled = cfg.window_C * std::pow(eps, cfg.alpha - 2.0);
        const double lo_rescaled = -1e300;  // window is (-inf, Lambda_0 + C eps^alpha]

        for (CellResult& ec : eff_cells) {
            SpectralDistance sd =
                spectral_distance(ec.rescaled, fc.rescaled, lo_rescaled, hi_rescaled);
            rec.distances.push_back({eps, ec.variant, sd.hausdorff, sd.max_pairwise});
            dist_pairs[ec.variant].push_back({eps, sd.hausdorff});
            std::cout << "  [" << ec.variant << "] eps=" << eps << " hausdorff=" << sd.hausdorff
                      << " pairwise=" << sd.max_pairwise << "\n";
            rec.cells.push_back(std::move(ec));
        }
    }

    for (const auto& [vname, pairs] : dist_pairs) {
        if (pairs.size() >= 3) {
            bool positive = true;
            for (const auto& pd : pairs)
                positive = positive && pd.second > 0.0 && std::isfinite(pd.second);
            if (positive) rec.fits[vname] = convergence_fit(pairs);
        }
    }
    for (const auto& [vname, min_slope] : cfg.expect_min_slope) {
        const auto it = rec.fits.find(vname);
        rec.expectations[vname] = it != rec.fits.end() && it->second.slope >= min_slope;
    }

    rec.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    const std::string dir = out_override.value_or(cfg.out_dir);
    if (!dir.empty()) rec.write_outputs(dir);
    return rec;
}

void RunRecord::write_outputs(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::map<std::string, std::ofstream> files;
    for (const CellResult& c : cells) {
        auto it = files.find(c.variant);
        if (it == files.end()) {
            it = files.emplace(c.variant, std::ofstream(dir + "/" + c.variant + ".csv")).first;
            it->second.precision(17);
            it->second << "epsilon,index,lambda_raw,lambda_rescaled\n";
        }
        for (size_t i = 0; i < c.raw.size(); ++i)
            it->second << c.eps << "," << i << "," << c.raw[i] << "," << c.rescaled[i] << "\n";
    }

    std::ofstream dist(dir + "/distances.csv");
    dist.precision(17);
    dist << "epsilon,variant,hausdorff,max_pairwise\n";
    for (const Dist& d : distances)
        dist << d.eps << "," << d.variant << "," << d.hausdorff << "," << d.max_pairwise << "\n";

    json js;
    js["config_hash"] = config_hash;
    js["total_seconds"] = total_seconds;
    for (const auto& [vname, fit] : fits) {
        js["fits"][vname] = {
            {"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual}};
    }
    for (const auto& [vname, ok] : expectations) js["expectations"][vname] = ok;
    for (const CellResult& c : cells)
        js["runtimes"].push_back(
            {{"epsilon", c.eps}, {"variant", c.variant}, {"seconds", c.seconds}});
    for (const Dist& d : distances)
        js["distances"].push_back({{"epsilon", d.eps},
                                   {"variant", d.variant},
                                   {"hausdorff", d.hausdorff},
                                   {"max_pairwise", d.max_pairwise}});
    std::ofstream(dir + "/summary.json") << js.dump(2) << "\n";
}

} // namespace wgspec
