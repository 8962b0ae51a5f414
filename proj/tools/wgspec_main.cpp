#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "wgspec/harness.hpp"

using namespace wgspec;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    ExperimentConfig cfg = load_config(config_path);
    const auto diags = validate_config(cfg);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "config: " << d << "\n";
        return 2;
    }
    RunRecord rec = run_experiment(cfg, out_dir.empty() ? std::nullopt
                                                        : std::optional<std::string>(out_dir));
    std::cout << "config hash: " << std::hex << rec.config_hash << std::dec << "\n";
    for (const auto& [variant, fit] : rec.fits)
        std::cout << variant << ": slope " << fit.slope << " (residual " << fit.residual
                  << ")\n";
    bool all_ok = true;
    for (const auto& [variant, ok] : rec.expectations) {
        std::cout << variant << ": expectation " << (ok ? "met" : "NOT met") << "\n";
        all_ok = all_ok && ok;
    }
    std::cout << "total " << rec.total_seconds << " s, results in "
              << (out_dir.empty() ? cfg.out_dir : out_dir) << "\n";
    return all_ok ? 0 : 1;
}

int cmd_validate(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    const auto diags = validate_config(cfg);
    if (diags.empty()) {
        std::cout << "config ok\n";
        return 0;
    }
    for (const auto& d : diags) std::cout << d << "\n";
    return 1;
}

int cmd_oracle_lambda02(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    FrameField frame = build_parallel_frame(cfg.make_curve(), cfg.n_x + 1);
    FieldOnCurve foc = field_on_curve(cfg.make_potential(), frame);
    // field strength at the domain midpoint
    const double Bpar = foc.Bpar[foc.Bpar.size() / 2];
    const double ell = cfg.fiber.ell(frame.grid[frame.size() / 2]);

    if (cfg.fiber.kind == FiberKind::HollowCircle) {
        const double closed_form = lambda02(solve_vertical_circle(), Bpar, ell);
        std::cout << "hollow circle closed form: lambda02 = " << closed_form << "\n";
        return 0;
    }
    const MaskSpec mask = cfg.fiber.kind == FiberKind::MassiveDisk
                              ? MaskSpec::disk(cfg.fiber.radius)
                              : cfg.fiber.mask;
    VerticalSpectrum vs = solve_vertical_grid(mask, cfg.h_f, 2);
    const double resolvent = lambda02(vs, Bpar, ell);
    const double fitted = lambda02_bruteforce_fit(mask, cfg.h_f, Bpar) * ell * ell;
    const double rel = std::abs(resolvent - fitted) / std::max(1e-300, std::abs(fitted));
    std::cout << "resolvent path:   " << resolvent << "\n"
              << "brute-force fit:  " << fitted << "\n"
              << "relative gap:     " << rel << "\n";
    return rel < 0.02 ? 0 : 1;
}

int cmd_dump(const std::string& config_path, const std::string& variant, double eps,
             const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path);
    FrameField frame = build_parallel_frame(cfg.make_curve(), cfg.n_x + 1);
    VectorPotential A = cfg.make_potential();
    FieldOnCurve foc = field_on_curve(A, frame);

    const std::string base = out_dir + "/" + variant + "_eps" + std::to_string(eps);
    std::filesystem::create_directories(out_dir);
    if (variant == "full") {
        if (cfg.fiber.kind == FiberKind::HollowCircle) {
            FullOperatorAssembly full = assemble_hollow_surface(frame, cfg.fiber, A, cfg.sigma,
                                                                eps, cfg.n_y, cfg.unknown_cap);
            write_matrix_market(full.H, base + ".mtx");
        } else {
            const MaskSpec mask = cfg.fiber.kind == FiberKind::MassiveDisk
                                      ? MaskSpec::disk(cfg.fiber.radius)
                                      : cfg.fiber.mask;
            VerticalSpectrum vs = solve_vertical_grid(mask, cfg.h_f, 2);
            FullOperatorAssembly full =
                assemble_massive_tube(frame, cfg.fiber, vs, A, cfg.sigma, eps, cfg.unknown_cap);
            write_matrix_market(full.H, base + ".mtx");
        }
        std::cout << "wrote " << base << ".mtx\n";
        return 0;
    }
    VerticalSpectrum vs;
    switch (cfg.fiber.kind) {
        case FiberKind::MassiveDisk: vs = solve_vertical_disk(cfg.fiber.radius); break;
        case FiberKind::MassiveGrid: vs = solve_vertical_grid(cfg.fiber.mask, cfg.h_f, 6); break;
        case FiberKind::HollowCircle: vs = solve_vertical_circle(); break;
    }
    EffectiveOperator1D op =
        assemble_effective(variant_from_string(variant), frame, cfg.fiber, vs, foc, eps);
    write_matrix_market(op.matrix(), base + ".mtx");
    write_operator_csv(op, base + ".csv");
    std::cout << "wrote " << base << ".mtx and " << base << ".csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective and full magnetic waveguide operators"};
    app.require_subcommand(1);

    std::string config_path, out_dir, variant;
    double eps = 0.1;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run an experiment sweep");
    run->add_option("config", config_path, "experiment JSON")->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--threads", threads, "worker threads");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "experiment JSON")->required();

    auto* oracle = app.add_subcommand("oracle", "independent numerical oracles");
    oracle->require_subcommand(1);
    auto* l02 = oracle->add_subcommand("lambda02", "brute-force fit vs resolvent lambda02");
    l02->add_option("config", config_path, "experiment JSON")->required();

    auto* dump = app.add_subcommand("dump-operator", "write matrix market + CSV dumps");
    dump->add_option("config", config_path, "experiment JSON")->required();
    dump->add_option("--variant", variant, "operator variant or 'full'")->required();
    dump->add_option("--eps", eps, "epsilon")->required();
    dump->add_option("--out", out_dir, "output directory")->default_val("dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, threads);
        if (validate->parsed()) return cmd_validate(config_path);
        if (oracle->parsed()) return cmd_oracle_lambda02(config_path);
        if (dump->parsed()) return cmd_dump(config_path, variant, eps, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
