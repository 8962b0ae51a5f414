#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgspec/harness.hpp"

using namespace wgspec;

namespace {

// closed non-planar curve with nontrivial frame holonomy, re-parametrized to
// arc length by Newton inversion of the quadrature length table
void write_wobbly_ring_csv(const std::string& path, int n_samples) {
    auto gamma = [](double t) {
        const double r = 1.5 + 0.3 * std::cos(3.0 * t);
        return Vec3(r * std::cos(t), r * std::sin(t), 0.3 * std::sin(3.0 * t));
    };
    auto speed = [&](double t) {
        const double h = 1e-6;
        return ((gamma(t + h) - gamma(t - h)) / (2.0 * h)).norm();
    };
    // cumulative arc length on a fine table
    const int nt = 20000;
    std::vector<double> s(nt + 1, 0.0);
    for (int i = 0; i < nt; ++i) {
        const double t0 = 2.0 * M_PI * i / nt, t1 = 2.0 * M_PI * (i + 1) / nt;
        s[i + 1] = s[i] + 0.5 * (speed(t0) + speed(t1)) * (t1 - t0);
    }
    const double total = s.back();
    std::ofstream out(path);
    out.precision(17);
    for (int k = 0; k <= n_samples; ++k) {
        const double target = total * k / n_samples;
        // locate and refine t(target)
        size_t lo = 0, hi = nt;
        while (lo + 1 < hi) {
            const size_t mid = (lo + hi) / 2;
            (s[mid] <= target ? lo : hi) = mid;
        }
        double t = 2.0 * M_PI * (lo + (target - s[lo]) / (s[lo + 1] - s[lo])) / nt;
        for (int it = 0; it < 30; ++it) {
            // Newton on s(t) - target using the table-free local integral
            const double tl = 2.0 * M_PI * lo / nt;
            double acc = s[lo];
            const int sub = 64;
            for (int q = 0; q < sub; ++q) {
                const double ta = tl + (t - tl) * q / sub, tb = tl + (t - tl) * (q + 1) / sub;
                acc += 0.5 * (speed(ta) + speed(tb)) * (tb - ta);
            }
            t -= (acc - target) / speed(t);
        }
        const Vec3 c = gamma(t);
        const double x = target - 0.5 * total;  // arc-length coordinate in [-L, L]
        out << x << "," << c.x() << "," << c.y() << "," << c.z() << "\n";
    }
}

std::string flat_config(const std::string& out_dir) {
    std::ostringstream ss;
    ss << R"({
  "curve": {"kind": "line", "x_range": [0.0, 3.141592653589793]},
  "fiber": {"kind": "circle"},
  "potential": {"kind": "uniform", "B": [0.0, 0.0, 0.0]},
  "sigma": 0, "alpha": 2.0, "window_C": 3.0,
  "variants": ["nonmagnetic", "hollow_strong"],
  "epsilons": [0.2, 0.1],
  "grid": {"n_x": 200, "n_y": 48, "n_eigs": 4},
  "out_dir": ")" << out_dir << R"(", "seed": 11
})";
    return ss.str();
}

} // namespace

TEST_CASE("flat hollow cylinder sanity: every distance is tiny at every eps") {
    ExperimentConfig cfg = parse_config(flat_config("/tmp/wg_flat"));
    RunRecord rec = run_experiment(cfg);
    CHECK(rec.distances.size() == 4);
    for (const auto& d : rec.distances) CHECK(d.hausdorff < 1e-6);
}

TEST_CASE("run_experiment reproduces its outputs bitwise") {
    ExperimentConfig cfg = parse_config(flat_config("/tmp/wg_repr1"));
    RunRecord a = run_experiment(cfg);
    ExperimentConfig cfg2 = parse_config(flat_config("/tmp/wg_repr2"));
    RunRecord b = run_experiment(cfg2);
    REQUIRE(a.cells.size() == b.cells.size());
    for (size_t i = 0; i < a.cells.size(); ++i) {
        REQUIRE(a.cells[i].raw.size() == b.cells[i].raw.size());
        for (size_t j = 0; j < a.cells[i].raw.size(); ++j)
            CHECK(a.cells[i].raw[j] == b.cells[i].raw[j]);  // bitwise
    }
    // and the persisted CSVs match byte for byte
    for (const std::string name : {"full.csv", "nonmagnetic.csv", "distances.csv"}) {
        std::ifstream fa("/tmp/wg_repr1/" + name), fb("/tmp/wg_repr2/" + name);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(sa.str().size() > 0);
    }
}

TEST_CASE("summary slopes equal convergence_fit applied to the persisted distances") {
    ExperimentConfig cfg = parse_config(R"json({
      "curve": {"kind": "line", "x_range": [-8.0, 8.0]},
      "fiber": {"kind": "circle"}, "scale": "1 + 0.3*sech(x)",
      "potential": {"kind": "uniform", "B": [0.15, 0.1, 0.2]},
      "sigma": 1, "alpha": 2.0, "window_C": 0.45,
      "variants": ["hollow_strong"],
      "epsilons": [0.3, 0.2, 0.1],
      "grid": {"n_x": 180, "n_y": 32, "n_eigs": 6},
      "out_dir": "/tmp/wg_slope", "seed": 3
    })json");
    RunRecord rec = run_experiment(cfg);
    REQUIRE(rec.fits.count("hollow_strong") == 1);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& d : rec.distances) pairs.push_back({d.eps, d.hausdorff});
    CHECK(rec.fits.at("hollow_strong").slope ==
          doctest::Approx(convergence_fit(pairs).slope).epsilon(1e-14));
}

TEST_CASE("validate_config diagnostics") {
    ExperimentConfig cfg = parse_config(flat_config("/tmp/wg_diag"));
    CHECK(validate_config(cfg).empty());

    // admissibility: eps l R |kappa| >= 1 on a tight circle
    ExperimentConfig bad = cfg;
    bad.curve_kind = "circle";
    bad.circle_radius = 0.5;
    bad.epsilons = {0.9};
    auto diags = validate_config(bad);
    REQUIRE(!diags.empty());
    bool found = false;
    for (const auto& d : diags) found = found || d.find("Admissibility") != std::string::npos;
    CHECK(found);

    // epsilon ordering
    ExperimentConfig order = cfg;
    order.epsilons = {0.1, 0.2};
    diags = validate_config(order);
    found = false;
    for (const auto& d : diags) found = found || d.find("descending") != std::string::npos;
    CHECK(found);

    // variant/fiber compatibility
    ExperimentConfig mismatch = cfg;
    mismatch.variants = {"rigid_strong"};
    diags = validate_config(mismatch);
    found = false;
    for (const auto& d : diags) found = found || d.find("massive") != std::string::npos;
    CHECK(found);

    // memory cap
    ExperimentConfig big = cfg;
    big.n_x = 2000000;
    diags = validate_config(big);
    found = false;
    for (const auto& d : diags) found = found || d.find("MemoryBudget") != std::string::npos;
    CHECK(found);
}

TEST_CASE("sampled closed curve with holonomy: seam diagnostics and frame data") {
    const std::string path = "/tmp/wg_wobbly.csv";
    write_wobbly_ring_csv(path, 1024);

    ExperimentConfig cfg = parse_config(std::string(R"({
      "curve": {"kind": "sampled", "file": ")") + path + R"("},
      "fiber": {"kind": "grid", "mask": "square", "h": 0.05},
      "potential": {"kind": "uniform", "B": [0, 0, 0.3]},
      "sigma": 0, "alpha": 2.0, "window_C": 1.0,
      "variants": ["moderate_general"],
      "epsilons": [0.1],
      "grid": {"n_x": 128, "n_eigs": 4},
      "out_dir": "", "seed": 5
    })");

    CurveModel curve = cfg.make_curve();
    CHECK(curve.closed);
    FrameField frame = build_parallel_frame(curve, 129);
    const double h = std::abs(std::remainder(frame.holonomy_angle, 2.0 * M_PI));
    CHECK(h > 0.05);  // genuinely nontrivial parallel-transport holonomy

    // square fiber on a holonomy-carrying ring: the seam is incompatible
    auto diags = validate_config(cfg);
    bool found = false;
    for (const auto& d : diags) found = found || d.find("SeamIncompatible") != std::string::npos;
    CHECK(found);
}

TEST_CASE("config errors are reported") {
    CHECK_THROWS_AS(parse_config("{\"curve\": {\"kind\": \"spiral\"}, \"fiber\": {\"kind\": "
                                 "\"circle\"}, \"potential\": {\"kind\": \"uniform\", "
                                 "\"B\": [0,0,0]}, \"variants\": [], \"epsilons\": []}")
                        .make_curve(),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
