#pragma once

#include <map>
#include <optional>
#include <string>

#include "wgspec/effective.hpp"
#include "wgspec/reference.hpp"

namespace wgspec {

// Parsed experiment description.  All function-valued fields come in as
// expression strings over the fixed grammar.
struct ExperimentConfig {
    // curve
    std::string curve_kind = "line";  // line | circle | helix | bump_curve | sampled
    double circle_radius = 1.0;
    double helix_a = 1.0, helix_b = 1.0;
    double bump_strength = 1.0;
    std::string curve_file;
    double x_lo = -10.0, x_hi = 10.0;

    FiberSpec fiber;
    std::string mask_name = "disk";

    // potential
    std::string potential_kind = "uniform";  // uniform | pure_gauge | axial_gradient
    Vec3 uniform_B = Vec3(0, 0, 1);
    std::string chi_source = "0";
    double axial_B0 = 1.0, axial_slope = 0.0;

    int sigma = 0;
    double alpha = 2.0;
    double window_C = 1.0;
    std::vector<std::string> variants;
    std::vector<double> epsilons;

    int n_x = 256;          // base grid intervals
    int n_y = 64;           // hollow angular nodes
    double h_f = 1.0 / 32;  // massive fiber mesh
    int n_eigs = 6;
    size_t unknown_cap = 500000;

    std::string out_dir = "out";
    uint64_t seed = 0;

    std::map<std::string, double> expect_min_slope;

    std::string raw_json;  // original document, hashed into the run record

    CurveModel make_curve() const;
    VectorPotential make_potential() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Admissibility, seam, compatibility, and memory diagnostics; empty when the
// config is runnable as stated.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

struct CellResult {
    double eps;
    std::string variant;  // "full" for the reference operator
    std::vector<double> raw, rescaled;
    double seconds = 0.0;
};

struct RunRecord {
    uint64_t config_hash = 0;
    std::vector<CellResult> cells;
    struct Dist {
        double eps;
        std::string variant;
        double hausdorff, max_pairwise;
    };
    std::vector<Dist> distances;
    std::map<std::string, ConvergenceFit> fits;
    std::map<std::string, bool> expectations;
    double total_seconds = 0.0;

    void write_outputs(const std::string& dir) const;
};

RunRecord run_experiment(const ExperimentConfig& cfg,
                         const std::optional<std::string>& out_override = std::nullopt);

uint64_t fnv1a_hash(const std::string& bytes);

} // namespace wgspec
