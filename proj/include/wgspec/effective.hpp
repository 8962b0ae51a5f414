#pragma once

#include <string>

#include "wgspec/cross_section.hpp"
#include "wgspec/curve.hpp"
#include "wgspec/eigensolve.hpp"
#include "wgspec/magnetics.hpp"

namespace wgspec {

enum class Boundary { Dirichlet, PeriodicWithFlux };

enum class Variant {
    Nonmagnetic,      // H_a^nm, rescaled
    ModerateGeneral,  // minimal coupling to A_B + eps A_1, rescaled
    RigidModerate,    // rigid massive expansion with the O(eps) potential terms
    StrongAlpha0,     // full unrescaled strong-field operator at alpha = 0
    RigidStrong,      // rescaled strong-field rigid massive operator
    HollowStrong      // rescaled strong-field hollow tube operator
};

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

// 1D effective operator over the base grid.  For rescaled variants the
// assembled matrix has the rescaled spectrum and energy_offset holds the
// subtracted lambda_0; raw eigenvalues are offset + eps^2 * rescaled.
struct EffectiveOperator1D {
    std::vector<double> grid;            // x_0..x_N
    std::vector<double> metric_weight;   // per link (size N for open, N for closed wrap)
    std::vector<double> potential;       // per node
    std::vector<double> link_phase;      // theta_i per link
    Boundary boundary = Boundary::Dirichlet;
    double total_flux = 0.0;             // closed curves: sum of link phases
    double energy_offset = 0.0;          // lambda_ref (0 for unrescaled variants)
    bool rescaled = true;
    double eps = 0.0;

    size_t n_nodes() const { return grid.size(); }
    double dx() const { return grid[1] - grid[0]; }

    SparseHermitian matrix() const;
    std::vector<double> eigenvalues(int k, double solver_tol = 1e-10) const;

    double lambda_raw(double eig) const {
        return rescaled ? energy_offset + eps * eps * eig : eig;
    }
    double lambda_rescaled(double eig) const {
        return rescaled ? eig : (eig - energy_offset) / (eps * eps);
    }
};

struct OperatorRecipe {
    Variant variant = Variant::Nonmagnetic;
    double eps = 0.1;
    double alpha = 2.0;  // energy-scale exponent, analysis metadata
};

EffectiveOperator1D assemble_nonmagnetic(const FrameField& frame, const FiberSpec& fiber,
                                         const VerticalSpectrum& vs, double eps);

EffectiveOperator1D assemble_moderate(const FrameField& frame, const FiberSpec& fiber,
                                      const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                      double eps);

EffectiveOperator1D assemble_rigid_moderate(const FrameField& frame, const FiberSpec& fiber,
                                            const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                            double eps);

EffectiveOperator1D assemble_strong_alpha0(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                           double eps);

EffectiveOperator1D assemble_rigid_strong(const FrameField& frame, const FiberSpec& fiber,
                                          const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                          double eps);

EffectiveOperator1D assemble_hollow_strong(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                           double eps);

EffectiveOperator1D assemble_effective(Variant variant, const FrameField& frame,
                                       const FiberSpec& fiber, const VerticalSpectrum& vs,
                                       const FieldOnCurve& foc, double eps);

// Operator dumps named in the external interfaces: matrix market file for the
// assembled matrix and a CSV of (x, m, V, theta).
void write_matrix_market(const SparseHermitian& H, const std::string& path);
void write_operator_csv(const EffectiveOperator1D& op, const std::string& path);

} // namespace wgspec
