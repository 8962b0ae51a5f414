#pragma once

#include <utility>

#include "wgspec/cross_section.hpp"
#include "wgspec/curve.hpp"
#include "wgspec/eigensolve.hpp"
#include "wgspec/magnetics.hpp"

namespace wgspec {

// Directly discretized full magnetic Laplace-Beltrami operator: 2D (x, y)
// surface grid for hollow tubes, 3D (x, y1, y2) grid for massive tubes.
// The matrix is mass-folded (diagonal volume similarity), so its eigenvalues
// are the raw spectrum of -Delta_{G_eps}^{eps^-sigma A_eps}.
struct FullOperatorAssembly {
    SparseHermitian H;
    int sigma = 0;
    double eps = 0.1;
    double lambda_ref = 0.0;  // vertical reference for the rescaled report
    size_t n_x = 0, n_fiber = 0;
    size_t i_start = 0;             // first unknown base node
    std::vector<double> mass;       // diagonal volume weights (pre-similarity)

    std::vector<double> eigenvalues_raw(int k, double solver_tol = 1e-9,
                                        const std::vector<cplx>* start_hint = nullptr) const;
    double rescale(double raw) const { return (raw - lambda_ref) / (eps * eps); }

    // Start vector for the Lanczos solve from a base-curve profile (and an
    // optional fiber profile), mapped into the mass-folded coordinates.
    std::vector<cplx> lift_base_state(const std::vector<double>& base_node_values,
                                      const std::vector<double>* fiber_weights = nullptr) const;
};

// Tubular-radius admissibility: eps * l+ * R * max|kappa| < 1.
void check_admissibility(const FrameField& frame, const FiberSpec& fiber, double eps);

FullOperatorAssembly assemble_hollow_surface(const FrameField& frame, const FiberSpec& fiber,
                                             const VectorPotential& A, int sigma, double eps,
                                             int n_y, size_t unknown_cap = 500000);

FullOperatorAssembly assemble_massive_tube(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const VectorPotential& A,
                                           int sigma, double eps, size_t unknown_cap = 500000);

struct SpectralDistance {
    double hausdorff = 0.0;
    double max_pairwise = 0.0;
    int matched = 0;  // eigenvalues compared index-by-index
};

// Hausdorff distance of the windowed sets plus the largest index-matched gap.
SpectralDistance spectral_distance(const std::vector<double>& spec_a,
                                   const std::vector<double>& spec_b, double window_lo,
                                   double window_hi);

struct ConvergenceFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-log fit residuals
};

// Least-squares fit of log(distance) against log(eps); slope is the
// empirical convergence order.
ConvergenceFit convergence_fit(const std::vector<std::pair<double, double>>& pairs);

} // namespace wgspec
