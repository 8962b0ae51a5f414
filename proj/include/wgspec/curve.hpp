#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgspec/errors.hpp"

namespace wgspec {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct CurveSample {
    Vec3 c, d1, d2;  // position, first and second arc-length derivatives
};

// Arc-length parametrized embedded curve, open interval or closed of length 2L.
class CurveModel {
public:
    enum class Kind { Analytic, Sampled };

    Kind kind = Kind::Analytic;
    bool closed = false;
    double x_min = 0.0, x_max = 1.0;  // closed curves use [-L, L]

    CurveSample eval(double x) const;

    double unit_speed_tol() const { return kind == Kind::Analytic ? 1e-10 : 1e-6; }
    double half_length() const { return 0.5 * (x_max - x_min); }

    // Built-in library (config names in parentheses).
    static CurveModel line(double x_lo = -10.0, double x_hi = 10.0);                // "line"
    static CurveModel circle(double radius);                                        // "circle(R)"
    static CurveModel helix(double a, double b, double x_lo = -10.0, double x_hi = 10.0);  // "helix(a,b)"
    static CurveModel bump_curve(double strength = 1.0, double x_lo = -16.0, double x_hi = 16.0);  // "bump_curve"

    // Uniformly spaced arc-length samples (x, c) with 4th-order FD derivatives.
    static CurveModel sampled(const std::vector<double>& x, const std::vector<Vec3>& c,
                              bool closed = false);

private:
    std::function<CurveSample(double)> eval_fn_;
};

// Sampled Bishop frame with curvatures.  Immutable after construction; the
// fine sub-grid backs interpolation for the full-operator assemblies.
struct FrameField {
    std::vector<double> grid;  // x_0..x_N, uniform
    std::vector<Vec3> pos, tau, e1, e2;
    std::vector<double> kappa1, kappa2;
    double holonomy_angle = 0.0;  // closed curves only
    bool closed = false;

    double dx() const { return grid[1] - grid[0]; }
    size_t size() const { return grid.size(); }

    Vec2 kappa(size_t i) const { return {kappa1[i], kappa2[i]}; }

    struct Local {
        Vec3 c, tau, e1, e2;
        double kappa1, kappa2;
    };
    // Cubic-Lagrange interpolation on the fine construction grid.
    Local at(double x) const;

    // Interpolant values plus exact derivatives of the interpolant; used by
    // the full-operator link integrals so the quadrature path is a genuine
    // differentiable curve (keeps discrete gauge invariance exact).
    struct LocalD {
        Vec3 c, dc, e1, de1, e2, de2;
    };
    LocalD at_d(double x) const;

    // refinement factor of the fine grid
    int refine = 1;
    std::vector<double> fine_x;
    std::vector<Vec3> fine_pos, fine_tau, fine_e1, fine_e2;
    std::vector<double> fine_k1, fine_k2;
};

// Integrates the parallel-frame ODE with RK4 and per-step Gram-Schmidt
// against the exact tangent; curvatures from kappa_j = c'' . e_j.
FrameField build_parallel_frame(const CurveModel& curve, int n_points,
                                std::optional<Vec3> initial_normal = std::nullopt,
                                int refine = 8);

// kappa1^2 + kappa2^2 per grid point; invariant under the initial-normal choice.
std::vector<double> curvature_norm_sq(const FrameField& frame);

} // namespace wgspec
