#pragma once

#include <array>
#include <memory>
#include <string>

#include "wgspec/eigensolve.hpp"
#include "wgspec/expr.hpp"
#include "wgspec/magnetics.hpp"

namespace wgspec {

// J0/J1 by power series (arguments stay below ~13 here) and their first zeros
// by bisection plus Newton.
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_j0_zero1();
double bessel_j1_zero1();

// 2D fiber domain described by a signed distance function (< 0 inside).
struct MaskSpec {
    std::function<double(const Vec2&)> sdf;
    Vec2 lo = Vec2(-1, -1), hi = Vec2(1, 1);
    double bound_radius = 1.0;  // max |y| over the mask
    bool staircase_only = false;  // no sub-cell boundary information
    std::string name = "custom";

    static MaskSpec disk(double radius = 1.0, const Vec2& center = Vec2::Zero());
    static MaskSpec square(double side = 1.0, const Vec2& center = Vec2::Zero());
    static MaskSpec annulus(double r_inner = 0.4, double r_outer = 1.0);
    static MaskSpec from_csv(const std::string& path, double h);
    static MaskSpec named(const std::string& name, double h);
};

// Cross-section geometry: one of the supported tube fiber kinds plus the scale and
// twist profiles along the base.
struct FiberSpec {
    FiberKind kind = FiberKind::MassiveDisk;
    double radius = 1.0;  // MassiveDisk
    MaskSpec mask;        // MassiveGrid
    double h = 1.0 / 32;  // MassiveGrid mesh step
    Expr scale;           // l(x); empty means 1
    Expr twist;           // phi(x); empty means 0 (massive only)

    bool massive() const { return kind != FiberKind::HollowCircle; }
    double ell(double x) const { return scale.empty() ? 1.0 : scale(x); }
    std::array<double, 3> ell2(double x) const {
        return scale.empty() ? std::array<double, 3>{1.0, 0.0, 0.0} : scale.derivatives2(x);
    }
    double phi(double x) const { return twist.empty() ? 0.0 : twist(x); }
    std::array<double, 3> phi2(double x) const {
        return twist.empty() ? std::array<double, 3>{0.0, 0.0, 0.0} : twist.derivatives2(x);
    }
    // fiber radius bound used by the admissibility check
    double bound_radius() const;
};

// Vertical eigendata at unit scale; 1/l^2 scaling is applied downstream.
struct VerticalSpectrum {
    FiberKind kind = FiberKind::MassiveDisk;
    std::vector<double> eigenvalues;  // ascending
    double gap = 0.0;                 // lambda_1 - lambda_0

    Vec2 mean_y = Vec2::Zero();       // <y>_{Phi0}
    double mean_ysq = 0.0;            // <|y|^2>_{Phi0}
    Eigen::Matrix2d second_moments = Eigen::Matrix2d::Zero();  // <y_i y_j>
    double Lnorm_sq = 0.0;            // ||L_y Phi0||^2
    double mean_L = 0.0;              // <Phi0, L_y Phi0>  (zero)
    Vec2 cross_Ly = Vec2::Zero();     // <Phi0, y_j L_y Phi0>

    // lambda_{0,2} = cpar Bpar^2 + cperp |Bperp|^2 at unit scale
    double cpar = 0.0, cperp = 0.0;

    double lambda0() const { return eigenvalues.at(0); }

    double disk_radius = 0.0;  // analytic disk descriptor

    struct GridData {
        SparseHermitian H;          // nonmagnetic fiber FD operator
        double h = 0.0;
        std::vector<std::array<int, 2>> nodes;  // lattice indices of unknowns
        // per node, 4 directed links (+y1, -y1, +y2, -y2): neighbor index or
        // -1 with the Dirichlet cut fraction s
        struct Link {
            int nbr = -1;
            double s = 1.0;
        };
        std::vector<std::array<Link, 4>> links;
        std::vector<double> phi0;    // L2-normalized ground state samples
        std::vector<double> Lphi0;   // discrete L_y Phi0
        double lambda0 = 0.0;
    };
    std::shared_ptr<const GridData> grid;
};

VerticalSpectrum solve_vertical_disk(double rho);
VerticalSpectrum solve_vertical_grid(const MaskSpec& mask, double h_f, int n_modes = 6);
VerticalSpectrum solve_vertical_circle();

// Second-order magnetic correction of the fiber ground state.  Hollow circle:
// (1/4) l^2 Bpar^2 exactly; massive: resolvent form, with the sum-over-states
// term vanishing for rotationally invariant fibers.
double lambda02(const VerticalSpectrum& vs, double Bpar, double ell = 1.0);

// Independent brute-force check: diagonalize the magnetic fiber operator with
// Peierls phases at small couplings and fit the eps^2 coefficient.
double lambda02_bruteforce_fit(const MaskSpec& mask, double h_f, double Bpar,
                               const std::vector<double>& eps = {0.02, 0.01, 0.005});

} // namespace wgspec
