#pragma once

#include <functional>
#include <vector>

#include "wgspec/curve.hpp"
#include "wgspec/expr.hpp"

namespace wgspec {

// Ambient magnetic potential (one-form in Cartesian components) with optional
// analytic curl; numerical curl falls back to central differences with step
// h_curl = 1e-5 (1 + |p|).
class VectorPotential {
public:
    VectorPotential() = default;
    VectorPotential(std::function<Vec3(const Vec3&)> eval,
                    std::function<Vec3(const Vec3&)> curl = nullptr)
        : eval_(std::move(eval)), curl_(std::move(curl)) {}

    Vec3 operator()(const Vec3& p) const;
    Vec3 field(const Vec3& p) const;  // B = curl A
    bool has_analytic_curl() const { return static_cast<bool>(curl_); }
    Vec3 numerical_curl(const Vec3& p, double step_scale = 1.0) const;

    // Built-ins (config names): "uniform(Bx,By,Bz)" in symmetric gauge,
    // "pure_gauge(chi=...)", "axial_gradient(B0,slope)".
    static VectorPotential zero();
    static VectorPotential uniform(const Vec3& B);
    static VectorPotential pure_gauge(const Expr& chi);
    static VectorPotential axial_gradient(double B0, double slope);

private:
    std::function<Vec3(const Vec3&)> eval_;
    std::function<Vec3(const Vec3&)> curl_;
};

// A + d(chi); field components on the curve are unchanged, A_B shifts by (chi o c)'.
VectorPotential gauge_transform(const VectorPotential& A, const Expr& chi);
VectorPotential gauge_transform(const VectorPotential& A,
                                const std::function<double(const Vec3&)>& chi);

// Field decomposed along the curve in the parallel frame plus the tangential
// potential component A_B.
struct FieldOnCurve {
    std::vector<double> grid;  // shared with the frame
    std::vector<double> Bpar, Bperp1, Bperp2, AB;

    Vec2 Bperp(size_t i) const { return {Bperp1[i], Bperp2[i]}; }
};

FieldOnCurve field_on_curve(const VectorPotential& A, const FrameField& frame);

enum class FiberKind { MassiveDisk, MassiveGrid, HollowCircle };

// Leading-order gauge-fixed pullback components for the tube geometries.  A_H(x, w) = Bperp(x) x w with w the fiber embedding point;
// the vertical part is (-1/2 Bpar l^2 y2, +1/2 Bpar l^2 y1) for massive
// fibers and the constant 1/2 Bpar l^2 for the hollow circle.
struct PullbackPotential {
    FiberKind kind;
    std::vector<double> grid;
    std::vector<double> AB;
    std::vector<double> Bpar;
    std::vector<Vec2> Bperp;
    std::vector<double> ell;  // fiber scale samples on the grid

    double aH(size_t i, const Vec2& varpi_y) const { return cross2(Bperp[i], varpi_y); }
    Vec2 aV_massive(size_t i, const Vec2& y) const {
        const double f = 0.5 * Bpar[i] * ell[i] * ell[i];
        return {-f * y.y(), f * y.x()};
    }
    double aV_hollow(size_t i) const { return 0.5 * Bpar[i] * ell[i] * ell[i]; }
};

PullbackPotential pullback_components(const VectorPotential& A, const FrameField& frame,
                                      FiberKind kind, const std::vector<double>& ell);

} // namespace wgspec
