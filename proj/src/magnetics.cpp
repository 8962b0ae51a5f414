#include "wgspec/magnetics.hpp"

#include <cmath>

namespace wgspec {

Vec3 VectorPotential::operator()(const Vec3& p) const {
    if (!eval_) throw EvaluationDomain("vector potential has no evaluator");
    const Vec3 a = eval_(p);
    if (!a.allFinite()) throw EvaluationDomain("vector potential not finite at query point");
    return a;
}

Vec3 VectorPotential::field(const Vec3& p) const {
    if (curl_) return curl_(p);
    return numerical_curl(p);
}

Vec3 VectorPotential::numerical_curl(const Vec3& p, double step_scale) const {
    const double h = step_scale * 1e-5 * (1.0 + p.norm());
    auto d = [&](int j, int k) {
        Vec3 pp = p, pm = p;
        pp[k] += h;
        pm[k] -= h;
        return ((*this)(pp)[j] - (*this)(pm)[j]) / (2.0 * h);
    };
    return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

VectorPotential VectorPotential::zero() {
    return VectorPotential([](const Vec3&) { return Vec3::Zero(); },
                           [](const Vec3&) { return Vec3::Zero(); });
}

VectorPotential VectorPotential::uniform(const Vec3& B) {
    return VectorPotential([B](const Vec3& p) { return Vec3(0.5 * B.cross(p)); },
                           [B](const Vec3&) { return B; });
}

VectorPotential VectorPotential::pure_gauge(const Expr& chi) {
    return VectorPotential([chi](const Vec3& p) { return chi.gradient(p); },
                           [](const Vec3&) { return Vec3::Zero(); });
}

VectorPotential VectorPotential::axial_gradient(double B0, double slope) {
    // B = (-s p1/2, -s p2/2, B0 + s p3), divergence-free
    return VectorPotential(
        [B0, slope](const Vec3& p) {
            const double f = 0.5 * (B0 + slope * p.z());
            return Vec3(-f * p.y(), f * p.x(), 0.0);
        },
        [B0, slope](const Vec3& p) {
            return Vec3(-0.5 * slope * p.x(), -0.5 * slope * p.y(), B0 + slope * p.z());
        });
}

VectorPotential gauge_transform(const VectorPotential& A, const Expr& chi) {
    auto curl = A.has_analytic_curl()
                    ? std::function<Vec3(const Vec3&)>([A](const Vec3& p) { return A.field(p); })
                    : nullptr;
    return VectorPotential([A, chi](const Vec3& p) { return Vec3(A(p) + chi.gradient(p)); },
                           curl);
}

VectorPotential gauge_transform(const VectorPotential& A,
                                const std::function<double(const Vec3&)>& chi) {
    auto grad = [chi](const Vec3& p) {
        const double h = 1e-6 * (1.0 + p.norm());
        Vec3 g;
        for (int k = 0; k < 3; ++k) {
            Vec3 pp = p, pm = p;
            pp[k] += h;
            pm[k] -= h;
            g[k] = (chi(pp) - chi(pm)) / (2.0 * h);
        }
        return g;
    };
    auto curl = A.has_analytic_curl()
                    ? std::function<Vec3(const Vec3&)>([A](const Vec3& p) { return A.field(p); })
                    : nullptr;
    return VectorPotential([A, grad](const Vec3& p) { return Vec3(A(p) + grad(p)); }, curl);
}

FieldOnCurve field_on_curve(const VectorPotential& A, const FrameField& frame) {
    FieldOnCurve out;
    out.grid = frame.grid;
    const size_t n = frame.size();
    out.Bpar.resize(n);
    out.Bperp1.resize(n);
    out.Bperp2.resize(n);
    out.AB.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec3 B = A.field(frame.pos[i]);
        out.Bpar[i] = B.dot(frame.tau[i]);
        out.Bperp1[i] = B.dot(frame.e1[i]);
        out.Bperp2[i] = B.dot(frame.e2[i]);
        out.AB[i] = A(frame.pos[i]).dot(frame.tau[i]);
    }
    return out;
}

PullbackPotential pullback_components(const VectorPotential& A, const FrameField& frame,
                                      FiberKind kind, const std::vector<double>& ell) {
    if (ell.size() != frame.size())
        throw Error("pullback_components: scale samples must match the frame grid");
    switch (kind) {
        case FiberKind::MassiveDisk:
        case FiberKind::MassiveGrid:
        case FiberKind::HollowCircle:
            break;
        default:
            throw UnsupportedFiber("pullback components are defined for tube fibers only");
    }
    const FieldOnCurve foc = field_on_curve(A, frame);
    PullbackPotential out;
    out.kind = kind;
    out.grid = frame.grid;
    out.AB = foc.AB;
    out.Bpar = foc.Bpar;
    out.ell = ell;
    out.Bperp.resize(frame.size());
    for (size_t i = 0; i < frame.size(); ++i) out.Bperp[i] = foc.Bperp(i);
    return out;
}

} // namespace wgspec
