#include "wgspec/effective.hpp"

#include <cmath>
#include <fstream>

namespace wgspec {

Variant variant_from_string(const std::string& name) {
    if (name == "nonmagnetic") return Variant::Nonmagnetic;
    if (name == "moderate_general") return Variant::ModerateGeneral;
    if (name == "rigid_moderate") return Variant::RigidModerate;
    if (name == "strong_alpha0") return Variant::StrongAlpha0;
    if (name == "rigid_strong") return Variant::RigidStrong;
    if (name == "hollow_strong") return Variant::HollowStrong;
    throw ConfigError("unknown operator variant '" + name + "'");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Nonmagnetic: return "nonmagnetic";
        case Variant::ModerateGeneral: return "moderate_general";
        case Variant::RigidModerate: return "rigid_moderate";
        case Variant::StrongAlpha0: return "strong_alpha0";
        case Variant::RigidStrong: return "rigid_strong";
        case Variant::HollowStrong: return "hollow_strong";
    }
    return "?";
}

SparseHermitian EffectiveOperator1D::matrix() const {
    const size_t N = grid.size() - 1;  // link count along the chain
    const double ih2 = 1.0 / (dx() * dx());
    std::vector<Triplet> t;
    if (boundary == Boundary::Dirichlet) {
        // unknowns at interior nodes 1..N-1
        const int n = static_cast<int>(N) - 1;
        if (n < 1) throw Error("effective operator grid too small");
        auto id = [](size_t node) { return static_cast<int>(node) - 1; };
        for (size_t j = 1; j < N; ++j) {
            const double diag = (metric_weight[j - 1] + metric_weight[j]) * ih2 + potential[j];
            t.push_back({id(j), id(j), diag});
            if (j + 1 < N) {
                const cplx off = -metric_weight[j] * ih2 * std::exp(cplx(0.0, link_phase[j]));
                t.push_back({id(j), id(j + 1), off});
                t.push_back({id(j + 1), id(j), std::conj(off)});
            }
        }
        return SparseHermitian::from_triplets(n, std::move(t));
    }
    // periodic: unknowns 0..N-1, node N identified with node 0
    const int n = static_cast<int>(N);
    for (size_t j = 0; j < N; ++j) {
        const size_t prev = (j + N - 1) % N;
        const double diag = (metric_weight[prev] + metric_weight[j]) * ih2 + potential[j];
        t.push_back({static_cast<int>(j), static_cast<int>(j), diag});
        const size_t next = (j + 1) % N;
        const cplx off = -metric_weight[j] * ih2 * std::exp(cplx(0.0, link_phase[j]));
        t.push_back({static_cast<int>(j), static_cast<int>(next), off});
        t.push_back({static_cast<int>(next), static_cast<int>(j), std::conj(off)});
    }
    return SparseHermitian::from_triplets(n, std::move(t));
}

std::vector<double> EffectiveOperator1D::eigenvalues(int k, double solver_tol) const {
    return lowest_eigenpairs(matrix(), k, solver_tol).eigenvalues;
}

namespace {

struct BaseSamples {
    size_t n;                              // node count
    std::vector<double> x;                 // nodes
    std::vector<double> ell, ell1, ell2;   // scale and derivatives at nodes
    std::vector<double> phi1;              // twist derivative at nodes
    std::vector<Vec2> kap;                 // curvature vector at nodes
    std::vector<Vec2> rot_meanY;           // r(x) <y>_0 at nodes (scaled)
    std::vector<double> ksq;               // |kappa|^2
    bool closed;
};

Eigen::Matrix2d rot(double phi) {
    Eigen::Matrix2d r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

BaseSamples sample_base(const FrameField& frame, const FiberSpec& fiber,
                        const VerticalSpectrum& vs, double scale) {
    BaseSamples s;
    s.n = frame.size();
    s.x = frame.grid;
    s.closed = frame.closed;
    s.ell.resize(s.n);
    s.ell1.resize(s.n);
    s.ell2.resize(s.n);
    s.phi1.resize(s.n);
    s.kap.resize(s.n);
    s.rot_meanY.resize(s.n);
    s.ksq.resize(s.n);
    for (size_t i = 0; i < s.n; ++i) {
        const auto l = fiber.ell2(s.x[i]);
        s.ell[i] = l[0];
        s.ell1[i] = l[1];
        s.ell2[i] = l[2];
        s.phi1[i] = fiber.phi2(s.x[i])[1];
        s.kap[i] = frame.kappa(i);
        s.ksq[i] = s.kap[i].squaredNorm();
        s.rot_meanY[i] = rot(fiber.phi(s.x[i])) * (scale * vs.mean_y);
    }
    return s;
}

void require_massive(const VerticalSpectrum& vs, const char* who) {
    if (vs.kind == FiberKind::HollowCircle)
        throw UnsupportedFiber(std::string(who) + " needs a massive fiber");
}

double constant_scale(const FiberSpec& fiber, const FrameField& frame, const char* who) {
    const double l0 = fiber.ell(frame.grid.front());
    for (double x : frame.grid) {
        if (std::abs(fiber.ell(x) - l0) > 1e-10 * (1.0 + std::abs(l0)))
            throw NotRigid(std::string(who) + " requires a constant scale l");
    }
    if (l0 <= 0.0) throw ConfigError("fiber scale must be positive");
    return l0;
}

// metric weight on links: m = 1 + 2 eps l <r <y>, kappa> at link midpoints
std::vector<double> metric_weight_links(const FrameField& frame, const FiberSpec& fiber,
                                        const VerticalSpectrum& vs, double eps) {
    const size_t N = frame.size() - 1;
    std::vector<double> m(N, 1.0);
    if (vs.kind == FiberKind::HollowCircle || vs.mean_y.norm() == 0.0) return m;
    for (size_t j = 0; j < N; ++j) {
        const double xm = 0.5 * (frame.grid[j] + frame.grid[j + 1]);
        const auto loc = frame.at(xm);
        const Vec2 k(loc.kappa1, loc.kappa2);
        const Vec2 ry = rot(fiber.phi(xm)) * vs.mean_y;
        m[j] = 1.0 + 2.0 * eps * fiber.ell(xm) * ry.dot(k);
        if (m[j] <= 0.0) throw AdmissibilityViolated("effective metric weight not positive");
    }
    return m;
}

// trapezoid per link of a nodal coupling a(x)
std::vector<double> phases_from_nodal(const std::vector<double>& a, double dx) {
    std::vector<double> theta(a.size() - 1);
    for (size_t j = 0; j + 1 < a.size(); ++j) theta[j] = 0.5 * dx * (a[j] + a[j + 1]);
    return theta;
}

// 4th-order first derivative of a nodal array (periodic wrap for closed
// curves, shifted stencils at open ends)
std::vector<double> ddx(const std::vector<double>& f, double dx, bool closed) {
    const long n = static_cast<long>(f.size());
    const long np = closed ? n - 1 : n;  // closed grids duplicate the seam node
    std::vector<double> d(static_cast<size_t>(n));
    auto at = [&](long i) {
        if (closed) {
            long m = i % np;
            if (m < 0) m += np;
            return f[static_cast<size_t>(m)];
        }
        return f[static_cast<size_t>(std::min(std::max(i, 0L), n - 1))];
    };
    for (long i = 0; i < n; ++i) {
        if (!closed && (i < 2 || i > n - 3)) {
            const long o = (i < 2) ? 0 : n - 5;
            static const double w[5][5] = {
                {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
                {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
                {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
                {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
                {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12}};
            double acc = 0.0;
            for (int k = 0; k < 5; ++k) acc += w[i - o][k] * f[static_cast<size_t>(o + k)];
            d[static_cast<size_t>(i)] = acc / dx;
        } else {
            d[static_cast<size_t>(i)] =
                (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dx);
        }
    }
    return d;
}

EffectiveOperator1D shell(const FrameField& frame, double eps, bool rescaled) {
    EffectiveOperator1D op;
    op.grid = frame.grid;
    op.boundary = frame.closed ? Boundary::PeriodicWithFlux : Boundary::Dirichlet;
    op.eps = eps;
    op.rescaled = rescaled;
    const size_t N = frame.size() - 1;
    op.metric_weight.assign(N, 1.0);
    op.potential.assign(frame.size(), 0.0);
    op.link_phase.assign(N, 0.0);
    return op;
}

void set_flux(EffectiveOperator1D& op) {
    op.total_flux = 0.0;
    for (double th : op.link_phase) op.total_flux += th;
}

} // namespace

EffectiveOperator1D assemble_nonmagnetic(const FrameField& frame, const FiberSpec& fiber,
                                         const VerticalSpectrum& vs, double eps) {
    EffectiveOperator1D op = shell(frame, eps, true);
    if (vs.kind == FiberKind::HollowCircle) {
        for (size_t i = 0; i < frame.size(); ++i) {
            const auto l = fiber.ell2(frame.grid[i]);
            op.potential[i] = 0.5 * l[2] / l[0] - 0.25 * (l[1] / l[0]) * (l[1] / l[0]);
        }
        op.energy_offset = 0.0;
        return op;
    }
    const double s = constant_scale(fiber, frame, "assemble_nonmagnetic (massive)");
    BaseSamples b = sample_base(frame, fiber, vs, s);
    for (size_t i = 0; i < frame.size(); ++i)
        op.potential[i] = b.phi1[i] * b.phi1[i] * vs.Lnorm_sq - 0.25 * b.ksq[i];
    op.metric_weight = metric_weight_links(frame, fiber, vs, eps);
    op.energy_offset = vs.lambda0() / (s * s);
    return op;
}

EffectiveOperator1D assemble_moderate(const FrameField& frame, const FiberSpec& fiber,
                                      const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                      double eps) {
    EffectiveOperator1D op = assemble_nonmagnetic(frame, fiber, vs, eps);
    std::vector<double> a(frame.size(), 0.0);
    for (size_t i = 0; i < frame.size(); ++i) {
        a[i] = foc.AB[i];
        if (vs.kind != FiberKind::HollowCircle) {
            const double l = fiber.ell(frame.grid[i]);
            const Vec2 ry = rot(fiber.phi(frame.grid[i])) * (l * vs.mean_y);
            a[i] += eps * cross2(foc.Bperp(i), ry);
        }
        // hollow circle: A_1 = 0, the fiber average of the embedding vanishes
    }
    op.link_phase = phases_from_nodal(a, op.dx());
    set_flux(op);
    return op;
}

EffectiveOperator1D assemble_rigid_moderate(const FrameField& frame, const FiberSpec& fiber,
                                            const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                            double eps) {
    require_massive(vs, "assemble_rigid_moderate");
    const double s = constant_scale(fiber, frame, "assemble_rigid_moderate");
    EffectiveOperator1D op = shell(frame, eps, true);
    BaseSamples b = sample_base(frame, fiber, vs, s);

    // u = r^T kappa and derived arrays for the O(eps) potential corrections
    std::vector<double> u1(b.n), u2(b.n), pu1(b.n), pu2(b.n), k1(b.n), k2(b.n);
    for (size_t i = 0; i < b.n; ++i) {
        const Vec2 u = rot(fiber.phi(b.x[i])).transpose() * b.kap[i];
        u1[i] = u.x();
        u2[i] = u.y();
        pu1[i] = b.phi1[i] * u.x();
        pu2[i] = b.phi1[i] * u.y();
        k1[i] = b.kap[i].x();
        k2[i] = b.kap[i].y();
    }
    const double dxg = op.dx();
    const auto dpu1 = ddx(pu1, dxg, b.closed);
    const auto dpu2 = ddx(pu2, dxg, b.closed);
    const auto dk1 = ddx(ddx(k1, dxg, b.closed), dxg, b.closed);
    const auto dk2 = ddx(ddx(k2, dxg, b.closed), dxg, b.closed);

    // scaled fiber data: <y> and <Phi0, y_j L_y Phi0> pick up one factor of s
    const Vec2 I = s * vs.cross_Ly;
    for (size_t i = 0; i < b.n; ++i) {
        const double vbh0 = b.phi1[i] * b.phi1[i] * vs.Lnorm_sq;
        // [( <r y, kappa> phi' )' - L_y <r y, kappa>] = y . w with
        // w = (phi' u)' - (u2, -u1); averaging against L_y pairs it with I
        const Vec2 w(dpu1[i] - u2[i], dpu2[i] + u1[i]);
        const double vbh1 = 2.0 * eps * I.dot(w);
        const Vec2 ry = b.rot_meanY[i];
        const Vec2 kpp(dk1[i], dk2[i]);
        const double vbend =
            -0.25 * b.ksq[i] - 0.5 * eps * (b.ksq[i] * ry.dot(b.kap[i]) + ry.dot(kpp));
        op.potential[i] = vbh0 + vbh1 + vbend;
    }
    op.metric_weight = metric_weight_links(frame, fiber, vs, eps);

    std::vector<double> a(b.n, 0.0);
    for (size_t i = 0; i < b.n; ++i)
        a[i] = foc.AB[i] + eps * cross2(foc.Bperp(i), b.rot_meanY[i]);
    op.link_phase = phases_from_nodal(a, dxg);
    set_flux(op);
    op.energy_offset = vs.lambda0() / (s * s);
    return op;
}

EffectiveOperator1D assemble_strong_alpha0(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                           double eps) {
    require_massive(vs, "assemble_strong_alpha0");
    EffectiveOperator1D op = shell(frame, eps, false);
    for (size_t i = 0; i < frame.size(); ++i) {
        const double l = fiber.ell(frame.grid[i]);
        op.potential[i] = vs.lambda0() / (l * l);
    }
    op.metric_weight = metric_weight_links(frame, fiber, vs, eps);
    std::vector<double> a(frame.size(), 0.0);
    for (size_t i = 0; i < frame.size(); ++i) {
        const double l = fiber.ell(frame.grid[i]);
        const Vec2 ry = rot(fiber.phi(frame.grid[i])) * (l * vs.mean_y);
        a[i] = foc.AB[i] / eps + cross2(foc.Bperp(i), ry);
    }
    op.link_phase = phases_from_nodal(a, op.dx());
    set_flux(op);
    op.energy_offset = 0.0;

    // unrescaled operator: eps^2 (weighted magnetic Laplacian) + lambda_0/l^2
    for (double& m : op.metric_weight) m *= eps * eps;
    return op;
}

EffectiveOperator1D assemble_rigid_strong(const FrameField& frame, const FiberSpec& fiber,
                                          const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                          double eps) {
    require_massive(vs, "assemble_rigid_strong");
    const double s = constant_scale(fiber, frame, "assemble_rigid_strong");
    if (vs.kind == FiberKind::MassiveGrid && !vs.grid)
        throw MissingMoments("grid fiber data required for the strong rigid assembly");
    EffectiveOperator1D op = shell(frame, eps, true);
    BaseSamples b = sample_base(frame, fiber, vs, s);

    std::vector<double> a(b.n, 0.0);
    for (size_t i = 0; i < b.n; ++i) {
        const Vec2 bp = foc.Bperp(i);
        const double l02 = lambda02(vs, foc.Bpar[i], s);
        // q . <y y^T> q = ||(Bperp x s r y) Phi0||^2 with q = s r^T J Bperp
        const Vec2 q = s * (rot(fiber.phi(b.x[i])).transpose() * Vec2(-bp.y(), bp.x()));
        const double hperp = q.dot(vs.second_moments * q);
        const double a1 = cross2(bp, b.rot_meanY[i]);
        op.potential[i] =
            l02 - 0.25 * b.ksq[i] + b.phi1[i] * b.phi1[i] * vs.Lnorm_sq + hperp - a1 * a1;
        a[i] = a1;
    }
    op.link_phase = phases_from_nodal(a, op.dx());
    set_flux(op);
    op.energy_offset = vs.lambda0() / (s * s);
    return op;
}

EffectiveOperator1D assemble_hollow_strong(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const FieldOnCurve& foc,
                                           double eps) {
    if (vs.kind != FiberKind::HollowCircle)
        throw UnsupportedFiber("assemble_hollow_strong needs the hollow circle fiber");
    if (frame.closed)
        throw ClosedCurveUnsupported("the strong hollow expansion is stated for infinite curves");
    EffectiveOperator1D op = shell(frame, eps, true);
    for (size_t i = 0; i < frame.size(); ++i) {
        const auto l = fiber.ell2(frame.grid[i]);
        const double bsq = foc.Bpar[i] * foc.Bpar[i] +
                           2.0 * (foc.Bperp1[i] * foc.Bperp1[i] + foc.Bperp2[i] * foc.Bperp2[i]);
        op.potential[i] = 0.5 * l[2] / l[0] - 0.25 * (l[1] / l[0]) * (l[1] / l[0]) +
                          0.25 * l[0] * l[0] * bsq;
    }
    op.energy_offset = 0.0;
    return op;
}

EffectiveOperator1D assemble_effective(Variant variant, const FrameField& frame,
                                       const FiberSpec& fiber, const VerticalSpectrum& vs,
                                       const FieldOnCurve& foc, double eps) {
    switch (variant) {
        case Variant::Nonmagnetic: return assemble_nonmagnetic(frame, fiber, vs, eps);
        case Variant::ModerateGeneral: return assemble_moderate(frame, fiber, vs, foc, eps);
        case Variant::RigidModerate: return assemble_rigid_moderate(frame, fiber, vs, foc, eps);
        case Variant::StrongAlpha0: return assemble_strong_alpha0(frame, fiber, vs, foc, eps);
        case Variant::RigidStrong: return assemble_rigid_strong(frame, fiber, vs, foc, eps);
        case Variant::HollowStrong: return assemble_hollow_strong(frame, fiber, vs, foc, eps);
    }
    throw ConfigError("unhandled variant");
}

void write_matrix_market(const SparseHermitian& H, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(17);
    size_t count = 0;
    for (int i = 0; i < H.n; ++i)
        for (int p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
            if (H.col[p] <= i) ++count;
    if (H.real_symmetric) {
        out << "%%MatrixMarket matrix coordinate real symmetric\n";
        out << H.n << " " << H.n << " " << count << "\n";
        for (int i = 0; i < H.n; ++i)
            for (int p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
                if (H.col[p] <= i)
                    out << i + 1 << " " << H.col[p] + 1 << " " << H.rval[p] << "\n";
    } else {
        out << "%%MatrixMarket matrix coordinate complex hermitian\n";
        out << H.n << " " << H.n << " " << count << "\n";
        for (int i = 0; i < H.n; ++i)
            for (int p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
                if (H.col[p] <= i)
                    out << i + 1 << " " << H.col[p] + 1 << " " << H.cval[p].real() << " "
                        << H.cval[p].imag() << "\n";
    }
}

void write_operator_csv(const EffectiveOperator1D& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << "x,m,V,theta\n";
    out.precision(17);
    for (size_t i = 0; i < op.grid.size(); ++i) {
        const double m = i < op.metric_weight.size() ? op.metric_weight[i] : 0.0;
        const double th = i < op.link_phase.size() ? op.link_phase[i] : 0.0;
        out << op.grid[i] << "," << m << "," << op.potential[i] << "," << th << "\n";
    }
}

} // namespace wgspec
