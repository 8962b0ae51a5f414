#include "wgspec/curve.hpp"

#include <cmath>
#include <memory>

namespace wgspec {

namespace {

// 4-point Gauss-Legendre nodes/weights on [0,1].
constexpr double kGauss4X[4] = {0.06943184420297371, 0.33000947820757187,
                                0.66999052179242813, 0.93056815579702629};
constexpr double kGauss4W[4] = {0.17392742256872693, 0.32607257743127307,
                                0.32607257743127307, 0.17392742256872693};

} // namespace

CurveSample CurveModel::eval(double x) const {
    if (closed) {
        // wrap into [-L, L)
        const double L = half_length();
        x = std::remainder(x, 2.0 * L);
    } else if (x < x_min - 1e-9 || x > x_max + 1e-9) {
        throw EvaluationDomain("curve parameter outside domain");
    }
    return eval_fn_(x);
}

CurveModel CurveModel::line(double x_lo, double x_hi) {
    CurveModel m;
    m.kind = Kind::Analytic;
    m.closed = false;
    m.x_min = x_lo;
    m.x_max = x_hi;
    m.eval_fn_ = [](double x) {
        return CurveSample{Vec3(x, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0)};
    };
    return m;
}

CurveModel CurveModel::circle(double radius) {
    CurveModel m;
    m.kind = Kind::Analytic;
    m.closed = true;
    m.x_min = -M_PI * radius;
    m.x_max = M_PI * radius;
    m.eval_fn_ = [radius](double x) {
        const double t = x / radius;
        return CurveSample{Vec3(radius * std::cos(t), radius * std::sin(t), 0),
                           Vec3(-std::sin(t), std::cos(t), 0),
                           Vec3(-std::cos(t) / radius, -std::sin(t) / radius, 0)};
    };
    return m;
}

CurveModel CurveModel::helix(double a, double b, double x_lo, double x_hi) {
    CurveModel m;
    m.kind = Kind::Analytic;
    m.closed = false;
    m.x_min = x_lo;
    m.x_max = x_hi;
    const double w = 1.0 / std::sqrt(a * a + b * b);
    m.eval_fn_ = [a, b, w](double x) {
        const double t = w * x;
        return CurveSample{Vec3(a * std::cos(t), a * std::sin(t), b * t),
                           Vec3(-a * w * std::sin(t), a * w * std::cos(t), b * w),
                           Vec3(-a * w * w * std::cos(t), -a * w * w * std::sin(t), 0)};
    };
    return m;
}

// Planar curve with kappa(x) = k0 sech(x): tangent angle theta(x) = k0 gd(x),
// position by cached cumulative Gauss quadrature of (cos theta, sin theta).
CurveModel CurveModel::bump_curve(double strength, double x_lo, double x_hi) {
    CurveModel m;
    m.kind = Kind::Analytic;
    m.closed = false;
    m.x_min = x_lo;
    m.x_max = x_hi;

    const double k0 = strength;
    auto theta = [k0](double x) { return k0 * 2.0 * std::atan(std::tanh(0.5 * x)); };

    // prefix integrals of (cos theta, sin theta) from x_lo on a fixed fine grid
    const double step = 0.125;
    const int n_cells = static_cast<int>(std::ceil((x_hi - x_lo) / step));
    auto prefix = std::make_shared<std::vector<Vec3>>();
    prefix->reserve(n_cells + 1);
    prefix->push_back(Vec3::Zero());
    for (int i = 0; i < n_cells; ++i) {
        const double a = x_lo + i * step;
        Vec3 acc = Vec3::Zero();
        for (int g = 0; g < 4; ++g) {
            const double t = theta(a + kGauss4X[g] * step);
            acc += kGauss4W[g] * step * Vec3(std::cos(t), std::sin(t), 0.0);
        }
        prefix->push_back(prefix->back() + acc);
    }

    m.eval_fn_ = [=](double x) {
        const int cell = std::min(n_cells - 1, std::max(0, static_cast<int>((x - x_lo) / step)));
        const double a = x_lo + cell * step;
        Vec3 c = (*prefix)[cell];
        const double h = x - a;
        for (int g = 0; g < 4; ++g) {
            const double t = theta(a + kGauss4X[g] * h);
            c += kGauss4W[g] * h * Vec3(std::cos(t), std::sin(t), 0.0);
        }
        const double th = theta(x);
        const double kap = k0 / std::cosh(x);
        return CurveSample{c, Vec3(std::cos(th), std::sin(th), 0.0),
                           kap * Vec3(-std::sin(th), std::cos(th), 0.0)};
    };
    return m;
}

CurveModel CurveModel::sampled(const std::vector<double>& x, const std::vector<Vec3>& c,
                               bool closed) {
    if (x.size() != c.size() || x.size() < 8)
        throw Error("sampled curve needs >= 8 matching (x, c) rows");
    const size_t n = x.size();
    const double h = x[1] - x[0];
    for (size_t i = 1; i < n; ++i)
        if (std::abs((x[i] - x[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw Error("sampled curve requires a uniform x grid");

    // Closed input: the last row duplicates the first point at x = +L.
    // 4th-order central differences (wrapped for closed, one-sided at open ends).
    const size_t np = closed ? n - 1 : n;
    auto idx = [&](long i) -> size_t {
        if (closed) {
            long m = i % static_cast<long>(np);
            if (m < 0) m += static_cast<long>(np);
            return static_cast<size_t>(m);
        }
        return static_cast<size_t>(std::min<long>(std::max<long>(i, 0), static_cast<long>(np) - 1));
    };

    auto stencil_d1 = [&](long i) -> Vec3 {
        if (!closed && (i < 2 || i > static_cast<long>(np) - 3)) {
            // shifted 5-point 4th-order stencils near open ends
            long o = (i < 2) ? 0 : static_cast<long>(np) - 5;
            const double s = static_cast<double>(i - o);
            Vec3 d = Vec3::Zero();
            // derivative of the degree-4 Lagrange interpolant at offset s
            const double w[5][5] = {
                {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
                {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
                {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
                {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
                {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12}};
            for (int k = 0; k < 5; ++k) d += w[static_cast<int>(s)][k] * c[idx(o + k)];
            return d / h;
        }
        return (c[idx(i - 2)] - 8.0 * c[idx(i - 1)] + 8.0 * c[idx(i + 1)] - c[idx(i + 2)]) /
               (12.0 * h);
    };
    auto stencil_d2 = [&](long i) -> Vec3 {
        if (!closed && (i < 2 || i > static_cast<long>(np) - 3)) {
            long o = (i < 2) ? 0 : static_cast<long>(np) - 6;
            const double s = static_cast<double>(i - o);
            // 6-point 4th-order second-derivative stencils
            const double w[6][6] = {
                {15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12, -5.0 / 6},
                {5.0 / 6, -5.0 / 4, -1.0 / 3, 7.0 / 6, -1.0 / 2, 1.0 / 12},
                {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12, 0.0},
                {0.0, -1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12},
                {1.0 / 12, -1.0 / 2, 7.0 / 6, -1.0 / 3, -5.0 / 4, 5.0 / 6},
                {-5.0 / 6, 61.0 / 12, -13.0, 107.0 / 6, -77.0 / 6, 15.0 / 4}};
            Vec3 d = Vec3::Zero();
            for (int k = 0; k < 6; ++k) d += w[static_cast<int>(s)][k] * c[idx(o + k)];
            return d / (h * h);
        }
        return (-c[idx(i - 2)] + 16.0 * c[idx(i - 1)] - 30.0 * c[idx(i)] + 16.0 * c[idx(i + 1)] -
                c[idx(i + 2)]) /
               (12.0 * h * h);
    };

    auto d1 = std::make_shared<std::vector<Vec3>>(np);
    auto d2 = std::make_shared<std::vector<Vec3>>(np);
    for (size_t i = 0; i < np; ++i) {
        (*d1)[i] = stencil_d1(static_cast<long>(i));
        (*d2)[i] = stencil_d2(static_cast<long>(i));
    }

    CurveModel m;
    m.kind = Kind::Sampled;
    m.closed = closed;
    m.x_min = x.front();
    m.x_max = x.back();
    const double x0 = x.front();
    auto pos = std::make_shared<std::vector<Vec3>>(c.begin(), c.end());

    m.eval_fn_ = [pos, d1, d2, x0, h, np, closed](double xq) {
        auto wrap = [np, closed](long i) -> size_t {
            if (closed) {
                long w = i % static_cast<long>(np);
                if (w < 0) w += static_cast<long>(np);
                return static_cast<size_t>(w);
            }
            return static_cast<size_t>(
                std::min<long>(std::max<long>(i, 0), static_cast<long>(np) - 1));
        };
        // cubic Lagrange interpolation of the c, c', c'' node arrays
        double s = (xq - x0) / h;
        long i0 = static_cast<long>(std::floor(s)) - 1;
        if (!closed) i0 = std::max<long>(0, std::min<long>(i0, static_cast<long>(np) - 4));
        const double t = s - static_cast<double>(i0);
        double w[4];
        w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
        w[1] = t * (t - 2) * (t - 3) / 2.0;
        w[2] = -t * (t - 1) * (t - 3) / 2.0;
        w[3] = t * (t - 1) * (t - 2) / 6.0;
        CurveSample out{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
        for (int k = 0; k < 4; ++k) {
            const size_t j = wrap(i0 + k);
            out.c += w[k] * (*pos)[std::min(j, pos->size() - 1)];
            out.d1 += w[k] * (*d1)[j];
            out.d2 += w[k] * (*d2)[j];
        }
        return out;
    };
    return m;
}

namespace {

void orthonormalize(const Vec3& tau, Vec3& e1, Vec3& e2) {
    e1 -= e1.dot(tau) * tau;
    e1.normalize();
    e2 -= e2.dot(tau) * tau + e2.dot(e1) * e1;
    e2.normalize();
}

struct FrameState {
    Vec3 e1, e2;
};

// d/dx e_j = -(c'' . e_j) c'
FrameState frame_rhs(const CurveSample& s, const FrameState& f) {
    return {-(s.d2.dot(f.e1)) * s.d1, -(s.d2.dot(f.e2)) * s.d1};
}

} // namespace

FrameField build_parallel_frame(const CurveModel& curve, int n_points,
                                std::optional<Vec3> initial_normal, int refine) {
    if (n_points < 16) throw Error("build_parallel_frame: n_points must be >= 16");
    if (refine < 1) refine = 1;

    const int n_fine = (n_points - 1) * refine;
    const double dx = (curve.x_max - curve.x_min) / static_cast<double>(n_points - 1);
    const double h = dx / static_cast<double>(refine);

    FrameField out;
    out.closed = curve.closed;
    out.refine = refine;

    // unit-speed and orthogonality checks on the coarse grid
    const double tol = curve.unit_speed_tol();
    for (int i = 0; i < n_points; ++i) {
        const double x = curve.x_min + i * dx;
        const CurveSample s = curve.eval(x);
        if (std::abs(s.d1.norm() - 1.0) > tol)
            throw NonUnitSpeed("curve is not arc-length parametrized at x = " + std::to_string(x));
        if (std::abs(s.d2.dot(s.d1)) > tol * (1.0 + s.d2.norm()))
            throw NonUnitSpeed("c'' is not orthogonal to c' at x = " + std::to_string(x));
    }
    if (curve.closed) {
        const CurveSample a = curve.eval(curve.x_min), b = curve.eval(curve.x_max);
        if ((a.c - b.c).norm() > 1e-8 || (a.d1 - b.d1).norm() > 1e-8)
            throw NonUnitSpeed("closed curve endpoints do not match");
    }

    // initial normal pair
    const CurveSample s0 = curve.eval(curve.x_min);
    Vec3 e1;
    if (initial_normal) {
        e1 = *initial_normal;
        if (e1.norm() < 1e-14 || e1.cross(s0.d1).norm() < 1e-10 * e1.norm())
            throw DegenerateNormal("initial normal is zero or parallel to the tangent");
    } else {
        int k = 0;
        for (int j = 1; j < 3; ++j)
            if (std::abs(s0.d1[j]) < std::abs(s0.d1[k])) k = j;
        e1 = Vec3::Unit(k);
    }
    Vec3 e2 = s0.d1.cross(e1);
    orthonormalize(s0.d1, e1, e2);
    e2 = s0.d1.cross(e1);  // right-handed (tau, e1, e2)

    out.fine_x.resize(n_fine + 1);
    out.fine_pos.resize(n_fine + 1);
    out.fine_tau.resize(n_fine + 1);
    out.fine_e1.resize(n_fine + 1);
    out.fine_e2.resize(n_fine + 1);
    out.fine_k1.resize(n_fine + 1);
    out.fine_k2.resize(n_fine + 1);

    FrameState f{e1, e2};
    for (int i = 0; i <= n_fine; ++i) {
        const double x = curve.x_min + i * h;
        const CurveSample s = curve.eval(x);
        orthonormalize(s.d1, f.e1, f.e2);
        out.fine_x[i] = x;
        out.fine_pos[i] = s.c;
        out.fine_tau[i] = s.d1;
        out.fine_e1[i] = f.e1;
        out.fine_e2[i] = f.e2;
        out.fine_k1[i] = s.d2.dot(f.e1);
        out.fine_k2[i] = s.d2.dot(f.e2);
        if (i == n_fine) break;

        // RK4 step for (e1, e2)
        const CurveSample sm = curve.eval(x + 0.5 * h);
        const CurveSample sp = curve.eval(x + h);
        const FrameState k1 = frame_rhs(s, f);
        const FrameState k2 = frame_rhs(sm, {f.e1 + 0.5 * h * k1.e1, f.e2 + 0.5 * h * k1.e2});
        const FrameState k3 = frame_rhs(sm, {f.e1 + 0.5 * h * k2.e1, f.e2 + 0.5 * h * k2.e2});
        const FrameState k4 = frame_rhs(sp, {f.e1 + h * k3.e1, f.e2 + h * k3.e2});
        f.e1 += (h / 6.0) * (k1.e1 + 2.0 * k2.e1 + 2.0 * k3.e1 + k4.e1);
        f.e2 += (h / 6.0) * (k1.e2 + 2.0 * k2.e2 + 2.0 * k3.e2 + k4.e2);
    }

    out.grid.resize(n_points);
    out.pos.resize(n_points);
    out.tau.resize(n_points);
    out.e1.resize(n_points);
    out.e2.resize(n_points);
    out.kappa1.resize(n_points);
    out.kappa2.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const int j = i * refine;
        out.grid[i] = out.fine_x[j];
        out.pos[i] = out.fine_pos[j];
        out.tau[i] = out.fine_tau[j];
        out.e1[i] = out.fine_e1[j];
        out.e2[i] = out.fine_e2[j];
        out.kappa1[i] = out.fine_k1[j];
        out.kappa2[i] = out.fine_k2[j];
    }

    if (curve.closed) {
        // rotation carrying the final normal pair onto the initial one
        const Vec3& a1 = out.e1.front();
        const Vec3& a2 = out.e2.front();
        const Vec3& b1 = out.e1.back();
        out.holonomy_angle = std::atan2(b1.dot(a2), b1.dot(a1));
    }
    return out;
}

std::vector<double> curvature_norm_sq(const FrameField& frame) {
    std::vector<double> out(frame.size());
    for (size_t i = 0; i < frame.size(); ++i)
        out[i] = frame.kappa1[i] * frame.kappa1[i] + frame.kappa2[i] * frame.kappa2[i];
    return out;
}

FrameField::LocalD FrameField::at_d(double x) const {
    const size_t n = fine_x.size();
    const double h = fine_x[1] - fine_x[0];
    double s = (x - fine_x[0]) / h;
    long i0 = static_cast<long>(std::floor(s)) - 1;
    i0 = std::max<long>(0, std::min<long>(i0, static_cast<long>(n) - 4));
    const double t = s - static_cast<double>(i0);
    double w[4], dw[4];
    w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    w[1] = t * (t - 2) * (t - 3) / 2.0;
    w[2] = -t * (t - 1) * (t - 3) / 2.0;
    w[3] = t * (t - 1) * (t - 2) / 6.0;
    dw[0] = -((t - 2) * (t - 3) + (t - 1) * (t - 3) + (t - 1) * (t - 2)) / 6.0;
    dw[1] = ((t - 2) * (t - 3) + t * (t - 3) + t * (t - 2)) / 2.0;
    dw[2] = -((t - 1) * (t - 3) + t * (t - 3) + t * (t - 1)) / 2.0;
    dw[3] = ((t - 1) * (t - 2) + t * (t - 2) + t * (t - 1)) / 6.0;
    LocalD out{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
               Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    for (int k = 0; k < 4; ++k) {
        const size_t j = static_cast<size_t>(i0 + k);
        out.c += w[k] * fine_pos[j];
        out.dc += (dw[k] / h) * fine_pos[j];
        out.e1 += w[k] * fine_e1[j];
        out.de1 += (dw[k] / h) * fine_e1[j];
        out.e2 += w[k] * fine_e2[j];
        out.de2 += (dw[k] / h) * fine_e2[j];
    }
    return out;
}

FrameField::Local FrameField::at(double x) const {
    const size_t n = fine_x.size();
    const double h = fine_x[1] - fine_x[0];
    double s = (x - fine_x[0]) / h;
    long i0 = static_cast<long>(std::floor(s)) - 1;
    i0 = std::max<long>(0, std::min<long>(i0, static_cast<long>(n) - 4));
    const double t = s - static_cast<double>(i0);
    double w[4];
    w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    w[1] = t * (t - 2) * (t - 3) / 2.0;
    w[2] = -t * (t - 1) * (t - 3) / 2.0;
    w[3] = t * (t - 1) * (t - 2) / 6.0;
    Local out{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), 0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const size_t j = static_cast<size_t>(i0 + k);
        out.c += w[k] * fine_pos[j];
        out.tau += w[k] * fine_tau[j];
        out.e1 += w[k] * fine_e1[j];
        out.e2 += w[k] * fine_e2[j];
        out.kappa1 += w[k] * fine_k1[j];
        out.kappa2 += w[k] * fine_k2[j];
    }
    return out;
}

} // namespace wgspec
