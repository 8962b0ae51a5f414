#include "wgspec/cross_section.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace wgspec {

double bessel_j0(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double bessel_j1(double x) {
    const double q = -0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

namespace {

double find_zero(const std::function<double(double)>& f, const std::function<double(double)>& fp,
                 double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) z -= f(z) / fp(z);
    return z;
}

} // namespace

double bessel_j0_zero1() {
    static const double z = find_zero(bessel_j0, [](double x) { return -bessel_j1(x); }, 2.0, 3.0);
    return z;
}

double bessel_j1_zero1() {
    // J1' = J0 - J1/x
    static const double z = find_zero(
        bessel_j1, [](double x) { return bessel_j0(x) - bessel_j1(x) / x; }, 3.0, 4.5);
    return z;
}

MaskSpec MaskSpec::disk(double radius, const Vec2& center) {
    MaskSpec m;
    m.sdf = [radius, center](const Vec2& y) { return (y - center).norm() - radius; };
    m.lo = center - Vec2(radius, radius);
    m.hi = center + Vec2(radius, radius);
    m.bound_radius = center.norm() + radius;
    m.name = "disk";
    return m;
}

MaskSpec MaskSpec::square(double side, const Vec2& center) {
    MaskSpec m;
    const double a = 0.5 * side;
    m.sdf = [a, center](const Vec2& y) {
        const Vec2 d = (y - center).cwiseAbs() - Vec2(a, a);
        return std::max(d.x(), d.y());
    };
    m.lo = center - Vec2(a, a);
    m.hi = center + Vec2(a, a);
    m.bound_radius = center.norm() + a * std::sqrt(2.0);
    m.name = "square";
    return m;
}

MaskSpec MaskSpec::annulus(double r_inner, double r_outer) {
    MaskSpec m;
    m.sdf = [r_inner, r_outer](const Vec2& y) {
        const double r = y.norm();
        return std::max(r - r_outer, r_inner - r);
    };
    m.lo = Vec2(-r_outer, -r_outer);
    m.hi = Vec2(r_outer, r_outer);
    m.bound_radius = r_outer;
    m.name = "annulus";
    return m;
}

MaskSpec MaskSpec::from_csv(const std::string& path, double h) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mask file " + path);
    auto cells = std::make_shared<std::map<std::pair<int, int>, bool>>();
    std::string line;
    double radius = 0.0;
    Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int p, q;
        char comma;
        if (ls >> p >> comma >> q) {
            (*cells)[{p, q}] = true;
            const Vec2 y(p * h, q * h);
            radius = std::max(radius, y.norm());
            lo = lo.cwiseMin(y);
            hi = hi.cwiseMax(y);
        }
    }
    if (cells->empty()) throw ConfigError("mask file " + path + " lists no nodes");
    MaskSpec m;
    m.sdf = [cells, h](const Vec2& y) {
        const int p = static_cast<int>(std::lround(y.x() / h));
        const int q = static_cast<int>(std::lround(y.y() / h));
        return cells->count({p, q}) ? -1.0 : 1.0;
    };
    m.lo = lo - Vec2(h, h);
    m.hi = hi + Vec2(h, h);
    m.bound_radius = radius + h;
    m.staircase_only = true;
    m.name = "file:" + path;
    return m;
}

MaskSpec MaskSpec::named(const std::string& name, double h) {
    if (name == "disk") return disk();
    if (name == "square") return square();
    if (name == "annulus") return annulus();
    return from_csv(name, h);
}

double FiberSpec::bound_radius() const {
    switch (kind) {
        case FiberKind::MassiveDisk: return radius;
        case FiberKind::MassiveGrid: return mask.bound_radius;
        case FiberKind::HollowCircle: return 1.0;
    }
    return 1.0;
}

VerticalSpectrum solve_vertical_disk(double rho) {
    if (rho <= 0.0) throw Error("disk radius must be positive");
    const double j01 = bessel_j0_zero1();
    const double j11 = bessel_j1_zero1();
    VerticalSpectrum vs;
    vs.kind = FiberKind::MassiveDisk;
    vs.disk_radius = rho;
    vs.eigenvalues = {j01 * j01 / (rho * rho), j11 * j11 / (rho * rho)};
    vs.gap = vs.eigenvalues[1] - vs.eigenvalues[0];
    vs.mean_y = Vec2::Zero();
    vs.mean_ysq = (j01 * j01 - 2.0) / (3.0 * j01 * j01) * rho * rho;
    vs.second_moments = 0.5 * vs.mean_ysq * Eigen::Matrix2d::Identity();
    vs.Lnorm_sq = 0.0;
    vs.mean_L = 0.0;
    vs.cross_Ly = Vec2::Zero();
    vs.cpar = 0.25 * vs.mean_ysq;  // rotationally invariant: resolvent term vanishes
    vs.cperp = 0.0;
    return vs;
}

VerticalSpectrum solve_vertical_circle() {
    VerticalSpectrum vs;
    vs.kind = FiberKind::HollowCircle;
    vs.eigenvalues = {0.0, 1.0, 1.0, 4.0, 4.0};
    vs.gap = 1.0;
    vs.mean_y = Vec2::Zero();   // fiber average of the embedding point vanishes
    vs.mean_ysq = 1.0;          // <|varpi|^2> at unit scale
    vs.second_moments = 0.5 * Eigen::Matrix2d::Identity();
    vs.Lnorm_sq = 0.0;
    vs.mean_L = 0.0;
    vs.cross_Ly = Vec2::Zero();
    vs.cpar = 0.25;  // the sum-over-states term is exactly zero on the circle
    vs.cperp = 0.0;
    return vs;
}

namespace {

struct FiberGrid {
    double h;
    std::vector<std::array<int, 2>> nodes;
    std::map<std::pair<int, int>, int> index;
    std::vector<std::array<VerticalSpectrum::GridData::Link, 4>> links;
    SparseHermitian H;
};

// 5-point Dirichlet FD operator on the mask with boundary links shortened to
// the sdf crossing (cut fraction s, diag contribution 1/(s h^2)).
FiberGrid build_fiber_grid(const MaskSpec& mask, double h) {
    FiberGrid g;
    g.h = h;
    const int p_lo = static_cast<int>(std::floor(mask.lo.x() / h)) - 1;
    const int p_hi = static_cast<int>(std::ceil(mask.hi.x() / h)) + 1;
    const int q_lo = static_cast<int>(std::floor(mask.lo.y() / h)) - 1;
    const int q_hi = static_cast<int>(std::ceil(mask.hi.y() / h)) + 1;
    for (int p = p_lo; p <= p_hi; ++p)
        for (int q = q_lo; q <= q_hi; ++q)
            if (mask.sdf(Vec2(p * h, q * h)) < 0.0) {
                g.index[{p, q}] = static_cast<int>(g.nodes.size());
                g.nodes.push_back({p, q});
            }
    const int n = static_cast<int>(g.nodes.size());
    if (n < 100) throw MeshTooCoarse("fiber grid has fewer than 100 interior nodes");

    // connectivity
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        const auto [p, q] = g.nodes[static_cast<size_t>(queue.front())];
        queue.pop_front();
        const std::pair<int, int> nb[4] = {{p + 1, q}, {p - 1, q}, {p, q + 1}, {p, q - 1}};
        for (const auto& b : nb) {
            auto it = g.index.find(b);
            if (it != g.index.end() && !seen[it->second]) {
                seen[it->second] = 1;
                ++reached;
                queue.push_back(it->second);
            }
        }
    }
    if (reached != n) throw ConfigError("fiber mask is not connected");

    auto cut_fraction = [&](const Vec2& inside, const Vec2& outside) {
        if (mask.staircase_only) return 1.0;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mask.sdf(inside + mid * (outside - inside)) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return std::max(0.5 * (lo + hi), 1e-2);
    };

    const double ih2 = 1.0 / (h * h);
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(5) * n);
    g.links.resize(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto [p, q] = g.nodes[static_cast<size_t>(a)];
        const Vec2 ya(p * h, q * h);
        double diag = 0.0;
        const std::pair<int, int> nb[4] = {{p + 1, q}, {p - 1, q}, {p, q + 1}, {p, q - 1}};
        for (int d = 0; d < 4; ++d) {
            auto it = g.index.find(nb[d]);
            if (it != g.index.end()) {
                diag += ih2;
                trips.push_back({a, it->second, -ih2});
                g.links[static_cast<size_t>(a)][d] = {it->second, 1.0};
            } else {
                const Vec2 yb(nb[d].first * h, nb[d].second * h);
                const double s = cut_fraction(ya, yb);
                diag += ih2 / s;
                g.links[static_cast<size_t>(a)][d] = {-1, s};
            }
        }
        trips.push_back({a, a, diag});
    }
    g.H = SparseHermitian::from_triplets(n, std::move(trips));
    return g;
}

} // namespace

VerticalSpectrum solve_vertical_grid(const MaskSpec& mask, double h_f, int n_modes) {
    FiberGrid g = build_fiber_grid(mask, h_f);
    const int n = g.H.n;
    const double h = g.h;
    n_modes = std::max(2, n_modes);

    EigenResult er = lowest_eigenpairs(g.H, n_modes, 1e-10, true);

    VerticalSpectrum vs;
    vs.kind = FiberKind::MassiveGrid;
    vs.eigenvalues = er.eigenvalues;
    vs.gap = er.eigenvalues[1] - er.eigenvalues[0];

    // L2-normalized, sign-fixed ground state
    std::vector<double> phi(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        phi[i] = er.eigenvectors[0][i].real();
        sum += phi[i];
    }
    const double sgn = (sum < 0.0) ? -1.0 : 1.0;
    double nrm = 0.0;
    for (double v : phi) nrm += v * v;
    nrm = std::sqrt(nrm) * h;
    for (double& v : phi) v *= sgn / nrm;

    // moments: bilinear cell-midpoint quadrature of |Phi0|^2
    auto node_val = [&](int p, int q) -> double {
        auto it = g.index.find({p, q});
        return it == g.index.end() ? 0.0 : phi[it->second];
    };
    int p_lo = 1 << 30, p_hi = -(1 << 30), q_lo = 1 << 30, q_hi = -(1 << 30);
    for (const auto& nq : g.nodes) {
        p_lo = std::min(p_lo, nq[0]);
        p_hi = std::max(p_hi, nq[0]);
        q_lo = std::min(q_lo, nq[1]);
        q_hi = std::max(q_hi, nq[1]);
    }
    double mass = 0.0, mysq = 0.0;
    Vec2 my = Vec2::Zero();
    Eigen::Matrix2d smom = Eigen::Matrix2d::Zero();
    for (int p = p_lo - 1; p <= p_hi; ++p)
        for (int q = q_lo - 1; q <= q_hi; ++q) {
            const double v = 0.25 * (node_val(p, q) + node_val(p + 1, q) + node_val(p, q + 1) +
                                     node_val(p + 1, q + 1));
            if (v == 0.0) continue;
            const Vec2 yc((p + 0.5) * h, (q + 0.5) * h);
            const double w = v * v * h * h;
            mass += w;
            my += w * yc;
            mysq += w * yc.squaredNorm();
            smom += w * yc * yc.transpose();
        }
    vs.mean_y = my / mass;
    vs.mean_ysq = mysq / mass;
    vs.second_moments = smom / mass;

    // discrete angular momentum data (node sums, zero extension)
    std::vector<double> Lphi(n, 0.0);
    for (int a = 0; a < n; ++a) {
        const auto [p, q] = g.nodes[static_cast<size_t>(a)];
        const double d1 = (node_val(p + 1, q) - node_val(p - 1, q)) / (2.0 * h);
        const double d2 = (node_val(p, q + 1) - node_val(p, q - 1)) / (2.0 * h);
        Lphi[a] = (p * h) * d2 - (q * h) * d1;
    }
    double lnorm = 0.0, mL = 0.0;
    Vec2 cross = Vec2::Zero();
    for (int a = 0; a < n; ++a) {
        const auto [p, q] = g.nodes[static_cast<size_t>(a)];
        lnorm += Lphi[a] * Lphi[a];
        mL += phi[a] * Lphi[a];
        cross += Vec2(p * h * phi[a] * Lphi[a], q * h * phi[a] * Lphi[a]);
    }
    vs.Lnorm_sq = lnorm * h * h;
    vs.mean_L = mL * h * h;
    vs.cross_Ly = cross * h * h;

    // lambda02 coefficient by the resolvent solve (real arithmetic:
    // H1 Phi0 = -i Bpar L_y Phi0, so the correction is Bpar^2 <LPhi0, u>)
    if (vs.gap < 1e-8) throw GapTooSmall("fiber ground state is not simple");
    double corr = 0.0;
    if (vs.Lnorm_sq > 1e-24) {
        std::vector<double> rhs = Lphi;
        std::vector<double> u =
            solve_shifted(g.H, er.eigenvalues[0], rhs, {phi}, 1e-10);
        double dot = 0.0;
        for (int a = 0; a < n; ++a) dot += Lphi[a] * u[a];
        corr = dot * h * h;
    }
    vs.cpar = 0.25 * vs.mean_ysq - corr;
    vs.cperp = 0.0;

    auto gd = std::make_shared<VerticalSpectrum::GridData>();
    gd->H = std::move(g.H);
    gd->h = h;
    gd->nodes = std::move(g.nodes);
    gd->links = std::move(g.links);
    gd->phi0 = std::move(phi);
    gd->Lphi0 = std::move(Lphi);
    gd->lambda0 = er.eigenvalues[0];
    vs.grid = std::move(gd);
    return vs;
}

double lambda02(const VerticalSpectrum& vs, double Bpar, double ell) {
    if (vs.gap < 1e-8) throw GapTooSmall("vertical gap below 1e-8; resolvent ill-posed");
    return (vs.cpar * Bpar * Bpar + vs.cperp * 0.0) * ell * ell;
}

double lambda02_bruteforce_fit(const MaskSpec& mask, double h_f, double Bpar,
                               const std::vector<double>& eps) {
    FiberGrid g = build_fiber_grid(mask, h_f);
    const int n = g.H.n;
    const double h = g.h;

    // reuse the nonmagnetic stencil; multiply off-diagonal entries by Peierls
    // phases exp(-i theta), theta = eps * int A_V . dl (midpoint rule is exact
    // for the linear potential A_V = (Bpar/2)(-y2, y1))
    auto magnetic_ground = [&](double e) {
        std::vector<Triplet> trips;
        trips.reserve(g.H.nnz());
        for (int a = 0; a < n; ++a) {
            const auto [p, q] = g.nodes[static_cast<size_t>(a)];
            for (int ptr = g.H.row_ptr[a]; ptr < g.H.row_ptr[a + 1]; ++ptr) {
                const int b = g.H.col[ptr];
                if (b == a) {
                    trips.push_back({a, a, g.H.cval[ptr]});
                    continue;
                }
                const auto [pb, qb] = g.nodes[static_cast<size_t>(b)];
                const Vec2 ya(p * h, q * h), yb(pb * h, qb * h);
                const Vec2 mid = 0.5 * (ya + yb);
                const Vec2 av = 0.5 * Bpar * Vec2(-mid.y(), mid.x());
                const double theta = e * av.dot(yb - ya);
                trips.push_back({a, b, g.H.cval[ptr] * std::exp(cplx(0.0, theta))});
            }
        }
        SparseHermitian Hm = SparseHermitian::from_triplets(n, std::move(trips));
        return lowest_eigenpairs(Hm, 1, 1e-10).eigenvalues[0];
    };

    // least squares of lambda(eps) on {1, eps^2}
    double s0 = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0;
    for (double e : eps) {
        const double lam = magnetic_ground(e), x = e * e;
        s0 += 1.0;
        s1 += x;
        s2 += x * x;
        b0 += lam;
        b1 += lam * x;
    }
    const double det = s0 * s2 - s1 * s1;
    const double coeff = (s0 * b1 - s1 * b0) / det;
    return coeff;  // the eps^2 coefficient, i.e. lambda02 at this Bpar
}

} // namespace wgspec
