#include "wgspec/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace wgspec {

namespace {

constexpr double kGauss4X[4] = {0.06943184420297371, 0.33000947820757187,
                                0.66999052179242813, 0.93056815579702629};
constexpr double kGauss4W[4] = {0.17392742256872693, 0.32607257743127307,
                                0.32607257743127307, 0.17392742256872693};

// line integral of A along a parametrized path: composite 4-point Gauss.
// Panels aligned with the frame's fine interpolation grid make the integrand
// polynomial per panel, so gradients of low-degree gauge functions integrate
// exactly and the Peierls phases stay gauge covariant to rounding.
template <class Path, class Velocity>
double line_integral(const VectorPotential& A, double t0, double t1, Path&& P, Velocity&& v,
                     int nsub = 1) {
    const double len = (t1 - t0) / nsub;
    double acc = 0.0;
    for (int k = 0; k < nsub; ++k) {
        const double a = t0 + k * len;
        for (int g = 0; g < 4; ++g) {
            const double t = a + kGauss4X[g] * len;
            acc += kGauss4W[g] * len * A(P(t)).dot(v(t));
        }
    }
    return acc;
}

Eigen::Matrix2d rot(double phi) {
    Eigen::Matrix2d r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

} // namespace

std::vector<double> FullOperatorAssembly::eigenvalues_raw(
    int k, double solver_tol, const std::vector<cplx>* start_hint) const {
    return lowest_eigenpairs(H, k, solver_tol, false, 2048, start_hint).eigenvalues;
}

std::vector<cplx> FullOperatorAssembly::lift_base_state(
    const std::vector<double>& base_node_values, const std::vector<double>* fiber_weights) const {
    std::vector<cplx> v(static_cast<size_t>(H.n));
    for (size_t u = 0; u < v.size(); ++u) {
        const size_t i = i_start + u / n_fiber;
        const size_t a = u % n_fiber;
        const double fw = fiber_weights ? (*fiber_weights)[a] : 1.0;
        v[u] = base_node_values.at(i) * fw * std::sqrt(mass[u]);
    }
    return v;
}

void check_admissibility(const FrameField& frame, const FiberSpec& fiber, double eps) {
    double lmax = 0.0, kmax = 0.0;
    for (size_t i = 0; i < frame.size(); ++i) {
        lmax = std::max(lmax, fiber.ell(frame.grid[i]));
        kmax = std::max(kmax, frame.kappa(i).norm());
    }
    const double margin = eps * lmax * fiber.bound_radius() * kmax;
    if (margin >= 1.0)
        throw AdmissibilityViolated("eps * l+ * R * max|kappa| = " + std::to_string(margin) +
                                    " >= 1: tube metric degenerates");
}

FullOperatorAssembly assemble_hollow_surface(const FrameField& frame, const FiberSpec& fiber,
                                             const VectorPotential& A, int sigma, double eps,
                                             int n_y, size_t unknown_cap) {
    if (fiber.kind != FiberKind::HollowCircle)
        throw UnsupportedFiber("assemble_hollow_surface needs the hollow circle fiber");
    if (n_y < 32) throw ConfigError("hollow surface grid needs N_y >= 32");
    check_admissibility(frame, fiber, eps);

    const size_t N = frame.size() - 1;  // x links on the chain
    const double dx = frame.dx();
    const double dy = 2.0 * M_PI / n_y;
    const size_t i_start = frame.closed ? 0 : 1;
    const size_t i_end = frame.closed ? N - 1 : N - 1;  // inclusive
    const size_t nx = i_end - i_start + 1;
    const size_t n_unknown = nx * static_cast<size_t>(n_y);
    if (n_unknown > unknown_cap)
        throw MemoryBudget("hollow surface grid exceeds the unknown cap");

    // closed-curve seam: the angular grid must realize the holonomy rotation
    long shift = 0;
    if (frame.closed) {
        shift = std::lround(frame.holonomy_angle / dy);
        if (std::abs(frame.holonomy_angle - shift * dy) > 1e-6)
            throw SeamIncompatible("holonomy angle is not a multiple of the angular step");
    }

    auto id = [&](size_t i, long j) {
        const long jw = ((j % n_y) + n_y) % n_y;
        return static_cast<int>((i - i_start) * n_y + static_cast<size_t>(jw));
    };

    const double sig_fac = (sigma == 0) ? 1.0 : 1.0 / eps;

    std::vector<Triplet> trips;
    trips.reserve(n_unknown * 6);
    std::vector<double> mass(n_unknown, 0.0);

    auto S_of = [&](double x, double y, const FrameField::Local& loc) {
        const auto l = fiber.ell2(x);
        const double vk = loc.kappa1 * std::cos(y) + loc.kappa2 * std::sin(y);
        const double a = 1.0 - eps * l[0] * vk;
        if (a <= 0.0) throw AdmissibilityViolated("hollow metric degenerates inside the grid");
        return a * a + eps * eps * l[1] * l[1];
    };

    // node masses
    for (size_t i = i_start; i <= i_end; ++i) {
        const double x = frame.grid[i];
        const auto loc = frame.at(x);
        const double l = fiber.ell(x);
        for (int j = 0; j < n_y; ++j) {
            const double S = S_of(x, j * dy, loc);
            mass[static_cast<size_t>(id(i, j))] = std::sqrt(S) * l * dx * dy;
        }
    }
    auto fold = [&](int u, int v) { return 1.0 / std::sqrt(mass[static_cast<size_t>(u)] *
                                                           mass[static_cast<size_t>(v)]); };

    std::vector<double> diag(n_unknown, 0.0);

    // x links
    const size_t link_hi = N - 1;
    for (size_t li = 0; li <= link_hi; ++li) {
        const double x0 = frame.grid[li], x1 = frame.grid[li + 1];
        const double xm = 0.5 * (x0 + x1);
        const auto locm = frame.at(xm);
        const auto lm = fiber.ell2(xm);
        const bool tail_in = li >= i_start && li <= i_end;
        const bool head_is_seam = frame.closed && li + 1 == N;
        const size_t head_i = head_is_seam ? i_start : li + 1;
        const bool head_in = head_is_seam || (head_i >= i_start && head_i <= i_end);
        if (!tail_in && !head_in) continue;
        for (int j = 0; j < n_y; ++j) {
            const double y = j * dy;
            const double S = S_of(xm, y, locm);
            const double cx = eps * eps * lm[0] / std::sqrt(S) * (dy / dx);
            // path through the surface at fixed angular coordinate
            auto P = [&](double t) {
                const auto d = frame.at_d(t);
                const double l = fiber.ell(t);
                return Vec3(d.c + eps * l * (std::cos(y) * d.e1 + std::sin(y) * d.e2));
            };
            auto V = [&](double t) {
                const auto d = frame.at_d(t);
                const auto l = fiber.ell2(t);
                return Vec3(d.dc + eps * (l[1] * (std::cos(y) * d.e1 + std::sin(y) * d.e2) +
                                          l[0] * (std::cos(y) * d.de1 + std::sin(y) * d.de2)));
            };
            const double theta = sig_fac * line_integral(A, x0, x1, P, V, frame.refine);

            const int head = head_in ? id(head_i, head_is_seam ? j + shift : j) : -1;
            const int tail = tail_in ? id(li, j) : -1;
            if (tail >= 0) diag[static_cast<size_t>(tail)] += cx / mass[static_cast<size_t>(tail)];
            if (head >= 0) diag[static_cast<size_t>(head)] += cx / mass[static_cast<size_t>(head)];
            if (tail >= 0 && head >= 0) {
                const cplx off = -cx * std::exp(cplx(0.0, theta)) * fold(tail, head);
                trips.push_back({tail, head, off});
                trips.push_back({head, tail, std::conj(off)});
            }
        }
    }

    // y links (periodic ring at each unknown slab)
    for (size_t i = i_start; i <= i_end; ++i) {
        const double x = frame.grid[i];
        const auto loc = frame.at(x);
        const double l = fiber.ell(x);
        for (int j = 0; j < n_y; ++j) {
            const double ym = (j + 0.5) * dy;
            const double S = S_of(x, ym, loc);
            const double cy = std::sqrt(S) / l * (dx / dy);
            auto P = [&](double s) {
                return Vec3(loc.c + eps * l * (std::cos(s) * loc.e1 + std::sin(s) * loc.e2));
            };
            auto V = [&](double s) {
                return Vec3(eps * l * (-std::sin(s) * loc.e1 + std::cos(s) * loc.e2));
            };
            const double theta = sig_fac * line_integral(A, j * dy, (j + 1) * dy, P, V, 4);
            const int tail = id(i, j), head = id(i, j + 1);
            diag[static_cast<size_t>(tail)] += cy / mass[static_cast<size_t>(tail)];
            diag[static_cast<size_t>(head)] += cy / mass[static_cast<size_t>(head)];
            const cplx off = -cy * std::exp(cplx(0.0, theta)) * fold(tail, head);
            trips.push_back({tail, head, off});
            trips.push_back({head, tail, std::conj(off)});
        }
    }

    for (size_t u = 0; u < n_unknown; ++u)
        trips.push_back({static_cast<int>(u), static_cast<int>(u), diag[u]});

    FullOperatorAssembly out;
    out.H = SparseHermitian::from_triplets(static_cast<int>(n_unknown), std::move(trips));
    out.sigma = sigma;
    out.eps = eps;
    out.lambda_ref = 0.0;  // hollow convention: the constant mode sits at zero
    out.n_x = nx;
    out.n_fiber = static_cast<size_t>(n_y);
    out.i_start = i_start;
    out.mass = std::move(mass);
    return out;
}

FullOperatorAssembly assemble_massive_tube(const FrameField& frame, const FiberSpec& fiber,
                                           const VerticalSpectrum& vs, const VectorPotential& A,
                                           int sigma, double eps, size_t unknown_cap) {
    if (fiber.kind == FiberKind::HollowCircle)
        throw UnsupportedFiber("assemble_massive_tube needs a massive fiber");
    if (!vs.grid)
        throw MissingMoments("assemble_massive_tube needs grid fiber data (solve_vertical_grid)");
    check_admissibility(frame, fiber, eps);
    const auto& gd = *vs.grid;
    const double h = gd.h;
    const size_t nf = gd.nodes.size();

    const size_t N = frame.size() - 1;
    const double dx = frame.dx();
    const size_t i_start = frame.closed ? 0 : 1;
    const size_t i_end = N - 1;
    const size_t nx = i_end - i_start + 1;
    const size_t n_unknown = nx * nf;
    if (n_unknown > unknown_cap) throw MemoryBudget("massive tube grid exceeds the unknown cap");

    // closed-curve seam: total rotation must be a quarter-turn that maps the
    // fiber lattice (and mask) onto itself
    std::vector<int> seam_map;
    if (frame.closed) {
        const double rho = frame.holonomy_angle + fiber.phi(frame.grid[N]) -
                           fiber.phi(frame.grid[0]);
        const long quarters = std::lround(rho / (0.5 * M_PI));
        if (std::abs(rho - quarters * 0.5 * M_PI) > 1e-6)
            throw SeamIncompatible("seam rotation is not a quarter-turn: " + std::to_string(rho));
        std::map<std::pair<int, int>, int> index;
        for (size_t a = 0; a < nf; ++a) index[{gd.nodes[a][0], gd.nodes[a][1]}] = (int)a;
        seam_map.resize(nf);
        const long k = ((quarters % 4) + 4) % 4;
        for (size_t a = 0; a < nf; ++a) {
            int p = gd.nodes[a][0], q = gd.nodes[a][1];
            for (long r = 0; r < k; ++r) {
                const int t = p;
                p = -q;
                q = t;
            }
            auto it = index.find({p, q});
            if (it == index.end())
                throw SeamIncompatible("fiber mask is not invariant under the seam rotation");
            seam_map[a] = it->second;
        }
    }

    auto id = [&](size_t i, size_t a) { return static_cast<int>((i - i_start) * nf + a); };
    const double sig_fac = (sigma == 0) ? 1.0 : 1.0 / eps;

    // twist/scale lift field w and metric factor a at arbitrary (x, y)
    auto a_of = [&](double x, const FrameField::Local& loc, const Vec2& y) {
        const Vec2 kap(loc.kappa1, loc.kappa2);
        const double av = 1.0 - eps * (fiber.ell(x) * (rot(fiber.phi(x)) * y)).dot(kap);
        if (av <= 0.0) throw AdmissibilityViolated("massive metric degenerates inside the grid");
        return av;
    };
    auto w_of = [&](double x, const Vec2& y) {
        const auto l = fiber.ell2(x);
        const double p1 = fiber.phi2(x)[1];
        return Vec2((l[1] / l[0]) * y.x() - p1 * y.y(), (l[1] / l[0]) * y.y() + p1 * y.x());
    };
    bool any_w = false;
    for (size_t i = i_start; i <= i_end && !any_w; ++i) {
        const double x = frame.grid[i];
        if (std::abs(fiber.ell2(x)[1]) > 1e-14 || std::abs(fiber.phi2(x)[1]) > 1e-14) any_w = true;
    }

    // embedded point and its x-velocity for the link integrals
    auto embed = [&](double t, const Vec2& y) {
        const auto d = frame.at_d(t);
        const Vec2 n = fiber.ell(t) * (rot(fiber.phi(t)) * y);
        return Vec3(d.c + eps * (n.x() * d.e1 + n.y() * d.e2));
    };
    auto embed_v = [&](double t, const Vec2& y) {
        const auto d = frame.at_d(t);
        const auto l = fiber.ell2(t);
        const auto ph = fiber.phi2(t);
        const Vec2 ry = rot(ph[0]) * y;
        const Vec2 n = l[0] * ry;
        const Vec2 ndot = l[1] * ry + l[0] * ph[1] * Vec2(-ry.y(), ry.x());
        return Vec3(d.dc + eps * (ndot.x() * d.e1 + ndot.y() * d.e2) +
                    eps * (n.x() * d.de1 + n.y() * d.de2));
    };

    std::vector<Triplet> trips;
    trips.reserve(n_unknown * 9);
    std::vector<double> mass(n_unknown, 0.0), diag(n_unknown, 0.0);

    // node masses: rho = a l^2
    for (size_t i = i_start; i <= i_end; ++i) {
        const double x = frame.grid[i];
        const auto loc = frame.at(x);
        const double l = fiber.ell(x);
        for (size_t a = 0; a < nf; ++a) {
            const Vec2 y(gd.nodes[a][0] * h, gd.nodes[a][1] * h);
            mass[static_cast<size_t>(id(i, a))] = a_of(x, loc, y) * l * l * dx * h * h;
        }
    }
    auto fold = [&](int u, int v) {
        return 1.0 / std::sqrt(mass[static_cast<size_t>(u)] * mass[static_cast<size_t>(v)]);
    };

    // x-link phases, stored for the cross terms: theta_x[(i - i_start_link) * nf + a]
    const size_t n_xlink = frame.closed ? N : N;  // links 0..N-1
    std::vector<double> theta_x(n_xlink * nf, 0.0);
    for (size_t li = 0; li < n_xlink; ++li) {
        const double x0 = frame.grid[li], x1 = frame.grid[li + 1];
        const double xm = 0.5 * (x0 + x1);
        const auto locm = frame.at(xm);
        const auto lm = fiber.ell2(xm);
        const bool tail_in = li >= i_start && li <= i_end;
        const bool head_is_seam = frame.closed && li + 1 == N;
        const size_t head_i = head_is_seam ? i_start : li + 1;
        const bool head_in = head_is_seam || (head_i >= i_start && head_i <= i_end);
        if (!tail_in && !head_in) continue;
        for (size_t a = 0; a < nf; ++a) {
            const Vec2 y(gd.nodes[a][0] * h, gd.nodes[a][1] * h);
            const double av = a_of(xm, locm, y);
            const double cx = eps * eps * lm[0] * lm[0] / av * (h * h / dx);
            auto P = [&](double t) { return embed(t, y); };
            auto V = [&](double t) { return embed_v(t, y); };
            const double theta = sig_fac * line_integral(A, x0, x1, P, V, frame.refine);
            theta_x[li * nf + a] = theta;

            const int tail = tail_in ? id(li, a) : -1;
            const int head = head_in ? id(head_i, head_is_seam ? seam_map[a] : a) : -1;
            if (tail >= 0) diag[static_cast<size_t>(tail)] += cx / mass[static_cast<size_t>(tail)];
            if (head >= 0) diag[static_cast<size_t>(head)] += cx / mass[static_cast<size_t>(head)];
            if (tail >= 0 && head >= 0) {
                const cplx off = -cx * std::exp(cplx(0.0, theta)) * fold(tail, head);
                trips.push_back({tail, head, off});
                trips.push_back({head, tail, std::conj(off)});
            }
        }
    }

    // fiber links and cut boundaries; phase by the exact in-plane integral
    // (A evaluated along the straight lattice segment in the normal plane)
    std::vector<double> theta_f(nx * nf * 2, 0.0);  // +y1, +y2 per node
    for (size_t i = i_start; i <= i_end; ++i) {
        const double x = frame.grid[i];
        const auto loc = frame.at(x);
        const auto l = fiber.ell2(x);
        for (size_t a = 0; a < nf; ++a) {
            const Vec2 ya(gd.nodes[a][0] * h, gd.nodes[a][1] * h);
            for (int d = 0; d < 4; ++d) {
                const auto ln = gd.links[a][d];
                const Vec2 dir = (d == 0) ? Vec2(1, 0)
                                 : (d == 1) ? Vec2(-1, 0)
                                 : (d == 2) ? Vec2(0, 1)
                                            : Vec2(0, -1);
                // midpoint vertical coefficient c_jj = a + eps^2 l^2 w_j^2 / a
                const Vec2 ym = ya + 0.5 * ln.s * h * dir;
                const double av = a_of(x, loc, ym);
                const Vec2 wm = w_of(x, ym);
                const double wj = (d < 2) ? wm.x() : wm.y();
                const double cjj = av + eps * eps * l[0] * l[0] * wj * wj / av;
                const int u = id(i, a);
                if (ln.nbr < 0) {
                    diag[static_cast<size_t>(u)] +=
                        cjj * dx / (ln.s * h * h) * h * h / mass[static_cast<size_t>(u)];
                    continue;
                }
                if (d == 1 || d == 3) continue;  // each interior link handled once, from its tail
                const int v = id(i, static_cast<size_t>(ln.nbr));
                auto P = [&](double s) {
                    const Vec2 yy = ya + s * dir;
                    const Vec2 n = l[0] * (rot(fiber.phi(x)) * yy);
                    return Vec3(loc.c + eps * (n.x() * loc.e1 + n.y() * loc.e2));
                };
                auto V = [&](double) {
                    const Vec2 n = l[0] * (rot(fiber.phi(x)) * dir);
                    return Vec3(eps * (n.x() * loc.e1 + n.y() * loc.e2));
                };
                const double theta = sig_fac * line_integral(A, 0.0, h, P, V);
                theta_f[((i - i_start) * nf + a) * 2 + (d == 0 ? 0 : 1)] = theta;
                const double c = cjj * dx;
                diag[static_cast<size_t>(u)] += c / mass[static_cast<size_t>(u)];
                diag[static_cast<size_t>(v)] += c / mass[static_cast<size_t>(v)];
                const cplx off = -c * std::exp(cplx(0.0, theta)) * fold(u, v);
                trips.push_back({u, v, off});
                trips.push_back({v, u, std::conj(off)});
            }
        }
    }

    // cross terms (twist or scale variation): anchored centered covariant
    // differences, exactly gauge covariant at each node
    if (any_w) {
        auto x_neighbor = [&](size_t i, size_t a, int dir) -> std::pair<int, double> {
            // returns (global index, phase from node (i,a) to the neighbor)
            if (dir > 0) {
                const size_t li = i;
                const bool seam = frame.closed && li + 1 == N;
                const size_t hi = seam ? i_start : li + 1;
                if (!seam && (hi < i_start || hi > i_end)) return {-1, 0.0};
                return {id(hi, seam ? seam_map[a] : a), theta_x[li * nf + a]};
            }
            if (i == i_start) {
                if (!frame.closed) return {-1, 0.0};
                const size_t li = N - 1;
                // crossing the seam backwards: the partner of a under the map
                int pre = -1;
                for (size_t b = 0; b < nf; ++b)
                    if (static_cast<size_t>(seam_map[b]) == a) {
                        pre = static_cast<int>(b);
                        break;
                    }
                if (pre < 0) return {-1, 0.0};
                return {id(i_end, static_cast<size_t>(pre)),
                        -theta_x[li * nf + static_cast<size_t>(pre)]};
            }
            return {id(i - 1, a), -theta_x[(i - 1) * nf + a]};
        };
        auto f_neighbor = [&](size_t i, size_t a, int d) -> std::pair<int, double> {
            const auto ln = gd.links[a][d];
            if (ln.nbr < 0) return {-1, 0.0};
            if (d == 0 || d == 2)
                return {id(i, static_cast<size_t>(ln.nbr)),
                        theta_f[((i - i_start) * nf + a) * 2 + (d == 0 ? 0 : 1)]};
            // backward link: negative of the forward phase anchored at the neighbor
            const size_t b = static_cast<size_t>(ln.nbr);
            return {id(i, b), -theta_f[((i - i_start) * nf + b) * 2 + (d == 1 ? 0 : 1)]};
        };

        for (size_t i = i_start; i <= i_end; ++i) {
            const double x = frame.grid[i];
            const auto loc = frame.at(x);
            const auto l = fiber.ell2(x);
            for (size_t a = 0; a < nf; ++a) {
                const Vec2 y(gd.nodes[a][0] * h, gd.nodes[a][1] * h);
                const double av = a_of(x, loc, y);
                const Vec2 w = w_of(x, y);
                const double dV = dx * h * h;

                struct Term {
                    int idx;
                    cplx coef;
                };
                auto make_dx = [&]() {
                    std::vector<Term> t;
                    for (int dir : {+1, -1}) {
                        auto [v, th] = x_neighbor(i, a, dir);
                        if (v >= 0)
                            t.push_back({v, cplx(dir / (2.0 * dx)) * std::exp(cplx(0.0, th))});
                    }
                    return t;
                };
                auto make_df = [&](int jdir) {  // jdir 0: y1, 1: y2
                    std::vector<Term> t;
                    const int dplus = jdir == 0 ? 0 : 2, dminus = jdir == 0 ? 1 : 3;
                    auto [vp, thp] = f_neighbor(i, a, dplus);
                    if (vp >= 0) t.push_back({vp, cplx(1.0 / (2.0 * h)) * std::exp(cplx(0.0, thp))});
                    auto [vm, thm] = f_neighbor(i, a, dminus);
                    if (vm >= 0) t.push_back({vm, cplx(-1.0 / (2.0 * h)) * std::exp(cplx(0.0, thm))});
                    return t;
                };
                const auto tx = make_dx();
                const auto t1 = make_df(0);
                const auto t2 = make_df(1);

                auto add_cross = [&](const std::vector<Term>& ta, const std::vector<Term>& tb,
                                     double c) {
                    if (c == 0.0) return;
                    for (const Term& p : ta)
                        for (const Term& q : tb) {
                            const cplx val = c * dV * std::conj(p.coef) * q.coef *
                                             fold(p.idx, q.idx);
                            if (p.idx == q.idx) {
                                trips.push_back({p.idx, q.idx, 2.0 * val.real()});
                            } else {
                                trips.push_back({p.idx, q.idx, val});
                                trips.push_back({q.idx, p.idx, std::conj(val)});
                            }
                        }
                };
                // 2 Re[c_xj conj(Dx) Dj] with c_xj = -eps^2 l^2 w_j / a
                add_cross(tx, t1, -eps * eps * l[0] * l[0] * w.x() / av);
                add_cross(tx, t2, -eps * eps * l[0] * l[0] * w.y() / av);
                // 2 Re[c_12 conj(D1) D2] with c_12 = eps^2 l^2 w_1 w_2 / a
                add_cross(t1, t2, eps * eps * l[0] * l[0] * w.x() * w.y() / av);
            }
        }
    }

    for (size_t u = 0; u < n_unknown; ++u)
        trips.push_back({static_cast<int>(u), static_cast<int>(u), diag[u]});

    FullOperatorAssembly out;
    out.H = SparseHermitian::from_triplets(static_cast<int>(n_unknown), std::move(trips));
    out.sigma = sigma;
    out.eps = eps;
    double lmax = 0.0;
    for (size_t i = i_start; i <= i_end; ++i) lmax = std::max(lmax, fiber.ell(frame.grid[i]));
    out.lambda_ref = gd.lambda0 / (lmax * lmax);
    out.n_x = nx;
    out.n_fiber = nf;
    out.i_start = i_start;
    out.mass = std::move(mass);
    return out;
}

SpectralDistance spectral_distance(const std::vector<double>& spec_a,
                                   const std::vector<double>& spec_b, double window_lo,
                                   double window_hi) {
    if (window_hi <= window_lo) throw EmptyWindow("spectral window is empty");
    std::vector<double> wa, wb;
    for (double v : spec_a)
        if (v >= window_lo && v <= window_hi) wa.push_back(v);
    for (double v : spec_b)
        if (v >= window_lo && v <= window_hi) wb.push_back(v);
    if (wa.empty() && wb.empty())
        throw EmptyWindow("neither spectrum intersects the window");

    SpectralDistance out;
    if (wa.empty() || wb.empty()) {
        out.hausdorff = std::numeric_limits<double>::infinity();
        out.max_pairwise = std::numeric_limits<double>::infinity();
        return out;
    }
    auto sup_dist = [](const std::vector<double>& p, const std::vector<double>& q) {
        double worst = 0.0;
        for (double v : p) {
            double best = std::numeric_limits<double>::infinity();
            for (double w : q) best = std::min(best, std::abs(v - w));
            worst = std::max(worst, best);
        }
        return worst;
    };
    out.hausdorff = std::max(sup_dist(wa, wb), sup_dist(wb, wa));
    const size_t m = std::min(wa.size(), wb.size());
    out.matched = static_cast<int>(m);
    for (size_t j = 0; j < m; ++j)
        out.max_pairwise = std::max(out.max_pairwise, std::abs(wa[j] - wb[j]));
    return out;
}

ConvergenceFit convergence_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw Error("convergence_fit needs at least 3 (eps, distance) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pairs.size());
    for (const auto& [e, d] : pairs) {
        if (d <= 0.0) throw NonPositiveDistance("convergence_fit needs positive distances");
        if (e <= 0.0) throw Error("convergence_fit needs positive eps");
        const double x = std::log(e), y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    ConvergenceFit out;
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / n;
    double rss = 0.0;
    for (const auto& [e, d] : pairs) {
        const double r = std::log(d) - (out.intercept + out.slope * std::log(e));
        rss += r * r;
    }
    out.residual = std::sqrt(rss / n);
    return out;
}

} // namespace wgspec
