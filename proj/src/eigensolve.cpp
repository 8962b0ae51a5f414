#include "wgspec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace wgspec {

SparseHermitian SparseHermitian::from_triplets(int n, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    SparseHermitian m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    std::vector<int> cols;
    std::vector<cplx> vals;
    cols.reserve(t.size());
    vals.reserve(t.size());
    size_t p = 0;
    for (int row = 0; row < n; ++row) {
        while (p < t.size() && t[p].i == row) {
            int j = t[p].j;
            cplx acc = 0.0;
            while (p < t.size() && t[p].i == row && t[p].j == j) {
                acc += t[p].v;
                ++p;
            }
            cols.push_back(j);
            vals.push_back(acc);
        }
        m.row_ptr[row + 1] = static_cast<int>(cols.size());
    }
    m.col = std::move(cols);
    m.cval = std::move(vals);
    m.real_symmetric = true;
    for (const cplx& v : m.cval)
        if (v.imag() != 0.0) {
            m.real_symmetric = false;
            break;
        }
    if (m.real_symmetric) {
        m.rval.resize(m.cval.size());
        for (size_t i = 0; i < m.cval.size(); ++i) m.rval[i] = m.cval[i].real();
    }
    m.check_hermitian();
    return m;
}

void SparseHermitian::check_hermitian() const {
    auto entry = [&](int i, int j) -> cplx {
        int lo = row_ptr[i], hi = row_ptr[i + 1];
        auto it = std::lower_bound(col.begin() + lo, col.begin() + hi, j);
        if (it == col.begin() + hi || *it != j) return {0.0, 0.0};
        return cval[static_cast<size_t>(it - col.begin())];
    };
    for (int i = 0; i < n; ++i) {
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const int j = col[p];
            const cplx v = cval[p];
            if (i == j && v.imag() != 0.0)
                throw Error("matrix is not Hermitian: complex diagonal entry");
            if (entry(j, i) != std::conj(v))
                throw Error("matrix is not Hermitian on its stored pattern");
        }
    }
}

void SparseHermitian::mul(const double* x, double* y) const {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += rval[p] * x[col[p]];
        y[i] = acc;
    }
}

void SparseHermitian::mul(const cplx* x, cplx* y) const {
    if (real_symmetric) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            cplx acc = 0.0;
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += rval[p] * x[col[p]];
            y[i] = acc;
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += cval[p] * x[col[p]];
        y[i] = acc;
    }
}

double SparseHermitian::norm_est() const {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += std::abs(cval[p]);
        best = std::max(best, s);
    }
    return best;
}

std::vector<std::vector<cplx>> SparseHermitian::dense() const {
    std::vector<std::vector<cplx>> d(n, std::vector<cplx>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d[i][col[p]] = cval[p];
    return d;
}

namespace {

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    static double real_dot(const std::vector<double>& a, const std::vector<double>& b) {
        return dot(a, b);
    }
};

template <>
struct ScalarOps<cplx> {
    static cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
        return s;
    }
    static double real_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
        return dot(a, b).real();
    }
};

template <class S>
double norm2(const std::vector<S>& a) {
    double s = 0.0;
    for (const S& v : a) s += std::norm(std::complex<double>(v));
    return std::sqrt(s);
}

template <>
double norm2<double>(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

template <class S>
void axpy(S a, const std::vector<S>& x, std::vector<S>& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <class S>
std::vector<S> start_vector(int n, int attempt) {
    std::mt19937 rng(0x5eedu + 7919u * static_cast<unsigned>(attempt));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<S> v(n);
    for (int i = 0; i < n; ++i) v[i] = S(u(rng));
    const double nv = norm2(v);
    for (auto& x : v) x = S(1.0 / nv) * x;
    return v;
}

// Thick-restart Lanczos with full reorthogonalization (Wu-Simon scheme).
// The projected matrix is real symmetric: diagonal of locked Ritz values with
// an arrow coupling row, continued by the fresh tridiagonal block.
template <class S>
std::vector<S> hint_vector(const std::vector<cplx>& hint);

template <>
std::vector<double> hint_vector<double>(const std::vector<cplx>& hint) {
    std::vector<double> v(hint.size());
    for (size_t i = 0; i < hint.size(); ++i) v[i] = hint[i].real();
    return v;
}

template <>
std::vector<cplx> hint_vector<cplx>(const std::vector<cplx>& hint) {
    return hint;
}

template <class S>
EigenResult lanczos_lowest(const SparseHermitian& H, int k, double tol, bool want_vectors,
                           const std::vector<cplx>* start_hint) {
    const int n = H.n;
    const int keep = std::min(n - 2, k + 15);
    const int m = std::min(n, std::max(3 * k + 40, 100));
    const int max_restarts = 600;
    const double scale = H.norm_est();

    std::vector<std::vector<S>> V;
    V.reserve(m + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);

    std::vector<S> w(n), tmp(n);
    int nlock = 0;  // retained Ritz directions at the head of V
    int iterations = 0, restarts = 0;
    std::vector<double> ritz, resid;
    Eigen::MatrixXd evecs;

    if (start_hint && static_cast<int>(start_hint->size()) == n) {
        std::vector<S> v0 = hint_vector<S>(*start_hint);
        const double nv = norm2(v0);
        if (nv > 1e-12) {
            for (auto& x : v0) x = S(1.0 / nv) * x;
            V.push_back(std::move(v0));
        }
    }
    if (V.empty()) V.push_back(start_vector<S>(n, 0));

    // full reorthogonalization by classical Gram-Schmidt against the whole
    // basis; a second pass runs when the norm drops (Daniel-Gragg-Kaufman
    // criterion).  Reductions keep a fixed order, so results are bitwise
    // reproducible for any thread count.
    std::vector<S> coef;
    auto reorthogonalize = [&](std::vector<S>& x, int upto) {
        if (upto <= 0) return;
        coef.resize(upto);
        constexpr long block = 8192;
        const long nblocks = (n + block - 1) / block;
        const double before = norm2(x);
        for (int pass = 0; pass < 2; ++pass) {
#pragma omp parallel for schedule(static)
            for (int j = 0; j < upto; ++j) coef[j] = ScalarOps<S>::dot(V[j], x);
#pragma omp parallel for schedule(static)
            for (long b = 0; b < nblocks; ++b) {
                const long lo = b * block, hi = std::min<long>(n, lo + block);
                for (int j = 0; j < upto; ++j) {
                    const S c = coef[j];
                    const S* vj = V[j].data();
                    S* xp = x.data();
                    for (long i = lo; i < hi; ++i) xp[i] -= c * vj[i];
                }
            }
            if (pass == 0 && norm2(x) > 0.7 * before) break;
        }
    };

    int j = 0;  // current basis size - 1 == index of last vector
    double beta_tail = 0.0;
    std::vector<double> arrow;  // couplings of the residual to locked Ritz vectors

    for (;;) {
        // Lanczos expansion from index j up to m-1
        for (; j < m; ++j) {
            H.mul(V[j].data(), w.data());
            ++iterations;
            if (j == nlock && nlock > 0) {
                for (int i = 0; i < nlock; ++i) axpy(S(-arrow[i]), V[i], w);
            } else if (j > 0) {
                axpy(S(-T(j, j - 1)), V[j - 1], w);
            }
            const double alpha = ScalarOps<S>::real_dot(V[j], w);
            T(j, j) = alpha;
            axpy(S(-alpha), V[j], w);
            reorthogonalize(w, j + 1);
            double beta = norm2(w);
            if (j + 1 >= m) {
                beta_tail = beta;
                break;
            }
            if (beta < 1e-13 * std::max(1.0, scale)) {
                // invariant subspace hit; restart with a fresh direction
                w = start_vector<S>(n, j + 1);
                reorthogonalize(w, j + 1);
                beta = norm2(w);
                if (beta < 1e-13) {
                    beta_tail = 0.0;
                    break;
                }
                for (auto& x : w) x = S(1.0 / beta) * x;
                T(j + 1, j) = T(j, j + 1) = 0.0;
                V.push_back(w);
                continue;
            }
            T(j + 1, j) = T(j, j + 1) = beta;
            for (auto& x : w) x = S(1.0 / beta) * x;
            V.push_back(w);
        }

        const int dim = std::min<int>(m, static_cast<int>(V.size()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(dim, dim));
        Eigen::VectorXd theta = es.eigenvalues();
        evecs = es.eigenvectors();

        ritz.assign(theta.data(), theta.data() + dim);
        resid.resize(dim);
        for (int i = 0; i < dim; ++i) resid[i] = std::abs(beta_tail * evecs(dim - 1, i));

        int converged = 0;
        for (int i = 0; i < std::min(k, dim); ++i)
            if (resid[i] <= tol * (std::abs(ritz[i]) + scale)) ++converged;

        ++restarts;
        if (converged >= std::min(k, dim) || restarts >= max_restarts || beta_tail == 0.0 ||
            dim >= n) {
            // form the k lowest Ritz vectors
            const int kk = std::min(k, dim);
            std::vector<std::vector<S>> Y(kk, std::vector<S>(n, S(0.0)));
            for (int i = 0; i < kk; ++i)
                for (int q = 0; q < dim; ++q) axpy(S(evecs(q, i)), V[q], Y[i]);

            EigenResult out;
            out.iterations = iterations;
            out.restarts = restarts;
            out.eigenvalues.assign(ritz.begin(), ritz.begin() + kk);
            out.residuals.resize(kk);
            for (int i = 0; i < kk; ++i) {
                H.mul(Y[i].data(), w.data());
                axpy(S(-ritz[i]), Y[i], w);
                out.residuals[i] = norm2(w);
            }
            if (want_vectors) {
                out.eigenvectors.resize(kk);
                for (int i = 0; i < kk; ++i) {
                    out.eigenvectors[i].resize(n);
                    for (int q = 0; q < n; ++q) out.eigenvectors[i][q] = cplx(Y[i][q]);
                }
            }
            bool ok = true;
            for (int i = 0; i < kk; ++i)
                if (out.residuals[i] > 10.0 * tol * (std::abs(out.eigenvalues[i]) + scale))
                    ok = false;
            if (!ok && restarts >= max_restarts)
                throw NotConverged("Lanczos did not reach the requested residuals after " +
                                   std::to_string(iterations) + " iterations");
            return out;
        }

        // thick restart: keep the lowest `keep` Ritz vectors
        const int l = std::min(keep, dim - 1);
        std::vector<std::vector<S>> Y(l, std::vector<S>(n, S(0.0)));
        for (int i = 0; i < l; ++i)
            for (int q = 0; q < dim; ++q) axpy(S(evecs(q, i)), V[q], Y[i]);
        std::vector<S> res_vec = w;  // unnormalized residual of the last step
        if (beta_tail > 0.0)
            for (auto& x : res_vec) x = S(1.0 / beta_tail) * x;

        V.clear();
        for (int i = 0; i < l; ++i) V.push_back(std::move(Y[i]));
        V.push_back(std::move(res_vec));
        T.setZero();
        arrow.resize(l);
        for (int i = 0; i < l; ++i) {
            T(i, i) = ritz[i];
            arrow[i] = beta_tail * evecs(dim - 1, i);
            T(l, i) = T(i, l) = arrow[i];
        }
        nlock = l;
        j = l;
    }
}

EigenResult dense_lowest(const SparseHermitian& H, int k, bool want_vectors) {
    const int n = H.n;
    EigenResult out;
    if (H.real_symmetric) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
                D(i, H.col[p]) = H.rval[p];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
        for (int i = 0; i < k; ++i) {
            out.eigenvalues.push_back(es.eigenvalues()[i]);
            Eigen::VectorXd v = es.eigenvectors().col(i);
            out.residuals.push_back((D * v - es.eigenvalues()[i] * v).norm());
            if (want_vectors) {
                std::vector<cplx> vc(n);
                for (int q = 0; q < n; ++q) vc[q] = v[q];
                out.eigenvectors.push_back(std::move(vc));
            }
        }
    } else {
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
                D(i, H.col[p]) = H.cval[p];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D);
        for (int i = 0; i < k; ++i) {
            out.eigenvalues.push_back(es.eigenvalues()[i]);
            Eigen::VectorXcd v = es.eigenvectors().col(i);
            out.residuals.push_back((D * v - es.eigenvalues()[i] * v).norm());
            if (want_vectors) {
                std::vector<cplx> vc(n);
                for (int q = 0; q < n; ++q) vc[q] = v[q];
                out.eigenvectors.push_back(std::move(vc));
            }
        }
    }
    out.iterations = n;
    return out;
}

} // namespace

EigenResult lowest_eigenpairs(const SparseHermitian& H, int k, double solver_tol,
                              bool want_vectors, int dense_threshold,
                              const std::vector<cplx>* start_hint) {
    if (k < 1 || k > H.n) throw Error("lowest_eigenpairs: need 1 <= k <= n");
    if (H.n <= dense_threshold) return dense_lowest(H, k, want_vectors);
    if (H.real_symmetric) return lanczos_lowest<double>(H, k, solver_tol, want_vectors, start_hint);
    return lanczos_lowest<cplx>(H, k, solver_tol, want_vectors, start_hint);
}

SparseHermitian read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix market file " + path);
    std::string header;
    std::getline(in, header);
    const bool complex_entries = header.find("complex") != std::string::npos;
    if (header.rfind("%%MatrixMarket matrix coordinate", 0) != 0 ||
        (header.find("symmetric") == std::string::npos &&
         header.find("hermitian") == std::string::npos))
        throw Error("unsupported matrix market header: " + header);
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
    }
    std::istringstream dims(line);
    int rows = 0, cols = 0;
    size_t entries = 0;
    dims >> rows >> cols >> entries;
    if (rows != cols) throw Error("matrix market file is not square");
    std::vector<Triplet> trips;
    trips.reserve(2 * entries);
    for (size_t k = 0; k < entries; ++k) {
        int i, j;
        double re, im = 0.0;
        in >> i >> j >> re;
        if (complex_entries) in >> im;
        const cplx v(re, im);
        trips.push_back({i - 1, j - 1, v});
        if (i != j) trips.push_back({j - 1, i - 1, std::conj(v)});
    }
    return SparseHermitian::from_triplets(rows, std::move(trips));
}

std::vector<double> solve_shifted(const SparseHermitian& H, double shift,
                                  const std::vector<double>& rhs,
                                  const std::vector<std::vector<double>>& deflate,
                                  double solver_tol) {
    if (!H.real_symmetric)
        throw Error("solve_shifted is implemented for real-symmetric matrices");
    const int n = H.n;
    if (static_cast<int>(rhs.size()) != n) throw Error("solve_shifted: rhs size mismatch");

    auto project = [&](std::vector<double>& v) {
        for (const auto& d : deflate) {
            double c = 0.0, dd = 0.0;
            for (int i = 0; i < n; ++i) {
                c += d[i] * v[i];
                dd += d[i] * d[i];
            }
            if (dd > 0.0)
                for (int i = 0; i < n; ++i) v[i] -= (c / dd) * d[i];
        }
    };

    std::vector<double> r = rhs;
    project(r);
    const double rhs_norm = norm2(r);
    std::vector<double> x(n, 0.0);
    if (rhs_norm == 0.0) return x;

    std::vector<double> p = r, Ap(n);
    double rr = rhs_norm * rhs_norm;
    const int maxit = std::max(10000, 4 * n);
    for (int it = 0; it < maxit; ++it) {
        H.mul(p.data(), Ap.data());
        for (int i = 0; i < n; ++i) Ap[i] -= shift * p[i];
        project(Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0)
            throw ShiftSingular("shifted operator is not positive definite on the deflated space");
        const double alpha = rr / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = [&] {
            double s = 0.0;
            for (double v : r) s += v * v;
            return s;
        }();
        if (std::sqrt(rr_new) <= solver_tol * rhs_norm) {
            project(x);
            return x;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw NotConverged("deflated CG did not converge");
}

} // namespace wgspec
