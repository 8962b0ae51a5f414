#pragma once

#include <complex>
#include <string>
#include <vector>

#include "wgspec/errors.hpp"

namespace wgspec {

using cplx = std::complex<double>;

struct Triplet {
    int i, j;
    cplx v;
};

// Sparse Hermitian matrix in CSR form.  Real-symmetric inputs are detected and
// stored with a real value array so the Lanczos iteration can run in real
// arithmetic.  Hermiticity is verified exactly on the stored pattern.
class SparseHermitian {
public:
    int n = 0;
    bool real_symmetric = true;
    std::vector<int> row_ptr, col;
    std::vector<cplx> cval;    // complex storage
    std::vector<double> rval;  // real storage (real_symmetric only)

    static SparseHermitian from_triplets(int n, std::vector<Triplet> triplets);

    size_t nnz() const { return col.size(); }
    void mul(const double* x, double* y) const;
    void mul(const cplx* x, cplx* y) const;
    double norm_est() const;  // Gershgorin bound: max absolute row sum
    void check_hermitian() const;

    std::vector<std::vector<cplx>> dense() const;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<std::vector<cplx>> eigenvectors;
    std::vector<double> residuals;  // ||Hv - lambda v||
    int iterations = 0;
    int restarts = 0;
};

// Lowest k eigenpairs.  Dense tridiagonalization+QL below dense_threshold,
// thick-restart Lanczos with full reorthogonalization above; deterministic
// (fixed start-vector seed, fixed reduction order).
EigenResult lowest_eigenpairs(const SparseHermitian& H, int k, double solver_tol = 1e-9,
                              bool want_vectors = false, int dense_threshold = 2048,
                              const std::vector<cplx>* start_hint = nullptr);

// Matrix market ingestion (coordinate real-symmetric / complex-hermitian),
// for debugging dumped operators.
SparseHermitian read_matrix_market(const std::string& path);

// Deflated conjugate-gradient solve of (H - shift) v = rhs with v and rhs
// projected off the given vectors.  Real-symmetric matrices only.
std::vector<double> solve_shifted(const SparseHermitian& H, double shift,
                                  const std::vector<double>& rhs,
                                  const std::vector<std::vector<double>>& deflate = {},
                                  double solver_tol = 1e-9);

} // namespace wgspec
