#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sue/errors.hpp"

namespace sue {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using IndexSet = std::vector<int>;

/// Dense symmetric matrix. Construction symmetrizes the input as (M + M^T)/2,
/// since caller algebra (e.g. products of the form A*S*A^T) accumulates
/// rounding asymmetry.
class SymMatrix {
public:
    SymMatrix() : m_(0, 0) {}
    explicit SymMatrix(MatrixXd m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const MatrixXd& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    static SymMatrix identity(int n) { return SymMatrix(MatrixXd::Identity(n, n)); }
    static SymMatrix zero(int n) { return SymMatrix(MatrixXd::Zero(n, n)); }

private:
    MatrixXd m_;
};

/// Scale/correlation split of a dispersion matrix: Omega = omega * omega_bar * omega
/// with omega the diagonal scale matrix (stored as a vector) and omega_bar the
/// unit-diagonal correlation matrix.
struct CorrSplit {
    VectorXd omega;
    SymMatrix omega_bar;
};

/// Lower-triangular Cholesky factor L with L*L^T = M.
/// Throws NotPositiveDefinite when any pivot is <= dim * 1e-14 * max_diagonal.
MatrixXd cholesky(const SymMatrix& M);

/// True iff cholesky(M) succeeds. This is the library-wide PD test.
bool is_positive_definite(const SymMatrix& M);

/// M[ii] - M[ij] M[jj]^{-1} M[ji] for disjoint index sets covering 0..dim-1.
/// The jj sub-block must be positive-definite.
SymMatrix schur_complement(const SymMatrix& M, const IndexSet& block_i, const IndexSet& block_j);

/// Splits Omega into scales and correlations. Throws DegenerateScale if any
/// diagonal entry is <= 0.
CorrSplit corr_split(const SymMatrix& Omega);

// Small helpers shared across modules. Solves go through triangular solves
// against a Cholesky factor; no explicit inverses.

MatrixXd submatrix(const MatrixXd& M, const IndexSet& rows, const IndexSet& cols);
VectorXd subvector(const VectorXd& v, const IndexSet& idx);

/// Solves (L L^T) x = b given the lower factor L.
VectorXd chol_solve(const MatrixXd& L, const VectorXd& b);
MatrixXd chol_solve(const MatrixXd& L, const MatrixXd& B);

/// log det(M) from its lower Cholesky factor.
double logdet_from_chol(const MatrixXd& L);

/// Validates that idx contains valid, distinct indices in [0, dim).
void check_index_set(const IndexSet& idx, int dim, const char* what);

}  // namespace sue
