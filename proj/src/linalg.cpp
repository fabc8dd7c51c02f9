#include "sue/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sue {

SymMatrix::SymMatrix(MatrixXd m) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("SymMatrix: input is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected square");
    }
    m_ = 0.5 * (m + m.transpose());
}

MatrixXd cholesky(const SymMatrix& M) {
    const int n = M.dim();
    const MatrixXd& A = M.mat();
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, A(i, i));
    const double pivot_floor = n * 1e-14 * max_diag;

    MatrixXd L = MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = A(j, j) - L.row(j).head(j).squaredNorm();
        if (d <= pivot_floor || !std::isfinite(d)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) + " at index " +
                                      std::to_string(j) + " (floor " + std::to_string(pivot_floor) + ")");
        }
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            L(i, j) = (A(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
        }
    }
    return L;
}

bool is_positive_definite(const SymMatrix& M) {
    try {
        cholesky(M);
        return true;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

void check_index_set(const IndexSet& idx, int dim, const char* what) {
    std::vector<bool> seen(static_cast<size_t>(dim), false);
    for (int i : idx) {
        if (i < 0 || i >= dim) {
            throw InvalidIndex(std::string(what) + ": index " + std::to_string(i) +
                               " out of range [0, " + std::to_string(dim) + ")");
        }
        if (seen[static_cast<size_t>(i)]) {
            throw InvalidIndex(std::string(what) + ": duplicate index " + std::to_string(i));
        }
        seen[static_cast<size_t>(i)] = true;
    }
}

MatrixXd submatrix(const MatrixXd& M, const IndexSet& rows, const IndexSet& cols) {
    MatrixXd out(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
    return out;
}

VectorXd subvector(const VectorXd& v, const IndexSet& idx) {
    VectorXd out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
    return out;
}

VectorXd chol_solve(const MatrixXd& L, const VectorXd& b) {
    VectorXd y = L.triangularView<Eigen::Lower>().solve(b);
    return L.transpose().triangularView<Eigen::Upper>().solve(y);
}

MatrixXd chol_solve(const MatrixXd& L, const MatrixXd& B) {
    MatrixXd Y = L.triangularView<Eigen::Lower>().solve(B);
    return L.transpose().triangularView<Eigen::Upper>().solve(Y);
}

double logdet_from_chol(const MatrixXd& L) {
    double s = 0.0;
    for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

SymMatrix schur_complement(const SymMatrix& M, const IndexSet& block_i, const IndexSet& block_j) {
    const int n = M.dim();
    check_index_set(block_i, n, "schur_complement(block_i)");
    check_index_set(block_j, n, "schur_complement(block_j)");
    if (static_cast<int>(block_i.size() + block_j.size()) != n) {
        throw InvalidIndex("schur_complement: blocks must partition the index range");
    }
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int i : block_i) seen[static_cast<size_t>(i)] = true;
    for (int j : block_j) {
        if (seen[static_cast<size_t>(j)]) throw InvalidIndex("schur_complement: blocks overlap");
    }

    if (block_j.empty()) return SymMatrix(submatrix(M.mat(), block_i, block_i));

    MatrixXd Mii = submatrix(M.mat(), block_i, block_i);
    MatrixXd Mij = submatrix(M.mat(), block_i, block_j);
    MatrixXd Mjj = submatrix(M.mat(), block_j, block_j);
    MatrixXd Ljj = cholesky(SymMatrix(Mjj));
    // M_ii - M_ij M_jj^{-1} M_ji via W = L^{-1} M_ji
    MatrixXd W = Ljj.triangularView<Eigen::Lower>().solve(Mij.transpose());
    return SymMatrix(Mii - W.transpose() * W);
}

CorrSplit corr_split(const SymMatrix& Omega) {
    const int n = Omega.dim();
    VectorXd omega(n);
    for (int i = 0; i < n; ++i) {
        double d = Omega(i, i);
        if (d <= 0.0) {
            throw DegenerateScale("corr_split: diagonal entry " + std::to_string(i) +
                                  " is " + std::to_string(d));
        }
        omega(i) = std::sqrt(d);
    }
    MatrixXd bar = Omega.mat();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bar(i, j) /= omega(i) * omega(j);
    for (int i = 0; i < n; ++i) bar(i, i) = 1.0;
    return CorrSplit{omega, SymMatrix(std::move(bar))};
}

}  // namespace sue
