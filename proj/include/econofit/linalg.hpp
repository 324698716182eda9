#pragma once

// Minimal dense routines for the small systems the fitters need
// (at most 7 columns, a dozen rows). Row-major storage.

#include <cmath>
#include <cstddef>
#include <vector>

#include "econofit/errors.hpp"

namespace econofit::linalg {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// In-place Householder QR of A (rows >= cols). On return A holds R in its
// upper triangle and the reflectors below; b is overwritten with Q^T b.
// Returns false if A is rank deficient.
inline bool householder_qr(Matrix& A, std::vector<double>& b) {
    const std::size_t m = A.rows, n = A.cols;
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += A(i, k) * A(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) return false;
        double alpha = A(k, k) > 0.0 ? -norm : norm;
        std::vector<double> v(m - k);
        v[0] = A(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = A(i, k);
        double vtv = 0.0;
        for (double vi : v) vtv += vi * vi;
        if (vtv == 0.0) return false;
        A(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) A(i, k) = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * A(i, j);
            double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) A(i, j) -= f * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
        double f = 2.0 * dot / vtv;
        for (std::size_t i = k; i < m; ++i) b[i] -= f * v[i - k];
    }
    // Rank check on the diagonal of R.
    double rmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) rmax = std::max(rmax, std::abs(A(k, k)));
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(A(k, k)) < 1e-13 * rmax) return false;
    return true;
}

// Least-squares solve of A x = b via QR. Also returns diag((A^T A)^-1),
// needed for coefficient standard errors. Throws on rank deficiency.
inline std::vector<double> qr_least_squares(Matrix A, std::vector<double> b,
                                            std::vector<double>* cov_diag = nullptr) {
    const std::size_t n = A.cols;
    // Equilibrate columns so the rank check is meaningful for design
    // matrices with wildly different column scales (raw monomials).
    std::vector<double> scale(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) norm += A(i, j) * A(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0)
            throw FitError("singular design matrix in least-squares solve");
        scale[j] = 1.0 / norm;
        for (std::size_t i = 0; i < A.rows; ++i) A(i, j) *= scale[j];
    }
    if (!householder_qr(A, b))
        throw FitError("singular design matrix in least-squares solve");
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double acc = b[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= A(k, j) * x[j];
        x[k] = acc / A(k, k);
    }
    if (cov_diag) {
        // (A^T A)^-1 = R^-1 R^-T; diag entry i is the squared norm of row i
        // of R^-1, obtained column by column from R z = e_j.
        Matrix Rinv(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> z(n, 0.0);
            z[j] = 1.0;
            for (std::size_t k = n; k-- > 0;) {
                double acc = z[k];
                for (std::size_t l = k + 1; l < n; ++l) acc -= A(k, l) * Rinv(l, j);
                Rinv(k, j) = k <= j ? acc / A(k, k) : 0.0;
            }
        }
        cov_diag->assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                (*cov_diag)[i] += Rinv(i, j) * Rinv(i, j);
        // Undo the column equilibration: x -> D x, cov -> D cov D.
        for (std::size_t i = 0; i < n; ++i) (*cov_diag)[i] *= scale[i] * scale[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] *= scale[i];
    return x;
}

// Solve the symmetric positive (semi)definite system M x = rhs by Gaussian
// elimination with partial pivoting. Returns false if singular.
inline bool solve_square(Matrix M, std::vector<double> rhs, std::vector<double>& x) {
    const std::size_t n = M.rows;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(M(i, k)) > std::abs(M(piv, k))) piv = i;
        if (M(piv, k) == 0.0) return false;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(piv, j));
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = M(i, k) / M(k, k);
            for (std::size_t j = k; j < n; ++j) M(i, j) -= f * M(k, j);
            rhs[i] -= f * rhs[k];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double acc = rhs[k];
        for (std::size_t j = k + 1; j < n; ++j) acc -= M(k, j) * x[j];
        x[k] = acc / M(k, k);
    }
    return true;
}

// diag(M^-1) for a small symmetric matrix, by solving against unit vectors.
inline bool inverse_diag(const Matrix& M, std::vector<double>& diag) {
    const std::size_t n = M.rows;
    diag.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0), col;
        e[j] = 1.0;
        if (!solve_square(M, e, col)) return false;
        diag[j] = col[j];
    }
    return true;
}

}  // namespace econofit::linalg
