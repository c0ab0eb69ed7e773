#pragma once

#include "ta/la_core.hpp"

namespace ta {

// Independent reference computations for tests and acceptance runs. Deliberately
// factorization-based and slow; the solver path never touches them.

// Thin SVD A = U diag(sigma) V^T with sigma sorted descending.
// U is m x k, V is n x k, k = min(m, n). Columns of U paired with a zero
// singular value are zero vectors (the product is unaffected).
struct SvdResult {
    DenseMatrix U;
    Vector sigma;
    DenseMatrix V;
};

struct LeastSquaresResult {
    Vector x_star;  // minimum-norm least-squares solution V Sigma^+ U^T b
    double delta;   // ||A x_star - b||
};

// delta_r = min ||Ax - b|| over the ball ||x|| <= r, with its minimizer and the
// multiplier of the norm constraint (0 when the unconstrained optimum is interior).
struct EllipsoidProjection {
    double delta_r = 0;
    Vector x_opt;
    double lambda = 0;
};

// One-sided Jacobi, rotating column pairs until mutual orthogonality.
SvdResult jacobi_svd(const DenseMatrix& A);

// Same sweep without accumulating U/V; returns the descending singular values.
Vector jacobi_singular_values(const DenseMatrix& A);

// Singular values below 1e-12 * sigma_max count as zero (numerical rank).
LeastSquaresResult least_squares_direct(const DenseMatrix& A, const Vector& b);

// Smallest singular value above the truncation threshold. Throws on A = 0.
double smallest_positive_singular_value(const DenseMatrix& A);

// Unconstrained minimum-norm solution if it fits in the ball; otherwise bisect
// lambda in x(lambda) = (A^T A + lambda I)^{-1} A^T b (dense Cholesky per probe)
// until ||x(lambda)|| = r to 1e-10 relative.
EllipsoidProjection project_to_ellipsoid(const DenseMatrix& A, const Vector& b, double r);

}  // namespace ta
