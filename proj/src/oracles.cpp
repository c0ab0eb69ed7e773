#include "ta/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ta {

namespace {

constexpr double kTruncation = 1e-12;  // sigma < 1e-12 * sigma_max counts as zero
constexpr int kMaxSweeps = 60;
constexpr double kPairTol = 1e-14;  // |w_i.w_j| <= tol*||w_i||*||w_j|| counts as orthogonal

// One-sided Jacobi on the columns of W (m x n), optionally accumulating the
// applied rotations into V (n x n). On exit the columns of W are mutually
// orthogonal; their norms are the singular values.
void jacobi_orthogonalize(DenseMatrix& W, DenseMatrix* V) {
    const int m = W.rows, n = W.cols;
    Vector colsq(n, 0.0);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int i = 0; i < m; ++i) s += W(i, j) * W(i, j);
            colsq[j] = s;
        }
        bool rotated = false;
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double g = 0;
                for (int k = 0; k < m; ++k) g += W(k, i) * W(k, j);
                const double a = colsq[i], b = colsq[j];
                if (std::abs(g) <= kPairTol * std::sqrt(a * b) || g == 0.0) continue;
                rotated = true;
                const double tau = (b - a) / (2.0 * g);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (int k = 0; k < m; ++k) {
                    const double wi = W(k, i), wj = W(k, j);
                    W(k, i) = cs * wi - sn * wj;
                    W(k, j) = sn * wi + cs * wj;
                }
                if (V) {
                    for (int k = 0; k < V->rows; ++k) {
                        const double vi = (*V)(k, i), vj = (*V)(k, j);
                        (*V)(k, i) = cs * vi - sn * vj;
                        (*V)(k, j) = sn * vi + cs * vj;
                    }
                }
                colsq[i] = a - t * g;  // rotation zeroes g and shifts the norms
                colsq[j] = b + t * g;
            }
        }
        if (!rotated) break;
    }
}

SvdResult svd_tall(const DenseMatrix& A) {  // requires rows >= cols
    const int m = A.rows, n = A.cols;
    DenseMatrix W = A;
    DenseMatrix V = DenseMatrix::identity(n);
    jacobi_orthogonalize(W, &V);

    Vector sigma(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += W(i, j) * W(i, j);
        sigma[j] = std::sqrt(s);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    SvdResult out{DenseMatrix(m, n), Vector(n), DenseMatrix(n, n)};
    for (int jj = 0; jj < n; ++jj) {
        const int j = order[jj];
        out.sigma[jj] = sigma[j];
        if (sigma[j] > 0)
            for (int i = 0; i < m; ++i) out.U(i, jj) = W(i, j) / sigma[j];
        for (int i = 0; i < n; ++i) out.V(i, jj) = V(i, j);
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& A) {
    DenseMatrix T(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

// Lower-triangular Cholesky in place; returns false if a pivot is not positive.
bool cholesky(DenseMatrix& M) {
    const int n = M.rows;
    for (int j = 0; j < n; ++j) {
        double d = M(j, j);
        for (int k = 0; k < j; ++k) d -= M(j, k) * M(j, k);
        if (d <= 0) return false;
        const double l = std::sqrt(d);
        M(j, j) = l;
        for (int i = j + 1; i < n; ++i) {
            double s = M(i, j);
            for (int k = 0; k < j; ++k) s -= M(i, k) * M(j, k);
            M(i, j) = s / l;
        }
    }
    return true;
}

Vector cholesky_solve(const DenseMatrix& L, const Vector& rhs) {
    const int n = L.rows;
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        double s = rhs[i];
        for (int k = 0; k < i; ++k) s -= L(i, k) * y[k];
        y[i] = s / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= L(k, i) * y[k];
        y[i] = s / L(i, i);
    }
    return y;
}

void check_oracle_scale(const DenseMatrix& A, const char* who) {
    if (A.rows > 2000 || A.cols > 2000)
        throw std::invalid_argument(std::string(who) + ": oracle limited to dimensions <= 2000");
}

}  // namespace

SvdResult jacobi_svd(const DenseMatrix& A) {
    check_oracle_scale(A, "jacobi_svd");
    if (A.rows >= A.cols) return svd_tall(A);
    SvdResult t = svd_tall(transpose(A));  // A^T = U' S V'^T  =>  A = V' S U'^T
    return SvdResult{std::move(t.V), std::move(t.sigma), std::move(t.U)};
}

Vector jacobi_singular_values(const DenseMatrix& A) {
    check_oracle_scale(A, "jacobi_singular_values");
    DenseMatrix W = A.rows >= A.cols ? A : transpose(A);
    jacobi_orthogonalize(W, nullptr);
    Vector sigma(W.cols);
    for (int j = 0; j < W.cols; ++j) {
        double s = 0;
        for (int i = 0; i < W.rows; ++i) s += W(i, j) * W(i, j);
        sigma[j] = std::sqrt(s);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    return sigma;
}

LeastSquaresResult least_squares_direct(const DenseMatrix& A, const Vector& b) {
    if (int(b.size()) != A.rows) throw std::invalid_argument("least_squares_direct: size mismatch");
    const SvdResult svd = jacobi_svd(A);
    const double cutoff = svd.sigma.empty() ? 0.0 : kTruncation * svd.sigma[0];

    LeastSquaresResult res;
    res.x_star.assign(std::size_t(A.cols), 0.0);
    for (std::size_t j = 0; j < svd.sigma.size(); ++j) {
        if (svd.sigma[j] <= cutoff) break;  // sorted: the rest are truncated too
        double coef = 0;
        for (int i = 0; i < A.rows; ++i) coef += svd.U(i, int(j)) * b[i];
        coef /= svd.sigma[j];
        for (int i = 0; i < A.cols; ++i) res.x_star[i] += coef * svd.V(i, int(j));
    }
    Vector r = matvec(A, res.x_star);
    for (int i = 0; i < A.rows; ++i) r[i] -= b[i];
    res.delta = norm2(r);
    return res;
}

double smallest_positive_singular_value(const DenseMatrix& A) {
    const Vector sigma = jacobi_singular_values(A);
    if (sigma.empty() || sigma[0] == 0.0)
        throw std::domain_error("smallest_positive_singular_value: zero matrix");
    const double cutoff = kTruncation * sigma[0];
    double best = sigma[0];
    for (double s : sigma)
        if (s > cutoff) best = s;  // sorted descending: last one above cutoff wins
    return best;
}

EllipsoidProjection project_to_ellipsoid(const DenseMatrix& A, const Vector& b, double r) {
    check_oracle_scale(A, "project_to_ellipsoid");
    if (r <= 0) throw std::invalid_argument("project_to_ellipsoid: r must be positive");
    if (int(b.size()) != A.rows) throw std::invalid_argument("project_to_ellipsoid: size mismatch");

    const LeastSquaresResult ls = least_squares_direct(A, b);
    if (norm2(ls.x_star) <= r) {
        EllipsoidProjection out;
        out.x_opt = ls.x_star;
        out.delta_r = ls.delta;
        out.lambda = 0.0;
        return out;
    }

    const int n = A.cols;
    DenseMatrix G(n, n);  // A^T A, accumulated row by row of A
    for (int k = 0; k < A.rows; ++k) {
        const double* row = A.row(k);
        for (int i = 0; i < n; ++i) {
            if (row[i] == 0.0) continue;
            for (int j = i; j < n; ++j) G(i, j) += row[i] * row[j];
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) G(i, j) = G(j, i);
    const Vector w = transpose_matvec(A, b);

    auto norm_at = [&](double lambda, Vector& x) {
        DenseMatrix M = G;
        for (int i = 0; i < n; ++i) M(i, i) += lambda;
        if (!cholesky(M))
            throw std::runtime_error("project_to_ellipsoid: Cholesky failed (should be SPD)");
        x = cholesky_solve(M, w);
        return norm2(x);
    };

    // ||x(lambda)|| <= ||w||/lambda, so lambda_hi = ||w||/r lands at or inside r.
    double lo = 0.0, hi = std::max(norm2(w) / r, 1e-300);
    Vector x;
    double nx = norm_at(hi, x);
    for (int k = 0; k < 60 && nx > r; ++k) {  // guard against rounding at the boundary
        hi *= 2.0;
        nx = norm_at(hi, x);
    }
    if (nx > r) throw std::runtime_error("project_to_ellipsoid: failed to bracket lambda");

    double lambda_x = hi;   // lambda at which x/nx were evaluated
    Vector x_in = x;        // best feasible (||x|| <= r) evaluation seen
    double lambda_in = hi, nx_in = nx;
    while (std::abs(nx - r) > 1e-10 * r) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval exhausted in double precision
        nx = norm_at(mid, x);
        lambda_x = mid;
        if (nx > r) {
            lo = mid;
        } else {
            hi = mid;
            if (r - nx < r - nx_in) {
                x_in = x;
                lambda_in = mid;
                nx_in = nx;
            }
        }
    }

    EllipsoidProjection out;
    if (std::abs(nx - r) <= 1e-10 * r) {
        out.x_opt = std::move(x);
        out.lambda = lambda_x;
    } else if (std::abs(nx_in - r) <= 1e-8 * r) {
        out.x_opt = std::move(x_in);  // fp-noise floor hit; feasible side, slightly looser
        out.lambda = lambda_in;
    } else {
        throw std::runtime_error("project_to_ellipsoid: bisection failed to meet tolerance");
    }
    Vector resid = matvec(A, out.x_opt);
    for (int i = 0; i < A.rows; ++i) resid[i] -= b[i];
    out.delta_r = norm2(resid);
    return out;
}

}  // namespace ta
