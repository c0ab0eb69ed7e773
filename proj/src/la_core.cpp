#include "ta/la_core.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ta {

namespace {

std::atomic<std::uint64_t> g_mac_count{0};

// Below this element count the parallel paths fall back to the serial loop;
// partitioning never changes the arithmetic, only who executes it.
constexpr std::size_t kParallelCutoff = 32768;

// Row reduction with eight fixed-order accumulators. Every matvec path funnels
// through this, so serial and parallel results are bitwise identical.
double row_dot(const double* a, const double* x, int n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
        s0 += a[j] * x[j];
        s1 += a[j + 1] * x[j + 1];
        s2 += a[j + 2] * x[j + 2];
        s3 += a[j + 3] * x[j + 3];
        s4 += a[j + 4] * x[j + 4];
        s5 += a[j + 5] * x[j + 5];
        s6 += a[j + 6] * x[j + 6];
        s7 += a[j + 7] * x[j + 7];
    }
    for (; j < n; ++j) s0 += a[j] * x[j];
    return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
}

// out[j] += y_i * A(i,j) for i ascending, restricted to columns [j0, j1).
void accumulate_cols(const DenseMatrix& A, const Vector& y, Vector& out, int j0, int j1) {
    for (int i = 0; i < A.rows; ++i) {
        const double* row = A.row(i);
        const double yi = y[i];
        for (int j = j0; j < j1; ++j) out[j] += row[j] * yi;
    }
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double t : v)
        if (!std::isfinite(t)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace

DenseMatrix::DenseMatrix(int m, int n) : rows(m), cols(n) {
    if (m < 1 || n < 1) throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    data.assign(std::size_t(m) * n, 0.0);
}

DenseMatrix::DenseMatrix(int m, int n, std::vector<double> entries) : rows(m), cols(n) {
    if (m < 1 || n < 1) throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    if (entries.size() != std::size_t(m) * n)
        throw std::invalid_argument("DenseMatrix: data length does not match rows*cols");
    check_finite(entries, "DenseMatrix");
    data = std::move(entries);
}

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
    DenseMatrix D(int(d.size()), int(d.size()));
    for (int i = 0; i < D.rows; ++i) D(i, i) = d[i];
    return D;
}

void require_finite(const Vector& v, const std::string& name) {
    for (double t : v)
        if (!std::isfinite(t)) throw std::invalid_argument(name + ": non-finite entry");
}

std::uint64_t mac_count() { return g_mac_count.load(std::memory_order_relaxed); }
void reset_mac_count() { g_mac_count.store(0, std::memory_order_relaxed); }

Vector matvec(const DenseMatrix& A, const Vector& x) {
    if (int(x.size()) != A.cols) throw std::invalid_argument("matvec: x.len != A.cols");
    g_mac_count.fetch_add(std::uint64_t(A.rows) * A.cols, std::memory_order_relaxed);
    Vector y(A.rows);
#ifdef _OPENMP
    if (A.data.size() >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < A.rows; ++i) y[i] = row_dot(A.row(i), x.data(), A.cols);
        return y;
    }
#endif
    for (int i = 0; i < A.rows; ++i) y[i] = row_dot(A.row(i), x.data(), A.cols);
    return y;
}

Vector matvec_reference(const DenseMatrix& A, const Vector& x) {
    if (int(x.size()) != A.cols) throw std::invalid_argument("matvec: x.len != A.cols");
    g_mac_count.fetch_add(std::uint64_t(A.rows) * A.cols, std::memory_order_relaxed);
    Vector y(A.rows);
    for (int i = 0; i < A.rows; ++i) y[i] = row_dot(A.row(i), x.data(), A.cols);
    return y;
}

Vector transpose_matvec(const DenseMatrix& A, const Vector& y) {
    if (int(y.size()) != A.rows) throw std::invalid_argument("transpose_matvec: y.len != A.rows");
    g_mac_count.fetch_add(std::uint64_t(A.rows) * A.cols, std::memory_order_relaxed);
    Vector out(A.cols, 0.0);
#ifdef _OPENMP
    if (A.data.size() >= kParallelCutoff) {
#pragma omp parallel
        {
            const int nt = omp_get_num_threads();
            const int tid = omp_get_thread_num();
            const int j0 = int(std::int64_t(A.cols) * tid / nt);
            const int j1 = int(std::int64_t(A.cols) * (tid + 1) / nt);
            accumulate_cols(A, y, out, j0, j1);
        }
        return out;
    }
#endif
    accumulate_cols(A, y, out, 0, A.cols);
    return out;
}

Vector transpose_matvec_reference(const DenseMatrix& A, const Vector& y) {
    if (int(y.size()) != A.rows) throw std::invalid_argument("transpose_matvec: y.len != A.rows");
    g_mac_count.fetch_add(std::uint64_t(A.rows) * A.cols, std::memory_order_relaxed);
    Vector out(A.cols, 0.0);
    accumulate_cols(A, y, out, 0, A.cols);
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    return row_dot(a.data(), b.data(), int(a.size()));
}

double norm2(const Vector& v) { return std::sqrt(row_dot(v.data(), v.data(), int(v.size()))); }

double operator_norm_estimate(const DenseMatrix& A, double tol) {
    if (tol <= 0) throw std::invalid_argument("operator_norm_estimate: tol must be positive");
    std::mt19937_64 rng(0x517cc1b727220a95ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(A.cols);
    for (double& t : v) t = gauss(rng);
    double nv = norm2(v);
    for (double& t : v) t /= nv;

    double s_prev = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        Vector w = matvec(A, v);       // sigma estimate s = ||Av|| with ||v|| = 1
        const double s = norm2(w);
        if (s == 0.0) return 0.0;      // v annihilated; only possible en route for A = 0
        Vector u = transpose_matvec(A, w);
        const double nu = norm2(u);    // nu > 0 since v'u = s^2 > 0
        for (int j = 0; j < A.cols; ++j) v[j] = u[j] / nu;
        if (std::abs(s - s_prev) <= 0.25 * tol * s) return s;
        s_prev = s;
    }
    return s_prev;
}

DenseMatrix random_orthogonal(int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("random_orthogonal: k must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseMatrix W(k, k);
    for (double& t : W.data) t = gauss(rng);

    // Householder QR. Reflector j zeroes column j below the diagonal; its tail is
    // stored in place, the head and 2/v'v on the side. W(j,j) ends up as R(j,j).
    std::vector<double> vhead(k, 0.0), vscale(k, 0.0);
    for (int j = 0; j < k; ++j) {
        double colnorm2 = 0.0;
        for (int i = j; i < k; ++i) colnorm2 += W(i, j) * W(i, j);
        const double alpha = std::sqrt(colnorm2);
        if (alpha == 0.0) continue;  // already zero; skip (measure-zero event)
        const double x0 = W(j, j);
        const double a = (x0 >= 0.0) ? -alpha : alpha;  // sign choice avoids cancellation
        const double v0 = x0 - a;
        const double vtv = colnorm2 - 2.0 * a * x0 + a * a;
        vhead[j] = v0;
        vscale[j] = 2.0 / vtv;
        W(j, j) = a;
        for (int c = j + 1; c < k; ++c) {
            double s = v0 * W(j, c);
            for (int i = j + 1; i < k; ++i) s += W(i, j) * W(i, c);
            s *= vscale[j];
            W(j, c) -= s * v0;
            for (int i = j + 1; i < k; ++i) W(i, c) -= s * W(i, j);
        }
    }

    // Q = H_0 H_1 ... H_{k-1} I, applied in reverse so each reflector touches
    // only rows >= j of the partially built Q.
    DenseMatrix Q = DenseMatrix::identity(k);
    for (int j = k - 1; j >= 0; --j) {
        if (vscale[j] == 0.0) continue;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (k >= 128)
#endif
        for (int c = 0; c < k; ++c) {
            double s = vhead[j] * Q(j, c);
            for (int i = j + 1; i < k; ++i) s += W(i, j) * Q(i, c);
            s *= vscale[j];
            Q(j, c) -= s * vhead[j];
            for (int i = j + 1; i < k; ++i) Q(i, c) -= s * W(i, j);
        }
    }

    // Flip column signs so the implied R has a positive diagonal: makes the
    // factorization (and therefore Q) canonical for a given Gaussian draw.
    for (int j = 0; j < k; ++j) {
        if (W(j, j) < 0.0)
            for (int i = 0; i < k; ++i) Q(i, j) = -Q(i, j);
    }
    return Q;
}

}  // namespace ta
