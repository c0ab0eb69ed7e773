#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ta {

using Vector = std::vector<double>;

// Dense row-major matrix. Constructing from raw data validates the shape and
// rejects non-finite entries; the cheap fill constructors are trusted.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // rows*cols entries, row-major

    DenseMatrix() = default;
    DenseMatrix(int m, int n);  // zero-filled
    DenseMatrix(int m, int n, std::vector<double> entries);

    static DenseMatrix identity(int n);
    static DenseMatrix diagonal(const Vector& d);

    double& operator()(int i, int j) { return data[std::size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return data[std::size_t(i) * cols + j]; }

    double* row(int i) { return data.data() + std::size_t(i) * cols; }
    const double* row(int i) const { return data.data() + std::size_t(i) * cols; }
};

// Throws std::invalid_argument if v has a NaN/Inf entry. `name` is used in the message.
void require_finite(const Vector& v, const std::string& name);

// Running count of scalar multiply-add pairs performed by matvec/transpose_matvec,
// used by tests to pin the O(mn) per-call cost.
std::uint64_t mac_count();
void reset_mac_count();

// y = A*x. Parallelized over rows; bitwise identical to matvec_reference for any
// thread count (each row is reduced in a fixed order).
Vector matvec(const DenseMatrix& A, const Vector& x);

// x = A^T*y. Parallelized over column blocks; each output entry accumulates row
// indices in ascending order, so the result is bitwise identical to
// transpose_matvec_reference regardless of thread count.
Vector transpose_matvec(const DenseMatrix& A, const Vector& y);

// Plain serial loops kept as the comparison baseline for tests and kernel_bench.
Vector matvec_reference(const DenseMatrix& A, const Vector& x);
Vector transpose_matvec_reference(const DenseMatrix& A, const Vector& y);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);

// Spectral norm estimate by power iteration on A^T A (deterministically seeded
// start vector, 200-iteration cap). Returns sigma with sigma <= ||A||_2 and,
// for matrices with a reasonable spectral gap, ||A||_2 <= sigma*(1+tol).
// Diagnostic-quality only; never called inside the solver loop.
double operator_norm_estimate(const DenseMatrix& A, double tol = 1e-6);

// k x k orthogonal factor: Householder QR of a seeded standard Gaussian matrix,
// with R's diagonal signs fixed so the factorization (hence Q) is unique.
// Same (k, seed) gives a bitwise identical result.
DenseMatrix random_orthogonal(int k, std::uint64_t seed);

}  // namespace ta
