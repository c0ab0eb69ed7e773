#include "ta/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ta {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::runtime_error("matrix market: " + path + ": " + msg);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// First non-comment, non-blank line after the banner holds the size header.
bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace

void write_matrix_market(const DenseMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out.precision(17);
    out << "%%MatrixMarket matrix array real general\n";
    out << A.rows << " " << A.cols << "\n";
    for (int j = 0; j < A.cols; ++j)
        for (int i = 0; i < A.rows; ++i) out << A(i, j) << "\n";
    if (!out) fail(path, "write failure");
}

void write_matrix_market(const Vector& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out.precision(17);
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    for (double t : v) out << t << "\n";
    if (!out) fail(path, "write failure");
}

DenseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open");

    std::string banner;
    if (!std::getline(in, banner)) fail(path, "empty file");
    std::istringstream hs(banner);
    std::string magic, object, format, field, symmetry;
    hs >> magic >> object >> format >> field >> symmetry;
    if (lower(magic) != "%%matrixmarket" || lower(object) != "matrix")
        fail(path, "not a MatrixMarket matrix file");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "array" && format != "coordinate") fail(path, "unsupported format: " + format);
    if (field != "real" && field != "integer") fail(path, "unsupported field: " + field);
    if (symmetry != "general") fail(path, "unsupported symmetry: " + symmetry);

    std::string line;
    if (!next_content_line(in, line)) fail(path, "missing size line");
    std::istringstream ss(line);

    if (format == "array") {
        int m = 0, n = 0;
        if (!(ss >> m >> n)) fail(path, "bad array size line");
        if (m < 1 || n < 1) fail(path, "dimensions must be positive");
        DenseMatrix A(m, n);
        for (int j = 0; j < n; ++j)          // array format is column-major
            for (int i = 0; i < m; ++i) {
                double v;
                if (!(in >> v)) fail(path, "truncated value list");
                if (!std::isfinite(v)) fail(path, "non-finite entry");
                A(i, j) = v;
            }
        return A;
    }

    long long m = 0, n = 0, nnz = 0;
    if (!(ss >> m >> n >> nnz)) fail(path, "bad coordinate size line");
    if (m < 1 || n < 1 || nnz < 0) fail(path, "bad coordinate sizes");
    DenseMatrix A{int(m), int(n)};
    for (long long k = 0; k < nnz; ++k) {
        long long i, j;
        double v;
        if (!(in >> i >> j >> v)) fail(path, "truncated entry list");
        if (i < 1 || i > m || j < 1 || j > n) fail(path, "entry index out of range");
        if (!std::isfinite(v)) fail(path, "non-finite entry");
        A(int(i - 1), int(j - 1)) = v;
    }
    return A;
}

Vector read_vector_market(const std::string& path) {
    DenseMatrix A = read_matrix_market(path);
    if (A.cols != 1) fail(path, "expected a one-column vector");
    return A.data;  // single column of a row-major m x 1 matrix is contiguous
}

}  // namespace ta
