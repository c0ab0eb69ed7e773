#pragma once

#include <string>

#include "ta/la_core.hpp"

namespace ta {

// ASCII Matrix Market I/O for dense data. Writes use the
// `%%MatrixMarket matrix array real general` header (column-major value order,
// as the format prescribes); vectors are written as one-column arrays.
// The reader additionally accepts `coordinate` files, densified on load.
// Only the `general` symmetry class and real/integer fields are supported.

void write_matrix_market(const DenseMatrix& A, const std::string& path);
void write_matrix_market(const Vector& v, const std::string& path);

DenseMatrix read_matrix_market(const std::string& path);

// Reads a matrix file and requires it to be a single column.
Vector read_vector_market(const std::string& path);

}  // namespace ta
