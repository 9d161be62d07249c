#pragma once

#include <string>

#include "rwlra/matrix.hpp"

namespace rwlra {

/// CSV matrix format: first line "rows,cols", then one comma-separated line
/// per row. Values are written with enough digits to round-trip doubles.
void save_csv(const DenseMatrix& M, const std::string& path);
DenseMatrix load_csv(const std::string& path);

/// Raw binary format: two 64-bit little-endian unsigned integers (rows, cols)
/// followed by rows*cols IEEE-754 doubles, little-endian, row-major.
void save_binary(const DenseMatrix& M, const std::string& path);
DenseMatrix load_binary(const std::string& path);

} // namespace rwlra
