#pragma once

#include "rwlra/matrix.hpp"

namespace rwlra {

/// Singular values of M, descending.
Vector singular_values(const DenseMatrix& M);

/// Threshold below which singular values count as zero:
/// max(rows, cols) * sigma_max * 1e-12.
double singular_value_floor(Index rows, Index cols, double sigma_max);

int numerical_rank(const DenseMatrix& M);
int numerical_rank(const Vector& sv, Index rows, Index cols);

/// sd_lambda(M) = sum_i 1 / (1 + lambda / sigma_i^2) over nonzero singular
/// values. For lambda = 0 this is the numerical rank; a zero matrix has
/// statistical dimension 0.
double statistical_dimension(const DenseMatrix& M, double lambda);
double statistical_dimension(const Vector& sv, Index rows, Index cols,
                             double lambda);

/// ||M||_F^2 / ||M||_2^2. Throws std::invalid_argument for a zero matrix.
double stable_rank(const DenseMatrix& M);

/// Largest singular value.
double spectral_norm(const DenseMatrix& M);

/// Orthonormal basis of the column space (numerical-rank many columns).
DenseMatrix orthonormal_range(const DenseMatrix& M);

} // namespace rwlra
