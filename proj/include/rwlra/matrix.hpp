#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwlra {

/// Row-major dense matrix of doubles. Row-major matches the on-disk binary
/// layout and numpy's default ordering, so I/O and bindings are copy-free.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

bool all_finite(const DenseMatrix& M);

/// Throws std::invalid_argument naming `what` if M contains NaN/Inf.
void require_finite(const DenseMatrix& M, const std::string& what);

void require_same_shape(const DenseMatrix& A, const DenseMatrix& B,
                        const std::string& what);

/// Elementwise product W ∘ M. Shapes must match.
DenseMatrix hadamard(const DenseMatrix& W, const DenseMatrix& M);

/// M * D_w without materializing the diagonal (scales column j by w(j)).
DenseMatrix scale_cols(const DenseMatrix& M, const Vector& w);

/// D_w * M without materializing the diagonal (scales row i by w(i)).
DenseMatrix scale_rows(const Vector& w, const DenseMatrix& M);

} // namespace rwlra
