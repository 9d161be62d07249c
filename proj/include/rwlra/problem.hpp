#pragma once

#include <optional>

#include "rwlra/matrix.hpp"

namespace rwlra {

/**
 * One instance of regularized weighted low rank approximation:
 *
 *   minimize  || W o (U V - A) ||_F^2 + lambda ||U||_F^2 + lambda ||V||_F^2
 *
 * over U (n x k) and V (k x d). A and W must have the same shape and W must
 * be entrywise nonnegative. If the input comes in wider than tall, both A and
 * W are transposed on ingest (the objective is symmetric under joint
 * transposition) and `transposed` records that fact.
 */
struct WlraProblem {
    DenseMatrix A;
    DenseMatrix W;
    int k = 1;
    double lambda = 0.0;
    double epsilon = 0.1;
    bool transposed = false;

    WlraProblem(DenseMatrix A_in, DenseMatrix W_in, int k_in, double lambda_in,
                double epsilon_in = 0.1);

    Index n() const { return A.rows(); }
    Index d() const { return A.cols(); }
};

/// Candidate factor pair with an optionally cached objective value.
struct Factorization {
    DenseMatrix U; // n x k'
    DenseMatrix V; // k' x d
    std::optional<double> objective;
};

/// || W o (UV - A) ||_F^2 + lambda (||U||_F^2 + ||V||_F^2), elementwise form.
double weighted_objective(const WlraProblem& p, const DenseMatrix& U,
                          const DenseMatrix& V);
double weighted_objective(const WlraProblem& p, const Factorization& f);

/// Same value computed as sum_i || U_i V D_{W_i} - A_i D_{W_i} ||^2 + reg.
double weighted_objective_row_form(const WlraProblem& p, const DenseMatrix& U,
                                   const DenseMatrix& V);

/// Same value computed as sum_j || D_{W_:j} (U V_j - A_j) ||^2 + reg.
double weighted_objective_col_form(const WlraProblem& p, const DenseMatrix& U,
                                   const DenseMatrix& V);

/// Throws std::logic_error if a cached objective disagrees with a fresh
/// evaluation by more than 1e-10 relative.
void validate_cached_objective(const WlraProblem& p, const Factorization& f);

/// M * D_{W_{i,:}} (right-scaling by row i of the weights).
DenseMatrix row_scaled(const WlraProblem& p, const DenseMatrix& M, Index i);

/// D_{W_{:,j}} * M (left-scaling by column j of the weights).
DenseMatrix col_scaled(const WlraProblem& p, const DenseMatrix& M, Index j);

} // namespace rwlra
