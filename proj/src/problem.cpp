#include "rwlra/problem.hpp"

#include <cmath>

namespace rwlra {

WlraProblem::WlraProblem(DenseMatrix A_in, DenseMatrix W_in, int k_in,
                         double lambda_in, double epsilon_in)
    : A(std::move(A_in)), W(std::move(W_in)), k(k_in), lambda(lambda_in),
      epsilon(epsilon_in) {
    require_same_shape(A, W, "WlraProblem");
    require_finite(A, "WlraProblem A");
    require_finite(W, "WlraProblem W");
    if ((W.array() < 0.0).any())
        throw std::invalid_argument("WlraProblem: weights must be nonnegative");
    if (A.rows() < A.cols()) {
        A = DenseMatrix(A.transpose());
        W = DenseMatrix(W.transpose());
        transposed = true;
    }
    if (k < 1 || k > A.cols())
        throw std::invalid_argument("WlraProblem: need 1 <= k <= min(n, d)");
    if (lambda < 0.0)
        throw std::invalid_argument("WlraProblem: lambda must be >= 0");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("WlraProblem: epsilon must be in (0, 1)");
}

namespace {

void require_factor_shapes(const WlraProblem& p, const DenseMatrix& U,
                           const DenseMatrix& V) {
    if (U.rows() != p.n() || V.cols() != p.d() || U.cols() != V.rows())
        throw std::invalid_argument("weighted_objective: factor shapes do not "
                                    "match the problem");
}

double regularizer(const WlraProblem& p, const DenseMatrix& U,
                   const DenseMatrix& V) {
    return p.lambda * (U.squaredNorm() + V.squaredNorm());
}

} // namespace

double weighted_objective(const WlraProblem& p, const DenseMatrix& U,
                          const DenseMatrix& V) {
    require_factor_shapes(p, U, V);
    double residual = (p.W.array() * (U * V - p.A).array()).square().sum();
    return residual + regularizer(p, U, V);
}

double weighted_objective(const WlraProblem& p, const Factorization& f) {
    return weighted_objective(p, f.U, f.V);
}

double weighted_objective_row_form(const WlraProblem& p, const DenseMatrix& U,
                                   const DenseMatrix& V) {
    require_factor_shapes(p, U, V);
    double residual = 0.0;
    for (Index i = 0; i < p.n(); ++i) {
        const Vector w = p.W.row(i).transpose();
        const DenseMatrix Vw = scale_cols(V, w);               // V D_{W_i}
        const Vector aw = p.A.row(i).transpose().cwiseProduct(w);
        residual += (U.row(i) * Vw - aw.transpose()).squaredNorm();
    }
    return residual + regularizer(p, U, V);
}

double weighted_objective_col_form(const WlraProblem& p, const DenseMatrix& U,
                                   const DenseMatrix& V) {
    require_factor_shapes(p, U, V);
    double residual = 0.0;
    for (Index j = 0; j < p.d(); ++j) {
        const Vector w = p.W.col(j);
        const DenseMatrix Uw = scale_rows(w, U);               // D_{W_j} U
        const Vector aw = p.A.col(j).cwiseProduct(w);
        residual += (Uw * V.col(j) - aw).squaredNorm();
    }
    return residual + regularizer(p, U, V);
}

void validate_cached_objective(const WlraProblem& p, const Factorization& f) {
    if (!f.objective) return;
    const double fresh = weighted_objective(p, f);
    const double scale = std::max({std::abs(fresh), std::abs(*f.objective), 1e-300});
    if (std::abs(fresh - *f.objective) > 1e-10 * scale)
        throw std::logic_error("Factorization: cached objective " +
                               std::to_string(*f.objective) +
                               " disagrees with fresh evaluation " +
                               std::to_string(fresh));
}

DenseMatrix row_scaled(const WlraProblem& p, const DenseMatrix& M, Index i) {
    if (i < 0 || i >= p.n())
        throw std::out_of_range("row_scaled: row index out of range");
    return scale_cols(M, p.W.row(i).transpose());
}

DenseMatrix col_scaled(const WlraProblem& p, const DenseMatrix& M, Index j) {
    if (j < 0 || j >= p.d())
        throw std::out_of_range("col_scaled: column index out of range");
    return scale_rows(p.W.col(j), M);
}

} // namespace rwlra
