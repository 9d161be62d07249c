#pragma once

#include <vector>

#include "rwlra/matrix.hpp"

namespace rwlra {

/// min_x ||M x - b||^2 + lambda ||x||^2. lambda = 0 is served by the exact
/// path only (minimum-norm solution through a complete orthogonal
/// decomposition); every sketched/iterative path requires lambda > 0.
struct RidgeProblem {
    DenseMatrix M; // n x k design
    Vector b;      // length n
    double lambda = 1.0;
};

/// Exact solve via SPD normal equations (lambda > 0) or minimum-norm
/// least squares (lambda = 0).
Vector ridge_solve(const RidgeProblem& p);

/// Exact minimizer of ||S(Mx - b)||^2 + lambda ||x||^2 via normal equations
/// on (SM, Sb). S must have as many columns as M has rows.
Vector sketched_ridge_solve(const RidgeProblem& p, const DenseMatrix& S);

/// ||Mx - b||^2 + lambda ||x||^2.
double ridge_objective(const RidgeProblem& p, const Vector& x);

/// Sum of un-sketched objectives at the sketched solutions, divided by the
/// sum of optima. All problems share the ambient dimension and the single
/// sketch S. Returns 1 when every optimum is exactly zero.
double batch_objective_ratio(const std::vector<RidgeProblem>& problems,
                             const DenseMatrix& S);

/// Preconditioned Richardson parameters. eta is both the containment factor
/// (eta A <= B <= A) and the step size, as in the convergence statement.
struct RichardsonConfig {
    double eta = 1.0;
    int max_iters = 1000;
    double tau = 1e-12;                   // residual-norm early stop
    bool check_containment = true;        // 20 random quadratic-form probes
    bool exact_containment_check = false; // generalized-eigenvalue check
};

struct RichardsonResult {
    Vector x;
    int iterations = 0;
    double final_residual_norm = 0.0;
    bool converged = false;
    /// x_t is a polynomial of this degree in B^{-1} and A applied to b.
    int polynomial_degree = 0;
    bool containment_warning = false;
};

/**
 * x_{i+1} = x_i - eta B^{-1} (A x_i - b) from x_0 = 0.
 *
 * A and B must be symmetric positive definite (Cholesky failure is an
 * error); a detected violation of eta A <= B <= A only raises
 * `containment_warning`. Stops early once ||A x - b|| <= tau.
 */
RichardsonResult richardson_solve(const DenseMatrix& A, const DenseMatrix& B,
                                  const Vector& b,
                                  const RichardsonConfig& cfg);

/// The same iterate evaluated as the explicit degree-t polynomial
/// eta * sum_{j<t} (I - eta B^{-1} A)^j B^{-1} b. Used to cross-check that
/// richardson_solve's iterate really is that polynomial.
Vector richardson_polynomial_iterate(const DenseMatrix& A,
                                     const DenseMatrix& B, const Vector& b,
                                     double eta, int t);

/// Preconditioner B with its contract step size eta.
struct Preconditioner {
    DenseMatrix B;
    double eta = 1.0;
};

/**
 * Explicit preconditioner for the Gram systems of weighted ridge rows whose
 * weights satisfy 0 < l_W <= |w| <= u_W:
 *
 *   R = l_W * factor,   B = (S R)^T (S R) / log2(n),
 *   eta = 1 / (log2(n)^2 * (u_W / l_W)).
 *
 * `factor` is tall (ambient x k), S is l x ambient; B is k x k. The overload
 * without S is the identity-sketch case B = R^T R / log2(n).
 */
Preconditioner build_preconditioner(const DenseMatrix& factor,
                                    const DenseMatrix& S, double l_W,
                                    double u_W, Index n);
Preconditioner build_preconditioner(const DenseMatrix& factor, double l_W,
                                    double u_W, Index n);

} // namespace rwlra
