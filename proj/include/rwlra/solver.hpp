#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rwlra/problem.hpp"
#include "rwlra/ridge.hpp"
#include "rwlra/sketch.hpp"

namespace rwlra {

enum class RidgeSolverKind { Direct, Richardson, PreconditionedRichardson };

/// Options shared by the per-row/per-column ridge solves inside a best
/// response. tau is the additive budget for a whole step; each of the n (or
/// d) subproblems gets tau / n of it as its residual stop.
struct BestResponseOptions {
    RidgeSolverKind solver = RidgeSolverKind::Direct;
    double tau = 1e-9;
    int max_iters = 50000;
};

/// Alternating-minimization configuration. When the sketch pair is present,
/// sketch_u is realized with d ambient columns (applied to row problems) and
/// sketch_v with n ambient columns (applied to column problems); both are
/// sampled once per run unless resample_each_iteration is set.
struct AmConfig {
    int iterations = 25;
    std::optional<SketchSpec> sketch_u;
    std::optional<SketchSpec> sketch_v;
    std::uint64_t init_seed = 0;
    RidgeSolverKind solver = RidgeSolverKind::Direct;
    bool resample_each_iteration = false;
    double tau = 1e-9;
    int richardson_max_iters = 50000;
};

struct SolveReport {
    std::vector<double> objective_trace; // entry 0 is the initialization
    double final_objective = 0.0;
    double residual_term = 0.0;
    double regularization_term = 0.0;
    double seconds = 0.0;
    /// max sd_lambda over sampled scaled factors V D_{W_i} and D_{W_j} U,
    /// refreshed each iteration; the runtime stand-in for the quantity s.
    double s_estimate = 0.0;
    /// max singular value over the same sampled scaled factors.
    double sigma_estimate = 0.0;
    int iterations = 0;
    /// Iterative-solver calls whose containment probes flagged a violation.
    int containment_warnings = 0;
    bool transposed = false;
};

/// Row-wise regularized best response: row i of the result minimizes
/// || u P_i - A_i D_{W_i} S'||^2 + lambda ||u||^2 with P_i = V D_{W_i} S'
/// (S' = identity when sketch is null). Each row reduces to a RidgeProblem.
DenseMatrix best_response_U(const WlraProblem& p, const DenseMatrix& V,
                            const SketchOp* sketch = nullptr,
                            const BestResponseOptions& opt = {});

/// Column-wise mirror with Q_j = S'' D_{W_j} U.
DenseMatrix best_response_V(const WlraProblem& p, const DenseMatrix& U,
                            const SketchOp* sketch = nullptr,
                            const BestResponseOptions& opt = {});

/// Alternating best responses from a random subset initialization
/// (U <- k columns of A, V <- k rows of A, sampled without replacement).
std::pair<Factorization, SolveReport>
alternating_minimization(const WlraProblem& p, const AmConfig& cfg);

/// Best rank-k approximation from the SVD: U = U_k Sigma_k, V = V_k^T.
Factorization svd_baseline(const DenseMatrix& A, int k);

struct RankReduction {
    DenseMatrix P;      // n x n orthogonal projector
    Index k_prime = 0;  // rank(P) <= r * sketch rows
    double epsilon = 0.0;
};

/**
 * Rank-reduction projector: factorizes W ~ YZ by its rank-r SVD, stacks the
 * r matrices S'' D_{Y_t} and projects onto the span of their combined right
 * singular vectors. Every sketched column design S'' D_{W_j} U then equals
 * S'' D_{W_j} P U, so U can be replaced by P U at no sketched-objective cost.
 */
RankReduction rank_reduce_projection(const DenseMatrix& W,
                                     const DenseMatrix& Spp, double epsilon);

/// Factors rounded to powers of (1 + epsilon), their product, and the
/// distinct-row/column counts of the product.
struct RoundedWeights {
    DenseMatrix Yp;
    DenseMatrix Zp;
    DenseMatrix Wp; // Yp * Zp
    double epsilon = 0.0;
    Index distinct_rows = 0;
    Index distinct_cols = 0;
};

/**
 * Rounds every positive entry of Y and Z to the nearest power of
 * (1 + epsilon) (zeros stay zero; negative entries are an error) and forms
 * Wp = Yp Zp. Asserts the sandwich
 * (1-eps)^2 W <= Wp <= (1+eps)^2 W elementwise against W = Y Z.
 */
RoundedWeights round_weight_factors(const DenseMatrix& Y, const DenseMatrix& Z,
                                    double epsilon);

} // namespace rwlra
