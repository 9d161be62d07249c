#pragma once

#include <cstdint>
#include <vector>

#include "rwlra/matrix.hpp"

namespace rwlra {

enum class SketchKind { Gaussian, CountSketch };

/// Distribution + shape + seed of a sketch operator. Identical
/// (kind, rows, seed, ambient dimension) always realize the identical matrix.
struct SketchSpec {
    SketchKind kind = SketchKind::Gaussian;
    Index rows = 1;
    std::uint64_t seed = 0;
};

/**
 * A realized l x n sketch operator.
 *
 * Gaussian sketches hold their dense realization (entries N(0, 1/l));
 * CountSketch holds one (bucket, sign) pair per ambient column, derived by
 * hashing (seed, column), and applies itself in O(nnz) by streaming rows or
 * columns into buckets. matrix() and the apply* methods agree exactly.
 */
class SketchOp {
public:
    SketchOp(const SketchSpec& spec, Index ambient);

    Index rows() const { return spec_.rows; }
    Index cols() const { return ambient_; }
    const SketchSpec& spec() const { return spec_; }

    /// Dense l x n realization.
    DenseMatrix matrix() const;

    /// S * M for M with n rows.
    DenseMatrix apply(const DenseMatrix& M) const;

    /// S * x for x of length n.
    Vector apply(const Vector& x) const;

    /// M * S^T for M with n columns (result has l columns).
    DenseMatrix apply_right(const DenseMatrix& M) const;

private:
    SketchSpec spec_;
    Index ambient_ = 0;
    DenseMatrix dense_;            // Gaussian only
    std::vector<Index> bucket_;    // CountSketch only
    std::vector<double> sign_;     // CountSketch only
};

/// Realize a sketch as a dense l x n matrix.
DenseMatrix sample_sketch(const SketchSpec& spec, Index n);

inline constexpr double kDefaultSketchConstant = 4.0;

/// ceil(c * (s + ln(1/eps)) / eps): sketch rows sized by statistical
/// dimension, not column count. The constant c defaults to 4, chosen by the
/// calibration sweep in the verification suite.
Index recommended_sketch_size(double s, double epsilon,
                              double c = kDefaultSketchConstant);

/**
 * Measured distortion of a sketch on a subspace, plus the conditioning
 * diagnostics used by the sketched-regression analysis:
 *
 *   K     : upper distortion, sigma_max(S Q)^2 over an orthonormal basis Q
 *   kappa : lower distortion, sigma_min(S Q)^2 (0 when rows < rank)
 *   gamma : || Uhat^T Shat^T Shat Uhat - I || on the augmented basis
 *   c_h   : condition factor of the sketched head subspace [M_h, b]
 *   alpha : c_h * (1 + gamma), exactly
 *   sigma_max : largest singular value of the un-sketched matrix
 */
struct DistortionDiagnostics {
    double K = 1.0;
    double kappa = 1.0;
    double gamma = 0.0;
    double c_h = 1.0;
    double alpha = 1.0;
    double sigma_max = 0.0;
    Index head_rank = 0;
};

/// K and kappa of S restricted to the column space of M. M must be nonzero.
DistortionDiagnostics distortion_factors(const DenseMatrix& S,
                                         const DenseMatrix& M);

/**
 * Gamma/alpha diagnostics for the regularized regression (M, b, lambda):
 * augments Mhat = [M; sqrt(lambda) I], bhat = [b; 0],
 * Shat = blockdiag(S, I); computes gamma over an orthonormal basis of
 * [Mhat bhat]; splits M into head (sigma_i^2 >= lambda) and tail and measures
 * c_h = c_S([M_h, b]). Requires lambda > 0 (the head/tail split is undefined
 * at lambda = 0).
 */
DistortionDiagnostics gamma_alpha_diagnostics(const DenseMatrix& S,
                                              const DenseMatrix& M,
                                              const Vector& b, double lambda);

/// Spectral norm of A^T S^T S B - A^T B (approximate-matrix-product error).
double amm_error(const DenseMatrix& S, const DenseMatrix& A,
                 const DenseMatrix& B);

} // namespace rwlra
