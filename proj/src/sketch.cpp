#include "rwlra/sketch.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "rwlra/rng.hpp"
#include "rwlra/spectral.hpp"

namespace rwlra {

namespace {

constexpr std::uint64_t kBucketStream = 0x636f756e74736bULL; // "countsk"
constexpr std::uint64_t kSignStream = 0x7369676e73ULL;       // "signs"

} // namespace

SketchOp::SketchOp(const SketchSpec& spec, Index ambient)
    : spec_(spec), ambient_(ambient) {
    if (spec.rows < 1)
        throw std::invalid_argument("SketchOp: rows must be >= 1");
    if (ambient < 1)
        throw std::invalid_argument("SketchOp: ambient dimension must be >= 1");
    if (spec.kind == SketchKind::Gaussian) {
        dense_.resize(spec.rows, ambient);
        const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rows));
        for (Index j = 0; j < ambient; ++j) {
            // One stream per column: realization is independent of how many
            // columns get drawn or in which order.
            CounterRng rng(spec.seed, static_cast<std::uint64_t>(j));
            for (Index i = 0; i < spec.rows; ++i)
                dense_(i, j) = rng.next_gaussian() * scale;
        }
    } else {
        bucket_.resize(static_cast<std::size_t>(ambient));
        sign_.resize(static_cast<std::size_t>(ambient));
        const std::uint64_t bkey = mix64(spec.seed ^ kBucketStream);
        const std::uint64_t skey = mix64(spec.seed ^ kSignStream);
        for (Index j = 0; j < ambient; ++j) {
            const auto u = static_cast<std::uint64_t>(j);
            bucket_[u] = static_cast<Index>(
                bounded(hash_index(bkey, u), static_cast<std::uint64_t>(spec.rows)));
            sign_[u] = (hash_index(skey, u) & 1u) ? 1.0 : -1.0;
        }
    }
}

DenseMatrix SketchOp::matrix() const {
    if (spec_.kind == SketchKind::Gaussian) return dense_;
    DenseMatrix S = DenseMatrix::Zero(spec_.rows, ambient_);
    for (Index j = 0; j < ambient_; ++j)
        S(bucket_[static_cast<std::size_t>(j)], j) =
            sign_[static_cast<std::size_t>(j)];
    return S;
}

DenseMatrix SketchOp::apply(const DenseMatrix& M) const {
    if (M.rows() != ambient_)
        throw std::invalid_argument("SketchOp::apply: operand has " +
                                    std::to_string(M.rows()) +
                                    " rows, sketch expects " +
                                    std::to_string(ambient_));
    if (spec_.kind == SketchKind::Gaussian) return dense_ * M;
    DenseMatrix out = DenseMatrix::Zero(spec_.rows, M.cols());
    for (Index r = 0; r < ambient_; ++r)
        out.row(bucket_[static_cast<std::size_t>(r)]) +=
            sign_[static_cast<std::size_t>(r)] * M.row(r);
    return out;
}

Vector SketchOp::apply(const Vector& x) const {
    if (x.size() != ambient_)
        throw std::invalid_argument("SketchOp::apply: vector length mismatch");
    if (spec_.kind == SketchKind::Gaussian) return dense_ * x;
    Vector out = Vector::Zero(spec_.rows);
    for (Index r = 0; r < ambient_; ++r)
        out(bucket_[static_cast<std::size_t>(r)]) +=
            sign_[static_cast<std::size_t>(r)] * x(r);
    return out;
}

DenseMatrix SketchOp::apply_right(const DenseMatrix& M) const {
    if (M.cols() != ambient_)
        throw std::invalid_argument(
            "SketchOp::apply_right: operand has " + std::to_string(M.cols()) +
            " columns, sketch expects " + std::to_string(ambient_));
    if (spec_.kind == SketchKind::Gaussian) return M * dense_.transpose();
    DenseMatrix out = DenseMatrix::Zero(M.rows(), spec_.rows);
    for (Index c = 0; c < ambient_; ++c)
        out.col(bucket_[static_cast<std::size_t>(c)]) +=
            sign_[static_cast<std::size_t>(c)] * M.col(c);
    return out;
}

DenseMatrix sample_sketch(const SketchSpec& spec, Index n) {
    return SketchOp(spec, n).matrix();
}

Index recommended_sketch_size(double s, double epsilon, double c) {
    if (s < 0.0)
        throw std::invalid_argument("recommended_sketch_size: s must be >= 0");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(
            "recommended_sketch_size: epsilon must be in (0, 1)");
    if (c <= 0.0)
        throw std::invalid_argument("recommended_sketch_size: c must be > 0");
    const double rows = c * (s + std::log(1.0 / epsilon)) / epsilon;
    return static_cast<Index>(std::ceil(rows));
}

DistortionDiagnostics distortion_factors(const DenseMatrix& S,
                                         const DenseMatrix& M) {
    if (S.cols() != M.rows())
        throw std::invalid_argument("distortion_factors: S has " +
                                    std::to_string(S.cols()) +
                                    " columns, M has " +
                                    std::to_string(M.rows()) + " rows");
    if (M.squaredNorm() == 0.0)
        throw std::invalid_argument("distortion_factors: M is zero");

    const DenseMatrix Q = orthonormal_range(M);
    const Index rank = Q.cols();
    const Vector sv = singular_values(S * Q);

    DistortionDiagnostics diag;
    diag.sigma_max = spectral_norm(M);
    const double smax = sv.size() ? sv(0) : 0.0;
    diag.K = smax * smax;
    // Fewer sketch rows than subspace rank force a null direction.
    if (S.rows() < rank) {
        diag.kappa = 0.0;
    } else {
        const double smin = sv(rank - 1);
        diag.kappa = smin * smin;
    }
    diag.gamma = 0.0;
    diag.c_h = 1.0;
    diag.alpha = diag.c_h * (1.0 + diag.gamma);
    diag.head_rank = rank;
    return diag;
}

DistortionDiagnostics gamma_alpha_diagnostics(const DenseMatrix& S,
                                              const DenseMatrix& M,
                                              const Vector& b, double lambda) {
    if (lambda <= 0.0)
        throw std::invalid_argument(
            "gamma_alpha_diagnostics: lambda must be > 0 (the head/tail split "
            "needs a positive threshold)");
    if (S.cols() != M.rows() || b.size() != M.rows())
        throw std::invalid_argument("gamma_alpha_diagnostics: shape mismatch");

    const Index n = M.rows();
    const Index k = M.cols();

    // Augmented system: Mhat = [M; sqrt(lambda) I], bhat = [b; 0],
    // Shat = blockdiag(S, I_k).
    DenseMatrix aug(n + k, k + 1);
    aug.topLeftCorner(n, k) = M;
    aug.bottomLeftCorner(k, k) =
        std::sqrt(lambda) * DenseMatrix::Identity(k, k);
    aug.topRightCorner(n, 1) = b;
    aug.bottomRightCorner(k, 1).setZero();

    const DenseMatrix Uhat = orthonormal_range(aug);
    DenseMatrix SUhat(S.rows() + k, Uhat.cols());
    SUhat.topRows(S.rows()) = S * Uhat.topRows(n);
    SUhat.bottomRows(k) = Uhat.bottomRows(k);
    const DenseMatrix deviation =
        SUhat.transpose() * SUhat -
        DenseMatrix::Identity(Uhat.cols(), Uhat.cols());

    DistortionDiagnostics diag;
    diag.gamma = spectral_norm(deviation);
    diag.sigma_max = spectral_norm(M);

    // Head = singular directions of M with sigma^2 >= lambda (ties included).
    Eigen::BDCSVD<DenseMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Index head = 0;
    while (head < sv.size() && sv(head) * sv(head) >= lambda) ++head;
    diag.head_rank = head;

    // [M_h, b]; distortion depends only on its column space, so the head is
    // carried by U_h Sigma_h.
    DenseMatrix head_aug(n, head + 1);
    if (head > 0)
        head_aug.leftCols(head) =
            svd.matrixU().leftCols(head) * sv.head(head).asDiagonal();
    head_aug.rightCols(1) = b;
    if (head_aug.squaredNorm() == 0.0) {
        diag.c_h = 1.0;
        diag.K = 1.0;
        diag.kappa = 1.0;
    } else {
        const DistortionDiagnostics head_diag = distortion_factors(S, head_aug);
        diag.K = head_diag.K;
        diag.kappa = head_diag.kappa;
        diag.c_h = (diag.kappa > 0.0)
                       ? std::max(diag.K, 1.0 / diag.kappa)
                       : std::numeric_limits<double>::infinity();
    }
    diag.alpha = diag.c_h * (1.0 + diag.gamma);
    return diag;
}

double amm_error(const DenseMatrix& S, const DenseMatrix& A,
                 const DenseMatrix& B) {
    if (A.rows() != B.rows())
        throw std::invalid_argument("amm_error: A and B must share row count");
    if (S.cols() != A.rows())
        throw std::invalid_argument("amm_error: S columns must match A rows");
    const DenseMatrix SA = S * A;
    const DenseMatrix SB = S * B;
    return spectral_norm(SA.transpose() * SB - A.transpose() * B);
}

} // namespace rwlra
