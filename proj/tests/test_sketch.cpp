#include <doctest.h>

#include <cmath>

#include "rwlra/rng.hpp"
#include "rwlra/sketch.hpp"
#include "rwlra/spectral.hpp"

using namespace rwlra;

namespace {

DenseMatrix random_matrix(Index n, Index d, std::uint64_t seed) {
    CounterRng rng(seed);
    DenseMatrix M(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) M(i, j) = rng.next_gaussian();
    return M;
}

} // namespace

TEST_CASE("countsketch has one +-1 per column") {
    const SketchSpec spec{SketchKind::CountSketch, 7, 42};
    const DenseMatrix S = sample_sketch(spec, 90);
    for (Index j = 0; j < S.cols(); ++j) {
        CHECK(S.col(j).cwiseAbs().sum() == 1.0);
        CHECK(S.col(j).cwiseAbs().maxCoeff() == 1.0);
    }
}

TEST_CASE("gaussian entries have variance 1/l") {
    const Index ell = 1000;
    const DenseMatrix S = sample_sketch({SketchKind::Gaussian, ell, 3}, 1);
    const double mean = S.col(0).mean();
    const double var =
        (S.col(0).array() - mean).square().sum() / static_cast<double>(ell - 1);
    const double expected = 1.0 / static_cast<double>(ell);
    CHECK(var >= 0.9 * expected);
    CHECK(var <= 1.1 * expected);
}

TEST_CASE("identical spec realizes the identical matrix") {
    for (SketchKind kind : {SketchKind::Gaussian, SketchKind::CountSketch}) {
        const SketchSpec spec{kind, 9, 777};
        const DenseMatrix a = sample_sketch(spec, 33);
        const DenseMatrix b = sample_sketch(spec, 33);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        // Different seed realizes a different matrix.
        const DenseMatrix c = sample_sketch({kind, 9, 778}, 33);
        CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("fast application agrees with the dense realization") {
    const DenseMatrix M = random_matrix(40, 6, 5);
    const DenseMatrix N = random_matrix(6, 40, 6);
    const Vector x = random_matrix(40, 1, 7).col(0);
    for (SketchKind kind : {SketchKind::Gaussian, SketchKind::CountSketch}) {
        const SketchOp op({kind, 11, 99}, 40);
        const DenseMatrix S = op.matrix();
        CHECK((op.apply(M) - S * M).norm() <= 1e-12 * (S * M).norm() + 1e-14);
        CHECK((op.apply(x) - S * x).norm() <= 1e-12 * (S * x).norm() + 1e-14);
        CHECK((op.apply_right(N) - N * S.transpose()).norm() <=
              1e-12 * (N * S.transpose()).norm() + 1e-14);
    }
}

TEST_CASE("recommended sketch size formula") {
    CHECK(recommended_sketch_size(2.0, 0.5, 4.0) == 22);
    CHECK(recommended_sketch_size(0.0, 0.5, 4.0) == 6);
    CHECK(recommended_sketch_size(3.0, 0.5) == 30);

    // Monotone nondecreasing in s, nonincreasing in epsilon.
    Index prev = 0;
    for (double s : {0.0, 1.0, 2.0, 5.0, 9.0}) {
        const Index ell = recommended_sketch_size(s, 0.3);
        CHECK(ell >= prev);
        prev = ell;
    }
    prev = recommended_sketch_size(2.0, 0.05);
    for (double eps : {0.1, 0.2, 0.5, 0.9}) {
        const Index ell = recommended_sketch_size(2.0, eps);
        CHECK(ell <= prev);
        prev = ell;
    }

    CHECK_THROWS_AS(recommended_sketch_size(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(recommended_sketch_size(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(recommended_sketch_size(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("distortion factors on explicit sketches") {
    const DenseMatrix M = random_matrix(12, 4, 8);

    SUBCASE("identity sketch") {
        const DenseMatrix I = DenseMatrix::Identity(12, 12);
        const DistortionDiagnostics d = distortion_factors(I, M);
        CHECK(d.K == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(d.kappa == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("uniform scaling squares") {
        const DenseMatrix S2 = 2.0 * DenseMatrix::Identity(12, 12);
        const DistortionDiagnostics d = distortion_factors(S2, M);
        CHECK(d.K == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(d.kappa == doctest::Approx(4.0).epsilon(1e-10));
    }
    SUBCASE("too few rows force kappa to zero") {
        const DenseMatrix S =
            sample_sketch({SketchKind::Gaussian, 3, 13}, 12); // rank(M) - 1
        const DistortionDiagnostics d = distortion_factors(S, M);
        CHECK(d.kappa == 0.0);
        CHECK(d.K > 0.0);
    }
    SUBCASE("zero matrix is an error") {
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 6, 14}, 12);
        CHECK_THROWS_AS(distortion_factors(S, DenseMatrix::Zero(12, 2)),
                        std::invalid_argument);
    }
}

TEST_CASE("distortion invariants on real sketch draws") {
    const DenseMatrix M = random_matrix(30, 5, 15);
    // K >= 1 and kappa <= 1 for unit-variance sketch distributions; with
    // l >= n the Gaussian kappa never vanishes.
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const DenseMatrix S =
            sample_sketch({SketchKind::Gaussian, 30, seed}, 30);
        const DistortionDiagnostics d = distortion_factors(S, M);
        CHECK(d.K >= 1.0 - 1e-9);
        CHECK(d.kappa <= 1.0 + 1e-9);
        CHECK(d.kappa > 0.0);
        // c_S is the larger of the two one-sided distortions.
        const double c_S = std::max(d.K, 1.0 / d.kappa);
        CHECK(c_S >= d.K);
        CHECK(c_S >= 1.0 / d.kappa);
    }
}

TEST_CASE("sketches preserve norms in expectation") {
    Vector x = random_matrix(64, 1, 16).col(0);
    x.normalize();
    for (SketchKind kind : {SketchKind::Gaussian, SketchKind::CountSketch}) {
        double total = 0.0;
        const int samples = 1000;
        for (int s = 0; s < samples; ++s) {
            const SketchOp op({kind, 12, static_cast<std::uint64_t>(s)}, 64);
            total += op.apply(x).squaredNorm();
        }
        const double mean = total / samples;
        CHECK(mean >= 0.95);
        CHECK(mean <= 1.05);
    }
}

TEST_CASE("gamma/alpha diagnostics") {
    const DenseMatrix M = random_matrix(20, 4, 17);
    const Vector b = random_matrix(20, 1, 18).col(0);

    SUBCASE("identity sketch gives the clean regime") {
        const DenseMatrix I = DenseMatrix::Identity(20, 20);
        const DistortionDiagnostics d = gamma_alpha_diagnostics(I, M, b, 0.5);
        CHECK(d.gamma <= 1e-9);
        CHECK(d.c_h == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.alpha == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("alpha = c_h (1 + gamma) exactly") {
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 10, 19}, 20);
        const DistortionDiagnostics d = gamma_alpha_diagnostics(S, M, b, 0.5);
        CHECK(d.alpha == d.c_h * (1.0 + d.gamma));
    }
    SUBCASE("small lambda puts the whole spectrum in the head") {
        const Vector sv = singular_values(M);
        const double lambda = 0.5 * sv(3) * sv(3);
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 12, 20}, 20);
        const DistortionDiagnostics d =
            gamma_alpha_diagnostics(S, M, b, lambda);
        CHECK(d.head_rank == 4);
    }
    SUBCASE("lambda = 0 is rejected") {
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 10, 21}, 20);
        CHECK_THROWS_AS(gamma_alpha_diagnostics(S, M, b, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("Pr[alpha > 1.1] decreases as l grows") {
    // sd ~= 2 design: two strong directions, two weak ones.
    DenseMatrix M = random_matrix(60, 4, 22);
    {
        Eigen::BDCSVD<DenseMatrix> svd(M, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
        Vector sv(4);
        sv << 10.0, 10.0, 0.05, 0.05;
        M = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
    }
    const Vector b = random_matrix(60, 1, 23).col(0);
    const double lambda = 1.0;

    const Index ell_small = recommended_sketch_size(2.0, 0.5);
    const Index ell_large = 64 * ell_small;
    auto tail_freq = [&](Index ell) {
        int over = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            const DenseMatrix S = sample_sketch(
                {SketchKind::Gaussian, ell, static_cast<std::uint64_t>(t)}, 60);
            const DistortionDiagnostics d =
                gamma_alpha_diagnostics(S, M, b, lambda);
            if (d.alpha > 1.1) ++over;
        }
        return static_cast<double>(over) / trials;
    };
    const double freq_small = tail_freq(ell_small);
    const double freq_large = tail_freq(ell_large);
    CHECK(freq_large <= freq_small);
    CHECK(freq_large < 1.0);
}

TEST_CASE("approximate matrix product error") {
    const DenseMatrix A = random_matrix(25, 3, 24);
    const DenseMatrix B = random_matrix(25, 4, 25);

    SUBCASE("identity sketch is exact") {
        CHECK(amm_error(DenseMatrix::Identity(25, 25), A, B) == 0.0);
    }
    SUBCASE("zero operand") {
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 8, 26}, 25);
        CHECK(amm_error(S, DenseMatrix::Zero(25, 3), B) == 0.0);
    }
    SUBCASE("unit column concentrates") {
        DenseMatrix u = random_matrix(25, 1, 27);
        u /= u.norm();
        int good = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            const DenseMatrix S = sample_sketch(
                {SketchKind::Gaussian, 400, static_cast<std::uint64_t>(t)}, 25);
            if (amm_error(S, u, u) < 0.5) ++good;
        }
        CHECK(good >= 190); // >= 95%
    }
    SUBCASE("shape mismatch") {
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 8, 28}, 25);
        CHECK_THROWS_AS(amm_error(S, A, random_matrix(24, 4, 29)),
                        std::invalid_argument);
    }
}
