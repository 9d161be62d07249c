#include <doctest.h>

#include <cmath>

#include "rwlra/ridge.hpp"
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

Vector random_vector(Index n, std::uint64_t seed) {
    CounterRng rng(seed);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.next_gaussian();
    return v;
}

/// Independent oracle: plain gradient descent with a conservative step.
Vector gradient_descent_ridge(const RidgeProblem& p, int iters) {
    const double top = spectral_norm(p.M);
    const double step = 1.0 / (top * top + p.lambda);
    Vector x = Vector::Zero(p.M.cols());
    for (int i = 0; i < iters; ++i) {
        const Vector grad =
            p.M.transpose() * (p.M * x - p.b) + p.lambda * x;
        x -= step * grad;
    }
    return x;
}

} // namespace

TEST_CASE("ridge solve closed-form cases") {
    SUBCASE("scalar problem") {
        DenseMatrix M(2, 1);
        M << 1, 0;
        Vector b(2);
        b << 1, 1;
        const Vector x = ridge_solve({M, b, 1.0});
        CHECK(x(0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("zero rhs") {
        const Vector x = ridge_solve({random_matrix(6, 3, 1), Vector::Zero(6), 2.0});
        CHECK(x.norm() == 0.0);
    }
    SUBCASE("matches a long gradient-descent run") {
        const RidgeProblem p{random_matrix(8, 3, 2), random_vector(8, 3), 0.8};
        const Vector x = ridge_solve(p);
        const Vector oracle = gradient_descent_ridge(p, 20000);
        CHECK((x - oracle).norm() <= 1e-6 * std::max(1.0, oracle.norm()));
    }
}

TEST_CASE("ridge solve stationarity and optimality") {
    const RidgeProblem p{random_matrix(12, 4, 4), random_vector(12, 5), 0.3};
    const Vector x = ridge_solve(p);

    const double grad_norm =
        (p.M.transpose() * (p.M * x - p.b) + p.lambda * x).norm();
    CHECK(grad_norm <=
          1e-8 * ((p.M.transpose() * p.b).norm() + p.lambda * x.norm()));

    // Any unit-scaled perturbation strictly increases the objective.
    const double base = ridge_objective(p, x);
    CounterRng rng(6);
    for (int probe = 0; probe < 100; ++probe) {
        Vector delta(4);
        for (Index i = 0; i < 4; ++i) delta(i) = rng.next_gaussian();
        delta *= 1e-3 / delta.norm();
        CHECK(ridge_objective(p, x + delta) > base);
    }
}

TEST_CASE("lambda = 0 returns the minimum-norm solution") {
    DenseMatrix M(2, 2);
    M << 1, 1, 1, 1; // rank deficient
    Vector b(2);
    b << 2, 2;
    const Vector x = ridge_solve({M, b, 0.0});
    CHECK((M * x - b).norm() <= 1e-10);
    // Minimum-norm solution of x1 + x2 = 2 is (1, 1).
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sketched ridge solve") {
    const RidgeProblem p{random_matrix(20, 4, 7), random_vector(20, 8), 0.5};

    SUBCASE("identity sketch equals the exact solver") {
        const Vector y =
            sketched_ridge_solve(p, DenseMatrix::Identity(20, 20));
        const Vector x = ridge_solve(p);
        CHECK((y - x).norm() <= 1e-10 * x.norm());
    }
    SUBCASE("zero sketch leaves the pure regularizer") {
        CHECK(sketched_ridge_solve(p, DenseMatrix::Zero(6, 20)).norm() == 0.0);
    }
    SUBCASE("recommended size keeps the objective competitive") {
        const double s = statistical_dimension(p.M, p.lambda);
        const Index ell = recommended_sketch_size(s, 0.5);
        const double opt = ridge_objective(p, ridge_solve(p));
        int good = 0;
        for (int t = 0; t < 100; ++t) {
            const DenseMatrix S = sample_sketch(
                {SketchKind::Gaussian, ell, static_cast<std::uint64_t>(t)}, 20);
            const double val = ridge_objective(p, sketched_ridge_solve(p, S));
            if (val <= 1.5 * opt) ++good;
        }
        CHECK(good >= 80);
    }
}

TEST_CASE("batch objective ratio") {
    std::vector<RidgeProblem> batch;
    for (int i = 0; i < 6; ++i)
        batch.push_back({random_matrix(15, 3, 100 + i),
                         random_vector(15, 200 + i), 0.4});

    SUBCASE("identity sketch gives ratio one") {
        CHECK(batch_objective_ratio(batch, DenseMatrix::Identity(15, 15)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("all-zero right-hand sides give ratio one") {
        std::vector<RidgeProblem> zeros = batch;
        for (auto& p : zeros) p.b.setZero();
        const DenseMatrix S = sample_sketch({SketchKind::Gaussian, 8, 9}, 15);
        CHECK(batch_objective_ratio(zeros, S) == 1.0);
    }
    SUBCASE("ratio is never below one") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const DenseMatrix S =
                sample_sketch({SketchKind::Gaussian, 10, seed}, 15);
            CHECK(batch_objective_ratio(batch, S) >= 1.0 - 1e-9);
        }
    }
    SUBCASE("empty batch is an error") {
        CHECK_THROWS_AS(
            batch_objective_ratio({}, DenseMatrix::Identity(4, 4)),
            std::invalid_argument);
    }
}

TEST_CASE("median batch ratio is nonincreasing as l doubles") {
    // sd ~= 2 ensemble so the interesting range sits below k.
    std::vector<RidgeProblem> batch;
    for (int i = 0; i < 10; ++i) {
        DenseMatrix M = random_matrix(60, 6, 300 + i);
        Eigen::BDCSVD<DenseMatrix> svd(M, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
        Vector sv(6);
        sv << 10, 10, 0.07, 0.07, 0.07, 0.07;
        M = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
        batch.push_back({M, random_vector(60, 400 + i), 1.0});
    }
    auto median_ratio = [&](Index ell) {
        std::vector<double> ratios;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const DenseMatrix S =
                sample_sketch({SketchKind::Gaussian, ell, seed}, 60);
            ratios.push_back(batch_objective_ratio(batch, S));
        }
        std::sort(ratios.begin(), ratios.end());
        return ratios[ratios.size() / 2];
    };
    const double r1 = median_ratio(8);
    const double r2 = median_ratio(16);
    const double r4 = median_ratio(32);
    CHECK(r2 <= r1);
    CHECK(r4 <= r2);
}

TEST_CASE("richardson iteration") {
    SUBCASE("one step when B = A and eta = 1") {
        const DenseMatrix I = DenseMatrix::Identity(3, 3);
        const Vector b = random_vector(3, 10);
        RichardsonConfig cfg;
        cfg.eta = 1.0;
        cfg.max_iters = 10;
        cfg.tau = 1e-12;
        const RichardsonResult res = richardson_solve(I, I, b, cfg);
        CHECK(res.iterations == 1);
        CHECK((res.x - b).norm() <= 1e-14);
        CHECK(res.converged);
    }
    SUBCASE("zero rhs stays at zero") {
        const DenseMatrix I = DenseMatrix::Identity(3, 3);
        RichardsonConfig cfg;
        cfg.tau = 1e-12;
        const RichardsonResult res =
            richardson_solve(I, I, Vector::Zero(3), cfg);
        CHECK(res.iterations == 0);
        CHECK(res.x.norm() == 0.0);
    }
    SUBCASE("diagonal system within the iteration bound") {
        DenseMatrix A(2, 2);
        A << 1, 0, 0, 10;
        const DenseMatrix B = DenseMatrix::Identity(2, 2);
        Vector b(2);
        b << 3, -2;
        Vector exact(2);
        exact << 3.0, -0.2;
        const int bound =
            static_cast<int>(std::ceil(std::log(1.0 / 1e-6) / 0.1));
        RichardsonConfig cfg;
        cfg.eta = 0.1;
        cfg.max_iters = bound;
        cfg.tau = 1e-300;
        const RichardsonResult res = richardson_solve(A, B, b, cfg);
        CHECK((res.x - exact).norm() <= 1e-6 * exact.norm());
        CHECK_FALSE(res.containment_warning);
    }
    SUBCASE("error contracts in the A-norm at every iteration") {
        const DenseMatrix Q = [&] {
            Eigen::HouseholderQR<DenseMatrix> qr(random_matrix(5, 5, 11));
            return DenseMatrix(qr.householderQ());
        }();
        Vector eigs(5);
        eigs << 1, 2, 5, 20, 80;
        const DenseMatrix A = Q * eigs.asDiagonal() * Q.transpose();
        const double eta = 0.25;
        const DenseMatrix B =
            eta * A + (1 - eta) * eigs.minCoeff() * DenseMatrix::Identity(5, 5);
        const Vector b = random_vector(5, 12);
        const Vector exact = Eigen::LLT<DenseMatrix>(A).solve(b);
        auto a_norm = [&](const Vector& v) {
            return std::sqrt(v.dot(A * v));
        };
        double prev = a_norm(exact); // error of x_0 = 0
        for (int t = 1; t <= 40; ++t) {
            RichardsonConfig cfg;
            cfg.eta = eta;
            cfg.max_iters = t;
            cfg.tau = 1e-300;
            const RichardsonResult res = richardson_solve(A, B, b, cfg);
            const double err = a_norm(res.x - exact);
            CHECK(err <= prev * (1.0 + 1e-12));
            prev = err;
        }
    }
    SUBCASE("iterate equals the explicit matrix polynomial") {
        const DenseMatrix M = random_matrix(6, 4, 13);
        DenseMatrix A = 0.5 * DenseMatrix::Identity(4, 4);
        A.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
        A = DenseMatrix(A.selfadjointView<Eigen::Lower>());
        const DenseMatrix B =
            0.4 * A + 0.6 * 0.5 * DenseMatrix::Identity(4, 4);
        const Vector b = random_vector(4, 14);
        RichardsonConfig cfg;
        cfg.eta = 0.4;
        cfg.max_iters = 17;
        cfg.tau = 1e-300;
        const RichardsonResult res = richardson_solve(A, B, b, cfg);
        CHECK(res.polynomial_degree == 17);
        const Vector poly = richardson_polynomial_iterate(A, B, b, 0.4, 17);
        CHECK((res.x - poly).norm() <= 1e-10 * poly.norm());
    }
    SUBCASE("non positive definite input is an error") {
        DenseMatrix bad(2, 2);
        bad << 1, 0, 0, -1;
        const DenseMatrix I = DenseMatrix::Identity(2, 2);
        RichardsonConfig cfg;
        CHECK_THROWS_AS(richardson_solve(bad, I, random_vector(2, 15), cfg),
                        std::runtime_error);
        CHECK_THROWS_AS(richardson_solve(I, bad, random_vector(2, 15), cfg),
                        std::runtime_error);
    }
    SUBCASE("containment violation warns but does not throw") {
        const DenseMatrix I = DenseMatrix::Identity(3, 3);
        const DenseMatrix B = 2.0 * I; // B is not below A
        RichardsonConfig cfg;
        cfg.eta = 0.5;
        cfg.max_iters = 50;
        cfg.tau = 1e-12;
        const RichardsonResult res =
            richardson_solve(I, B, random_vector(3, 16), cfg);
        CHECK(res.containment_warning);
    }
    SUBCASE("exact containment check flags a subtle violation") {
        const DenseMatrix I = DenseMatrix::Identity(3, 3);
        DenseMatrix B = I;
        B(0, 0) = 1.01; // just above A in one direction
        RichardsonConfig cfg;
        cfg.eta = 0.9;
        cfg.max_iters = 5;
        cfg.tau = 1e-12;
        cfg.check_containment = false;
        cfg.exact_containment_check = true;
        const RichardsonResult res =
            richardson_solve(I, B, random_vector(3, 17), cfg);
        CHECK(res.containment_warning);
    }
}

TEST_CASE("preconditioner construction") {
    const Index rows = 40, k = 5;
    const DenseMatrix F = random_matrix(rows, k, 18);

    SUBCASE("uniform weights make B proportional to the true Gram") {
        const double w = 3.0;
        const DenseMatrix S =
            sample_sketch({SketchKind::Gaussian, 12, 19}, rows);
        const Preconditioner pre = build_preconditioner(F, S, w, w, 64);
        const DenseMatrix SWF = S * (w * F);
        const DenseMatrix gram = SWF.transpose() * SWF;
        // log2(64) = 6.
        CHECK((pre.B - gram / 6.0).norm() <= 1e-10 * gram.norm());
        CHECK(pre.eta == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
    }
    SUBCASE("identity sketch and n = 2 reduce to the scaled Gram") {
        const Preconditioner pre = build_preconditioner(F, 2.0, 2.0, 2);
        const DenseMatrix R = 2.0 * F;
        CHECK((pre.B - R.transpose() * R).norm() <= 1e-12 * pre.B.norm());
        CHECK(pre.eta == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("bad parameters") {
        CHECK_THROWS_AS(build_preconditioner(F, 0.0, 1.0, 8),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_preconditioner(F, 2.0, 1.0, 8),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_preconditioner(F, 1.0, 2.0, 1),
                        std::invalid_argument);
    }
    SUBCASE("richardson with the constructed B meets its bound") {
        const double l_W = 1.0, u_W = 10.0, lambda = 1.0;
        CounterRng rng(20);
        Vector w(rows);
        for (Index i = 0; i < rows; ++i)
            w(i) = l_W + (u_W - l_W) * rng.next_double();
        const DenseMatrix S =
            sample_sketch({SketchKind::Gaussian, 20, 21}, rows);
        const DenseMatrix SDF =
            S * DenseMatrix(w.asDiagonal() * F);
        DenseMatrix G = lambda * DenseMatrix::Identity(k, k);
        G.selfadjointView<Eigen::Lower>().rankUpdate(SDF.transpose());
        G = DenseMatrix(G.selfadjointView<Eigen::Lower>());
        const Preconditioner pre = build_preconditioner(F, S, l_W, u_W, rows);

        const Vector rhs = random_vector(k, 22);
        const Vector exact = Eigen::LLT<DenseMatrix>(G).solve(rhs);
        const Vector svB = singular_values(pre.B);
        const double c_B = (svB(0) / svB(k - 1)) * (svB(0) / svB(k - 1));
        const int bound = static_cast<int>(
            std::ceil(2.0 * std::log(c_B / 1e-6) / pre.eta));
        RichardsonConfig cfg;
        cfg.eta = pre.eta;
        cfg.max_iters = bound;
        cfg.tau = 1e-6 * singular_values(G).minCoeff() * exact.norm();
        cfg.check_containment = false;
        const RichardsonResult res = richardson_solve(G, pre.B, rhs, cfg);
        CHECK((res.x - exact).norm() <= 1e-6 * exact.norm());
        CHECK(res.iterations <= bound);
    }
}
