#include "rwlra/ridge.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rwlra/rng.hpp"

namespace rwlra {

namespace {

void require_ridge_shapes(const RidgeProblem& p) {
    if (p.M.rows() != p.b.size())
        throw std::invalid_argument("RidgeProblem: M has " +
                                    std::to_string(p.M.rows()) +
                                    " rows but b has length " +
                                    std::to_string(p.b.size()));
    if (p.lambda < 0.0)
        throw std::invalid_argument("RidgeProblem: lambda must be >= 0");
}

} // namespace

Vector ridge_solve(const RidgeProblem& p) {
    require_ridge_shapes(p);
    const Index k = p.M.cols();
    if (p.lambda == 0.0) {
        // Exact path: minimum-norm least squares (covers rank deficiency).
        return p.M.completeOrthogonalDecomposition().solve(p.b);
    }
    DenseMatrix G = p.lambda * DenseMatrix::Identity(k, k);
    G.selfadjointView<Eigen::Lower>().rankUpdate(p.M.transpose());
    Eigen::LLT<DenseMatrix, Eigen::Lower> llt(G);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("ridge_solve: normal equations not positive "
                                 "definite (non-finite input?)");
    return llt.solve(p.M.transpose() * p.b);
}

Vector sketched_ridge_solve(const RidgeProblem& p, const DenseMatrix& S) {
    require_ridge_shapes(p);
    if (S.cols() != p.M.rows())
        throw std::invalid_argument("sketched_ridge_solve: S has " +
                                    std::to_string(S.cols()) +
                                    " columns but the problem has " +
                                    std::to_string(p.M.rows()) + " rows");
    return ridge_solve({S * p.M, S * p.b, p.lambda});
}

double ridge_objective(const RidgeProblem& p, const Vector& x) {
    return (p.M * x - p.b).squaredNorm() + p.lambda * x.squaredNorm();
}

double batch_objective_ratio(const std::vector<RidgeProblem>& problems,
                             const DenseMatrix& S) {
    if (problems.empty())
        throw std::invalid_argument("batch_objective_ratio: empty batch");
    double optimum = 0.0;
    double sketched = 0.0;
    for (const RidgeProblem& p : problems) {
        const Vector x = ridge_solve(p);
        const Vector y = sketched_ridge_solve(p, S);
        optimum += ridge_objective(p, x);
        sketched += ridge_objective(p, y);
    }
    if (optimum == 0.0) return 1.0;
    return sketched / optimum;
}

namespace {

void require_symmetric_square(const DenseMatrix& A, const char* name) {
    if (A.rows() != A.cols())
        throw std::invalid_argument(std::string(name) + " must be square");
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument(std::string(name) + " must be symmetric");
}

} // namespace

RichardsonResult richardson_solve(const DenseMatrix& A, const DenseMatrix& B,
                                  const Vector& b,
                                  const RichardsonConfig& cfg) {
    require_symmetric_square(A, "richardson_solve: A");
    require_symmetric_square(B, "richardson_solve: B");
    if (A.rows() != B.rows() || A.rows() != b.size())
        throw std::invalid_argument("richardson_solve: dimension mismatch");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        throw std::invalid_argument("richardson_solve: eta must be in (0, 1]");
    if (!(cfg.tau > 0.0))
        throw std::invalid_argument("richardson_solve: tau must be > 0");
    if (cfg.max_iters < 1)
        throw std::invalid_argument("richardson_solve: max_iters must be >= 1");

    Eigen::LLT<DenseMatrix, Eigen::Lower> lltA(A);
    if (lltA.info() != Eigen::Success)
        throw std::runtime_error(
            "richardson_solve: A is not positive definite (Cholesky failed)");
    Eigen::LLT<DenseMatrix, Eigen::Lower> lltB(B);
    if (lltB.info() != Eigen::Success)
        throw std::runtime_error(
            "richardson_solve: B is not positive definite (Cholesky failed)");

    RichardsonResult result;

    if (cfg.check_containment) {
        // Probabilistic containment check: eta x'Ax <= x'Bx <= x'Ax should
        // hold for every x; 20 random Rayleigh probes catch gross violations.
        CounterRng rng(0x636f6e7461696eULL, static_cast<std::uint64_t>(A.rows()));
        Vector probe(A.rows());
        for (int trial = 0; trial < 20 && !result.containment_warning; ++trial) {
            for (Index i = 0; i < probe.size(); ++i)
                probe(i) = rng.next_gaussian();
            const double qa = probe.dot(A * probe);
            const double qb = probe.dot(B * probe);
            const double slack = 1e-9 * std::max(qa, qb);
            if (cfg.eta * qa > qb + slack || qb > qa + slack)
                result.containment_warning = true;
        }
    }
    if (cfg.exact_containment_check) {
        // eta A <= B <= A  <=>  eigenvalues of L_B^{-1} A L_B^{-T} lie in
        // [1, 1/eta].
        const DenseMatrix L = lltB.matrixL();
        const DenseMatrix Y =
            L.triangularView<Eigen::Lower>().solve(DenseMatrix(A));
        const DenseMatrix C =
            L.triangularView<Eigen::Lower>().solve(DenseMatrix(Y.transpose()));
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(
            DenseMatrix(0.5 * (C + C.transpose())), Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo < 1.0 - 1e-9 || hi > 1.0 / cfg.eta + 1e-9)
            result.containment_warning = true;
    }

    Vector x = Vector::Zero(b.size());
    Vector r = -b;
    int iters = 0;
    while (iters < cfg.max_iters) {
        if (r.norm() <= cfg.tau) {
            result.converged = true;
            break;
        }
        x -= cfg.eta * lltB.solve(r);
        ++iters;
        r.noalias() = A * x - b;
    }
    if (r.norm() <= cfg.tau) result.converged = true;

    result.x = std::move(x);
    result.iterations = iters;
    result.final_residual_norm = r.norm();
    result.polynomial_degree = iters;
    return result;
}

Vector richardson_polynomial_iterate(const DenseMatrix& A,
                                     const DenseMatrix& B, const Vector& b,
                                     double eta, int t) {
    Eigen::LLT<DenseMatrix, Eigen::Lower> lltB(B);
    if (lltB.info() != Eigen::Success)
        throw std::runtime_error("richardson_polynomial_iterate: B is not "
                                 "positive definite");
    // eta * sum_{j=0}^{t-1} (I - eta B^{-1} A)^j B^{-1} b, term by term.
    Vector term = lltB.solve(b);
    Vector acc = Vector::Zero(b.size());
    for (int j = 0; j < t; ++j) {
        acc += eta * term;
        term -= eta * lltB.solve(Vector(A * term));
    }
    return acc;
}

Preconditioner build_preconditioner(const DenseMatrix& factor,
                                    const DenseMatrix& S, double l_W,
                                    double u_W, Index n) {
    if (!(l_W > 0.0))
        throw std::invalid_argument("build_preconditioner: l_W must be > 0");
    if (u_W < l_W)
        throw std::invalid_argument("build_preconditioner: need l_W <= u_W");
    if (n < 2)
        throw std::invalid_argument("build_preconditioner: n must be >= 2");
    if (S.cols() != factor.rows())
        throw std::invalid_argument(
            "build_preconditioner: S columns must match factor rows");
    const double logn = std::log2(static_cast<double>(n));
    const DenseMatrix SR = S * (l_W * factor);
    Preconditioner pre;
    pre.B = (SR.transpose() * SR) / logn;
    pre.eta = 1.0 / (logn * logn * (u_W / l_W));
    return pre;
}

Preconditioner build_preconditioner(const DenseMatrix& factor, double l_W,
                                    double u_W, Index n) {
    if (!(l_W > 0.0))
        throw std::invalid_argument("build_preconditioner: l_W must be > 0");
    if (u_W < l_W)
        throw std::invalid_argument("build_preconditioner: need l_W <= u_W");
    if (n < 2)
        throw std::invalid_argument("build_preconditioner: n must be >= 2");
    const double logn = std::log2(static_cast<double>(n));
    const DenseMatrix R = l_W * factor;
    Preconditioner pre;
    pre.B = (R.transpose() * R) / logn;
    pre.eta = 1.0 / (logn * logn * (u_W / l_W));
    return pre;
}

} // namespace rwlra
