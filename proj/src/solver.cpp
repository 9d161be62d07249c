#include "rwlra/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rwlra/rng.hpp"
#include "rwlra/spectral.hpp"

namespace rwlra {

namespace {

struct StepStats {
    int containment_warnings = 0;
};

/// Solve min ||M x - b||^2 + lambda ||x||^2 under the requested solver.
Vector solve_row_problem(DenseMatrix M, Vector b, double lambda,
                         const BestResponseOptions& opt, double tau_per_row,
                         const Preconditioner* pre, StepStats* stats) {
    if (opt.solver == RidgeSolverKind::Direct)
        return ridge_solve({std::move(M), std::move(b), lambda});

    if (lambda <= 0.0)
        throw std::invalid_argument(
            "best response: iterative solvers require lambda > 0");
    const Index k = M.cols();
    DenseMatrix G = lambda * DenseMatrix::Identity(k, k);
    G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
    G = DenseMatrix(G.selfadjointView<Eigen::Lower>());
    const Vector rhs = M.transpose() * b;

    RichardsonConfig cfg;
    cfg.max_iters = opt.max_iters;
    cfg.tau = tau_per_row;
    DenseMatrix B;
    if (opt.solver == RidgeSolverKind::Richardson) {
        // Unpreconditioned: B = lambda I sits below G + lambda I, and
        // eta = lambda / lambda_max makes eta A <= B tight.
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(G,
                                                       Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        cfg.eta = std::min(1.0, lambda / top);
        B = lambda * DenseMatrix::Identity(k, k);
    } else {
        // The containment behind the contract eta only holds with high
        // probability. Measure the top generalized eigenvalue of (B, G) and
        // shrink the step whenever the event failed, so the iteration stays
        // contractive for any weight matrix.
        B = pre->B;
        Eigen::LLT<DenseMatrix, Eigen::Lower> lltB(B);
        if (lltB.info() != Eigen::Success)
            throw std::runtime_error(
                "best response: preconditioner is not positive definite");
        const DenseMatrix L = lltB.matrixL();
        const DenseMatrix Y =
            L.triangularView<Eigen::Lower>().solve(G);
        const DenseMatrix C = L.triangularView<Eigen::Lower>().solve(
            DenseMatrix(Y.transpose()));
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(
            DenseMatrix(0.5 * (C + C.transpose())), Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        cfg.eta = std::min({1.0, pre->eta, 0.95 / top});
        cfg.check_containment = false; // replaced by the exact top bound
        if (stats && pre->eta * top > 1.0) ++stats->containment_warnings;
    }
    const RichardsonResult res = richardson_solve(G, B, rhs, cfg);
    if (stats && res.containment_warning) ++stats->containment_warnings;
    return res.x;
}

DenseMatrix response_rows(const WlraProblem& p, const DenseMatrix& V,
                          const SketchOp* sketch,
                          const BestResponseOptions& opt, StepStats* stats) {
    if (V.cols() != p.d())
        throw std::invalid_argument("best_response_U: V must have d columns");
    if (sketch && sketch->cols() != p.d())
        throw std::invalid_argument(
            "best_response_U: sketch ambient must equal d");
    const Index n = p.n();
    const Index k = V.rows();
    const double tau_row = opt.tau / static_cast<double>(n);

    Preconditioner pre;
    if (opt.solver == RidgeSolverKind::PreconditionedRichardson) {
        const double l_W = p.W.minCoeff();
        const double u_W = p.W.maxCoeff();
        if (!(l_W > 0.0))
            throw std::invalid_argument(
                "best response: the preconditioned solver needs strictly "
                "positive weights");
        if (sketch)
            pre = build_preconditioner(V.transpose(), sketch->matrix(), l_W,
                                       u_W, n);
        else
            pre = build_preconditioner(V.transpose(), l_W, u_W, n);
        // Augmented-design Gram: the sqrt(lambda) I rows of the regularized
        // design contribute lambda I, scaled like the rest of B.
        pre.B += (p.lambda / std::log2(static_cast<double>(n))) *
                 DenseMatrix::Identity(k, k);
    }

    const DenseMatrix Vt = V.transpose(); // d x k, scaled per row below
    DenseMatrix U(n, k);
    for (Index i = 0; i < n; ++i) {
        const Vector w = p.W.row(i).transpose();
        DenseMatrix Mw = Vt.array().colwise() * w.array(); // D_{W_i} V^T
        Vector bw = p.A.row(i).transpose().cwiseProduct(w);
        if (sketch) {
            Mw = sketch->apply(Mw);
            bw = sketch->apply(bw);
        }
        U.row(i) = solve_row_problem(std::move(Mw), std::move(bw), p.lambda,
                                     opt, tau_row, &pre, stats)
                       .transpose();
    }
    return U;
}

DenseMatrix response_cols(const WlraProblem& p, const DenseMatrix& U,
                          const SketchOp* sketch,
                          const BestResponseOptions& opt, StepStats* stats) {
    if (U.rows() != p.n())
        throw std::invalid_argument("best_response_V: U must have n rows");
    if (sketch && sketch->cols() != p.n())
        throw std::invalid_argument(
            "best_response_V: sketch ambient must equal n");
    const Index d = p.d();
    const Index k = U.cols();
    const double tau_col = opt.tau / static_cast<double>(d);

    Preconditioner pre;
    if (opt.solver == RidgeSolverKind::PreconditionedRichardson) {
        const double l_W = p.W.minCoeff();
        const double u_W = p.W.maxCoeff();
        if (!(l_W > 0.0))
            throw std::invalid_argument(
                "best response: the preconditioned solver needs strictly "
                "positive weights");
        if (sketch)
            pre = build_preconditioner(U, sketch->matrix(), l_W, u_W, p.n());
        else
            pre = build_preconditioner(U, l_W, u_W, p.n());
        pre.B += (p.lambda / std::log2(static_cast<double>(p.n()))) *
                 DenseMatrix::Identity(k, k);
    }

    DenseMatrix V(k, d);
    for (Index j = 0; j < d; ++j) {
        const Vector w = p.W.col(j);
        DenseMatrix Mw = U.array().colwise() * w.array(); // D_{W_j} U
        Vector bw = p.A.col(j).cwiseProduct(w);
        if (sketch) {
            Mw = sketch->apply(Mw);
            bw = sketch->apply(bw);
        }
        V.col(j) = solve_row_problem(std::move(Mw), std::move(bw), p.lambda,
                                     opt, tau_col, &pre, stats);
    }
    return V;
}

/// k distinct indices from [0, bound) by partial Fisher-Yates.
std::vector<Index> sample_without_replacement(Index bound, Index k,
                                              CounterRng& rng) {
    std::vector<Index> pool(static_cast<std::size_t>(bound));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        const auto j =
            i + static_cast<Index>(rng.next_below(
                    static_cast<std::uint64_t>(bound - i)));
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

} // namespace

DenseMatrix best_response_U(const WlraProblem& p, const DenseMatrix& V,
                            const SketchOp* sketch,
                            const BestResponseOptions& opt) {
    return response_rows(p, V, sketch, opt, nullptr);
}

DenseMatrix best_response_V(const WlraProblem& p, const DenseMatrix& U,
                            const SketchOp* sketch,
                            const BestResponseOptions& opt) {
    return response_cols(p, U, sketch, opt, nullptr);
}

std::pair<Factorization, SolveReport>
alternating_minimization(const WlraProblem& p, const AmConfig& cfg) {
    if (cfg.iterations < 0)
        throw std::invalid_argument("alternating_minimization: iterations < 0");
    const auto t0 = std::chrono::steady_clock::now();

    const Index n = p.n();
    const Index d = p.d();
    const Index k = p.k;

    // U <- k columns of A, V <- k rows of A, without replacement.
    CounterRng col_rng(cfg.init_seed, 1);
    CounterRng row_rng(cfg.init_seed, 2);
    const auto col_idx = sample_without_replacement(d, k, col_rng);
    const auto row_idx = sample_without_replacement(n, k, row_rng);
    DenseMatrix U(n, k);
    DenseMatrix V(k, d);
    for (Index c = 0; c < k; ++c)
        U.col(c) = p.A.col(col_idx[static_cast<std::size_t>(c)]);
    for (Index r = 0; r < k; ++r)
        V.row(r) = p.A.row(row_idx[static_cast<std::size_t>(r)]);

    BestResponseOptions opt;
    opt.solver = cfg.solver;
    opt.tau = cfg.tau;
    opt.max_iters = cfg.richardson_max_iters;

    SolveReport report;
    report.transposed = p.transposed;
    report.objective_trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
    report.objective_trace.push_back(weighted_objective(p, U, V));

    StepStats stats;
    std::optional<SketchOp> su;
    std::optional<SketchOp> sv;
    auto realize = [&](int iteration) {
        const auto bump = static_cast<std::uint64_t>(iteration);
        if (cfg.sketch_u) {
            SketchSpec spec = *cfg.sketch_u;
            if (cfg.resample_each_iteration)
                spec.seed = hash_index(spec.seed, bump);
            su.emplace(spec, d);
        }
        if (cfg.sketch_v) {
            SketchSpec spec = *cfg.sketch_v;
            if (cfg.resample_each_iteration)
                spec.seed = hash_index(spec.seed, bump);
            sv.emplace(spec, n);
        }
    };
    realize(0);

    CounterRng est_rng(cfg.init_seed, 3);
    for (int it = 0; it < cfg.iterations; ++it) {
        if (cfg.resample_each_iteration && it > 0) realize(it);
        U = response_rows(p, V, su ? &*su : nullptr, opt, &stats);
        V = response_cols(p, U, sv ? &*sv : nullptr, opt, &stats);
        report.objective_trace.push_back(weighted_objective(p, U, V));

        // Refresh the s and sigma estimates from sampled scaled factors.
        double s_est = 0.0;
        double sigma_est = 0.0;
        const Index row_samples = std::min<Index>(n, 8);
        const Index col_samples = std::min<Index>(d, 8);
        for (Index t = 0; t < row_samples; ++t) {
            const auto i = static_cast<Index>(
                est_rng.next_below(static_cast<std::uint64_t>(n)));
            const DenseMatrix Vw = scale_cols(V, p.W.row(i).transpose());
            const Vector sv_vals = singular_values(Vw);
            s_est = std::max(s_est, statistical_dimension(sv_vals, Vw.rows(),
                                                          Vw.cols(), p.lambda));
            if (sv_vals.size()) sigma_est = std::max(sigma_est, sv_vals(0));
        }
        for (Index t = 0; t < col_samples; ++t) {
            const auto j = static_cast<Index>(
                est_rng.next_below(static_cast<std::uint64_t>(d)));
            const DenseMatrix Uw = scale_rows(p.W.col(j), U);
            const Vector sv_vals = singular_values(Uw);
            s_est = std::max(s_est, statistical_dimension(sv_vals, Uw.rows(),
                                                          Uw.cols(), p.lambda));
            if (sv_vals.size()) sigma_est = std::max(sigma_est, sv_vals(0));
        }
        report.s_estimate = s_est;
        report.sigma_estimate = sigma_est;
    }

    report.iterations = cfg.iterations;
    report.containment_warnings = stats.containment_warnings;
    report.final_objective = report.objective_trace.back();
    report.regularization_term =
        p.lambda * (U.squaredNorm() + V.squaredNorm());
    report.residual_term = report.final_objective - report.regularization_term;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    Factorization f{std::move(U), std::move(V), report.final_objective};
    return {std::move(f), std::move(report)};
}

Factorization svd_baseline(const DenseMatrix& A, int k) {
    if (k < 1 || k > std::min(A.rows(), A.cols()))
        throw std::invalid_argument("svd_baseline: need 1 <= k <= min(n, d)");
    Eigen::BDCSVD<DenseMatrix> svd(A,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
    Factorization f;
    f.U = svd.matrixU().leftCols(k) *
          svd.singularValues().head(k).asDiagonal();
    f.V = svd.matrixV().leftCols(k).transpose();
    return f;
}

RankReduction rank_reduce_projection(const DenseMatrix& W,
                                     const DenseMatrix& Spp, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(
            "rank_reduce_projection: epsilon must be in (0, 1)");
    if (Spp.cols() != W.rows())
        throw std::invalid_argument(
            "rank_reduce_projection: S'' columns must match W rows");
    const Index n = W.rows();
    const Index ell = Spp.rows();

    RankReduction out;
    out.epsilon = epsilon;

    Eigen::BDCSVD<DenseMatrix> svd(W, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    const int r = numerical_rank(sv, W.rows(), W.cols());
    if (r == 0) {
        out.P = DenseMatrix::Zero(n, n);
        out.k_prime = 0;
        return out;
    }
    const DenseMatrix Y =
        svd.matrixU().leftCols(r) * sv.head(r).asDiagonal(); // n x r

    // Stack S'' D_{Y_t} for t = 1..r; every S'' D_{W_j} is a linear
    // combination of these blocks, so their combined row space carries all
    // sketched column designs.
    DenseMatrix stacked(static_cast<Index>(r) * ell, n);
    for (int t = 0; t < r; ++t)
        stacked.middleRows(static_cast<Index>(t) * ell, ell) =
            Spp.array().rowwise() * Y.col(t).transpose().array();

    Eigen::BDCSVD<DenseMatrix> stacked_svd(stacked, Eigen::ComputeThinV);
    const int k_prime = numerical_rank(stacked_svd.singularValues(),
                                       stacked.rows(), stacked.cols());
    const DenseMatrix basis = stacked_svd.matrixV().leftCols(k_prime);
    out.P = basis * basis.transpose();
    out.k_prime = k_prime;
    return out;
}

namespace {

double round_to_power(double value, double epsilon) {
    if (value == 0.0) return 0.0;
    const double exponent =
        std::round(std::log(value) / std::log1p(epsilon));
    return std::pow(1.0 + epsilon, exponent);
}

Index count_distinct_rows(const DenseMatrix& M) {
    std::vector<Index> order(static_cast<std::size_t>(M.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [&](Index a, Index b) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (M(a, j) < M(b, j)) return true;
            if (M(a, j) > M(b, j)) return false;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    Index distinct = M.rows() > 0 ? 1 : 0;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (less(order[i - 1], order[i])) ++distinct;
    return distinct;
}

} // namespace

RoundedWeights round_weight_factors(const DenseMatrix& Y, const DenseMatrix& Z,
                                    double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(
            "round_weight_factors: epsilon must be in (0, 1)");
    if (Y.cols() != Z.rows())
        throw std::invalid_argument(
            "round_weight_factors: inner dimensions of Y and Z disagree");
    if ((Y.array() < 0.0).any() || (Z.array() < 0.0).any())
        throw std::invalid_argument(
            "round_weight_factors: factors must be entrywise nonnegative");

    RoundedWeights out;
    out.epsilon = epsilon;
    out.Yp = Y.unaryExpr(
        [epsilon](double v) { return round_to_power(v, epsilon); });
    out.Zp = Z.unaryExpr(
        [epsilon](double v) { return round_to_power(v, epsilon); });
    out.Wp = out.Yp * out.Zp;

    const DenseMatrix W = Y * Z;
    const double lo = (1.0 - epsilon) * (1.0 - epsilon);
    const double hi = (1.0 + epsilon) * (1.0 + epsilon);
    for (Index i = 0; i < W.rows(); ++i)
        for (Index j = 0; j < W.cols(); ++j) {
            const double w = W(i, j);
            const double wp = out.Wp(i, j);
            if (wp < lo * w || wp > hi * w)
                throw std::logic_error(
                    "round_weight_factors: sandwich violated at (" +
                    std::to_string(i) + "," + std::to_string(j) + ")");
        }

    out.distinct_rows = count_distinct_rows(out.Wp);
    out.distinct_cols = count_distinct_rows(DenseMatrix(out.Wp.transpose()));
    return out;
}

} // namespace rwlra
