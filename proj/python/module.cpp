// Python bindings for the core operations. Matrices cross the boundary as
// C-ordered numpy arrays of doubles (the library stores row-major).

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "rwlra/harness.hpp"
#include "rwlra/problem.hpp"
#include "rwlra/ridge.hpp"
#include "rwlra/sketch.hpp"
#include "rwlra/solver.hpp"
#include "rwlra/spectral.hpp"

namespace py = pybind11;
using namespace rwlra;
using nlohmann::json;

namespace {

SketchKind parse_kind(const std::string& name) {
    if (name == "gaussian") return SketchKind::Gaussian;
    if (name == "countsketch") return SketchKind::CountSketch;
    throw std::invalid_argument("sketch kind must be gaussian or countsketch");
}

harness::WeightProfile parse_profile(const std::string& name, double value) {
    if (name == "dense-paper") return harness::WeightProfile::dense_paper();
    if (name == "binary-paper") return harness::WeightProfile::binary_paper();
    if (name == "uniform") return harness::WeightProfile::uniform(value);
    throw std::invalid_argument("unknown weight profile " + name);
}

json dict_to_json(const py::dict& d) {
    const auto dumps = py::module_::import("json").attr("dumps");
    return json::parse(dumps(d).cast<std::string>());
}

py::object json_to_py(const json& j) {
    const auto loads = py::module_::import("json").attr("loads");
    return loads(j.dump());
}

} // namespace

PYBIND11_MODULE(_rwlra, m) {
    m.doc() = "Regularized weighted low rank approximation with "
              "statistical-dimension-sized sketches";
    m.attr("__version__") = "0.1.0";

    m.def("hadamard", &hadamard, py::arg("W"), py::arg("M"),
          "Elementwise product W o M.");

    m.def(
        "weighted_objective",
        [](const DenseMatrix& A, const DenseMatrix& W, const DenseMatrix& U,
           const DenseMatrix& V, double lam) {
            WlraProblem p(A, W, static_cast<int>(U.cols()), lam);
            return weighted_objective(p, U, V);
        },
        py::arg("A"), py::arg("W"), py::arg("U"), py::arg("V"),
        py::arg("lam"),
        "||W o (U V - A)||_F^2 + lam (||U||_F^2 + ||V||_F^2).");

    m.def("statistical_dimension",
          py::overload_cast<const DenseMatrix&, double>(&statistical_dimension),
          py::arg("M"), py::arg("lam"));
    m.def("stable_rank", &stable_rank, py::arg("M"));

    m.def(
        "sample_sketch",
        [](const std::string& kind, Index rows, std::uint64_t seed, Index n) {
            return sample_sketch({parse_kind(kind), rows, seed}, n);
        },
        py::arg("kind"), py::arg("rows"), py::arg("seed"), py::arg("n"),
        "Realize a rows x n sketch ('gaussian' or 'countsketch').");

    m.def("recommended_sketch_size", &recommended_sketch_size, py::arg("s"),
          py::arg("epsilon"), py::arg("c") = kDefaultSketchConstant);

    m.def(
        "distortion_factors",
        [](const DenseMatrix& S, const DenseMatrix& M) {
            const DistortionDiagnostics d = distortion_factors(S, M);
            return py::dict(py::arg("K") = d.K, py::arg("kappa") = d.kappa,
                            py::arg("sigma_max") = d.sigma_max);
        },
        py::arg("S"), py::arg("M"));

    m.def(
        "gamma_alpha_diagnostics",
        [](const DenseMatrix& S, const DenseMatrix& M, const Vector& b,
           double lam) {
            const DistortionDiagnostics d =
                gamma_alpha_diagnostics(S, M, b, lam);
            return py::dict(py::arg("K") = d.K, py::arg("kappa") = d.kappa,
                            py::arg("gamma") = d.gamma, py::arg("c_h") = d.c_h,
                            py::arg("alpha") = d.alpha,
                            py::arg("sigma_max") = d.sigma_max,
                            py::arg("head_rank") = d.head_rank);
        },
        py::arg("S"), py::arg("M"), py::arg("b"), py::arg("lam"));

    m.def("amm_error", &amm_error, py::arg("S"), py::arg("A"), py::arg("B"),
          "Spectral norm of A^T S^T S B - A^T B.");

    m.def(
        "ridge_solve",
        [](const DenseMatrix& M, const Vector& b, double lam) {
            return ridge_solve({M, b, lam});
        },
        py::arg("M"), py::arg("b"), py::arg("lam"));

    m.def(
        "sketched_ridge_solve",
        [](const DenseMatrix& M, const Vector& b, double lam,
           const DenseMatrix& S) {
            return sketched_ridge_solve({M, b, lam}, S);
        },
        py::arg("M"), py::arg("b"), py::arg("lam"), py::arg("S"));

    m.def(
        "batch_objective_ratio",
        [](const std::vector<DenseMatrix>& Ms, const std::vector<Vector>& bs,
           double lam, const DenseMatrix& S) {
            if (Ms.size() != bs.size())
                throw std::invalid_argument(
                    "need as many right-hand sides as designs");
            std::vector<RidgeProblem> problems;
            problems.reserve(Ms.size());
            for (std::size_t i = 0; i < Ms.size(); ++i)
                problems.push_back({Ms[i], bs[i], lam});
            return batch_objective_ratio(problems, S);
        },
        py::arg("designs"), py::arg("rhs"), py::arg("lam"), py::arg("S"));

    m.def(
        "richardson_solve",
        [](const DenseMatrix& A, const DenseMatrix& B, const Vector& b,
           double eta, int max_iters, double tau) {
            RichardsonConfig cfg;
            cfg.eta = eta;
            cfg.max_iters = max_iters;
            cfg.tau = tau;
            const RichardsonResult r = richardson_solve(A, B, b, cfg);
            return py::dict(
                py::arg("x") = r.x, py::arg("iterations") = r.iterations,
                py::arg("converged") = r.converged,
                py::arg("residual") = r.final_residual_norm,
                py::arg("containment_warning") = r.containment_warning);
        },
        py::arg("A"), py::arg("B"), py::arg("b"), py::arg("eta"),
        py::arg("max_iters") = 1000, py::arg("tau") = 1e-12);

    m.def(
        "build_preconditioner",
        [](const DenseMatrix& factor, const DenseMatrix& S, double l_W,
           double u_W, Index n) {
            const Preconditioner pre =
                build_preconditioner(factor, S, l_W, u_W, n);
            return py::make_tuple(pre.B, pre.eta);
        },
        py::arg("factor"), py::arg("S"), py::arg("l_W"), py::arg("u_W"),
        py::arg("n"));

    m.def(
        "best_response_u",
        [](const DenseMatrix& A, const DenseMatrix& W, const DenseMatrix& V,
           double lam) {
            WlraProblem p(A, W, static_cast<int>(V.rows()), lam);
            return best_response_U(p, V);
        },
        py::arg("A"), py::arg("W"), py::arg("V"), py::arg("lam"));

    m.def(
        "best_response_v",
        [](const DenseMatrix& A, const DenseMatrix& W, const DenseMatrix& U,
           double lam) {
            WlraProblem p(A, W, static_cast<int>(U.cols()), lam);
            return best_response_V(p, U);
        },
        py::arg("A"), py::arg("W"), py::arg("U"), py::arg("lam"));

    m.def(
        "alternating_minimization",
        [](const DenseMatrix& A, const DenseMatrix& W, int k, double lam,
           int iterations, Index sketch_rows, const std::string& sketch_kind,
           std::uint64_t seed, const std::string& solver) {
            WlraProblem p(A, W, k, lam);
            AmConfig cfg;
            cfg.iterations = iterations;
            cfg.init_seed = seed;
            if (solver == "richardson")
                cfg.solver = RidgeSolverKind::Richardson;
            else if (solver == "precond")
                cfg.solver = RidgeSolverKind::PreconditionedRichardson;
            else if (solver != "direct")
                throw std::invalid_argument("unknown solver " + solver);
            if (sketch_rows > 0) {
                const SketchKind kind = parse_kind(sketch_kind);
                cfg.sketch_u = SketchSpec{kind, sketch_rows, seed + 1};
                cfg.sketch_v = SketchSpec{kind, sketch_rows, seed + 2};
            }
            auto [f, report] = alternating_minimization(p, cfg);
            return py::dict(
                py::arg("U") = f.U, py::arg("V") = f.V,
                py::arg("objective_trace") = report.objective_trace,
                py::arg("final_objective") = report.final_objective,
                py::arg("residual_term") = report.residual_term,
                py::arg("regularization_term") = report.regularization_term,
                py::arg("s_estimate") = report.s_estimate,
                py::arg("sigma_estimate") = report.sigma_estimate,
                py::arg("seconds") = report.seconds,
                py::arg("transposed") = report.transposed);
        },
        py::arg("A"), py::arg("W"), py::arg("k"), py::arg("lam"),
        py::arg("iterations") = 25, py::arg("sketch_rows") = 0,
        py::arg("sketch_kind") = "countsketch", py::arg("seed") = 0,
        py::arg("solver") = "direct");

    m.def(
        "svd_baseline",
        [](const DenseMatrix& A, int k) {
            const Factorization f = svd_baseline(A, k);
            return py::make_tuple(f.U, f.V);
        },
        py::arg("A"), py::arg("k"));

    m.def(
        "rank_reduce_projection",
        [](const DenseMatrix& W, const DenseMatrix& Spp, double epsilon) {
            const RankReduction r = rank_reduce_projection(W, Spp, epsilon);
            return py::make_tuple(r.P, r.k_prime);
        },
        py::arg("W"), py::arg("Spp"), py::arg("epsilon"));

    m.def(
        "round_weight_factors",
        [](const DenseMatrix& Y, const DenseMatrix& Z, double epsilon) {
            const RoundedWeights r = round_weight_factors(Y, Z, epsilon);
            return py::dict(py::arg("Yp") = r.Yp, py::arg("Zp") = r.Zp,
                            py::arg("Wp") = r.Wp,
                            py::arg("distinct_rows") = r.distinct_rows,
                            py::arg("distinct_cols") = r.distinct_cols);
        },
        py::arg("Y"), py::arg("Z"), py::arg("epsilon"));

    m.def("gen_synthetic", &harness::gen_synthetic, py::arg("n"), py::arg("d"),
          py::arg("sd_target"), py::arg("lam"), py::arg("seed"));

    m.def(
        "gen_weights",
        [](Index n, Index d, const std::string& profile, std::uint64_t seed,
           double value) {
            return harness::gen_weights(n, d, parse_profile(profile, value),
                                        seed);
        },
        py::arg("n"), py::arg("d"), py::arg("profile"), py::arg("seed"),
        py::arg("value") = 1.0);

    m.def(
        "verify_suite",
        [](const std::string& which, const py::dict& params) {
            return json_to_py(
                harness::verify_suite(which, dict_to_json(params)));
        },
        py::arg("which"), py::arg("params") = py::dict(),
        "Run a named verification suite; returns its statistics as a dict.");
}
