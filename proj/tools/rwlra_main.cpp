// Command-line front end: dataset generation, the WLRA solver, the benchmark
// sweep, and the verification suites. All randomness is seeded; identical
// invocations produce identical outputs (timings aside).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwlra/harness.hpp"
#include "rwlra/io.hpp"
#include "rwlra/problem.hpp"
#include "rwlra/sketch.hpp"
#include "rwlra/solver.hpp"

namespace {

using nlohmann::json;
using namespace rwlra;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_matrix(const DenseMatrix& M, const std::string& path) {
    if (ends_with(path, ".csv"))
        save_csv(M, path);
    else
        save_binary(M, path);
}

DenseMatrix load_matrix(const std::string& path) {
    if (ends_with(path, ".csv")) return load_csv(path);
    return load_binary(path);
}

SketchKind parse_kind(const std::string& name) {
    if (name == "gaussian") return SketchKind::Gaussian;
    if (name == "countsketch") return SketchKind::CountSketch;
    throw CLI::ValidationError("--kind", "expected gaussian or countsketch");
}

void emit(const json& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << payload.dump(2) << std::endl;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized weighted low rank approximation with "
                 "statistical-dimension-sized sketches"};
    app.require_subcommand(1);

    // ---- gen ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate datasets");
    gen->require_subcommand(1);

    struct {
        Index n = 1000, d = 200;
        double sd_target = 2.0, lambda = 1.0;
        std::uint64_t seed = 1;
        std::string out;
    } gs;
    auto* gen_syn = gen->add_subcommand("synthetic",
                                        "Spiked-spectrum synthetic data");
    gen_syn->add_option("--n", gs.n, "Rows");
    gen_syn->add_option("--d", gs.d, "Columns");
    gen_syn->add_option("--sd-target", gs.sd_target,
                        "Target statistical dimension at --lambda");
    gen_syn->add_option("--lambda", gs.lambda, "Regularization weight");
    gen_syn->add_option("--seed", gs.seed, "RNG seed");
    gen_syn->add_option("--out", gs.out, "Output file (.csv or .bin)")
        ->required();

    struct {
        Index n = 1000, d = 200;
        std::string profile = "dense-paper";
        double value = 1.0;
        std::uint64_t seed = 1;
        std::string out;
    } gw;
    auto* gen_w = gen->add_subcommand("weights", "Random weight matrices");
    gen_w->add_option("--n", gw.n, "Rows");
    gen_w->add_option("--d", gw.d, "Columns");
    gen_w->add_option("--profile", gw.profile,
                      "dense-paper | binary-paper | uniform");
    gen_w->add_option("--value", gw.value, "Value for the uniform profile");
    gen_w->add_option("--seed", gw.seed, "RNG seed");
    gen_w->add_option("--out", gw.out, "Output file (.csv or .bin)")
        ->required();

    // ---- solve ----------------------------------------------------------
    struct {
        std::string input, weights, out;
        int k = 10;
        double lambda = 1.0, epsilon = 0.1;
        int iters = 25;
        Index sketch_rows = 0;
        std::string sketch_kind = "countsketch";
        std::uint64_t seed = 1;
        std::string solver = "direct";
        std::vector<std::string> save_factors;
    } so;
    auto* solve = app.add_subcommand("solve", "Alternating minimization");
    solve->add_option("--input", so.input, "Data matrix A")->required();
    solve->add_option("--weights", so.weights, "Weight matrix W")->required();
    solve->add_option("--k", so.k, "Target rank")->required();
    solve->add_option("--lambda", so.lambda, "Regularization weight");
    solve->add_option("--epsilon", so.epsilon, "Accuracy target");
    solve->add_option("--iters", so.iters, "Alternation count");
    solve->add_option("--sketch-rows", so.sketch_rows,
                      "Sketch rows t (0 = unsketched)");
    solve->add_option("--sketch-kind", so.sketch_kind,
                      "gaussian | countsketch");
    solve->add_option("--seed", so.seed, "Init + sketch seed");
    solve->add_option("--solver", so.solver,
                      "direct | richardson | precond");
    solve->add_option("--out", so.out, "Report JSON path (default stdout)");
    solve
        ->add_option("--save-factors", so.save_factors,
                     "Two paths: U out, V out")
        ->expected(2);

    // ---- bench ----------------------------------------------------------
    harness::BenchConfig bc;
    std::string bench_profile = "dense-paper";
    std::string bench_kind = "countsketch";
    std::string bench_out, bench_csv;
    auto* bench = app.add_subcommand("bench", "Sketch-size sweep");
    bench->add_option("--n", bc.n, "Rows");
    bench->add_option("--d", bc.d, "Columns");
    bench->add_option("--k", bc.k, "Target rank");
    bench->add_option("--lambda", bc.lambda, "Regularization weight");
    bench->add_option("--iters", bc.iterations, "Alternation count");
    bench->add_option("--sd-target", bc.sd_target, "Synthetic sd target");
    bench->add_option("--t", bc.sketch_rows, "Sketch sizes to sweep");
    bench->add_option("--sketch-kind", bench_kind, "gaussian | countsketch");
    bench->add_option("--profile", bench_profile,
                      "dense-paper | binary-paper | uniform");
    bench->add_option("--algorithms", bc.algorithms,
                      "Subset of svd am am_sketched");
    bench->add_option("--seed", bc.seed, "Sweep seed");
    bench->add_option("--reps", bc.timing_repetitions,
                      "Timing repetitions per cell (median)");
    bench->add_flag("--parallel", bc.parallel,
                    "Run cells concurrently (disables timing ratios)");
    bench->add_option("--out", bench_out, "Report JSON path");
    bench->add_option("--csv", bench_csv, "Also write a flat CSV");

    // ---- verify ---------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "Verification suites");
    verify->require_subcommand(1);

    struct {
        std::string kind = "gaussian";
        Index rows = 50;
        int trials = 200;
        std::uint64_t seed = 1;
    } vs;
    auto* v_sketch = verify->add_subcommand("sketch",
                                            "Sketch distortion tails");
    v_sketch->fallthrough();
    v_sketch->add_option("--kind", vs.kind, "gaussian | countsketch");
    v_sketch->add_option("--rows", vs.rows, "Sketch rows");
    v_sketch->add_option("--trials", vs.trials, "Trials");
    v_sketch->add_option("--seed", vs.seed, "Seed");

    json t31;
    auto* v_t31 = verify->add_subcommand(
        "theorem31", "Sketched multiple ridge regression quality");
    v_t31->fallthrough();
    {
        static Index n = 200, d = 30, k = 10, ell = 0;
        static double lambda = 1.0, epsilon = 0.5, s = 3.0, c = 4.0;
        static int trials = 50;
        static std::uint64_t seed = 7;
        static std::string kind = "gaussian";
        v_t31->add_option("--n", n, "Rows per problem");
        v_t31->add_option("--d", d, "Number of ridge problems");
        v_t31->add_option("--k", k, "Columns per problem");
        v_t31->add_option("--lambda", lambda, "Ridge weight");
        v_t31->add_option("--epsilon", epsilon, "Accuracy target");
        v_t31->add_option("--trials", trials, "Sketch seeds");
        v_t31->add_option("--seed", seed, "Ensemble seed");
        v_t31->add_option("--ell", ell, "Sketch rows override");
        v_t31->add_option("--c", c, "Sizing constant");
        v_t31->add_option("--s", s, "Target statistical dimension");
        v_t31->add_option("--kind", kind, "gaussian | countsketch");
        v_t31->callback([&]() {
            t31 = {{"n", n},       {"d", d},          {"k", k},
                   {"lambda", lambda}, {"epsilon", epsilon}, {"trials", trials},
                   {"seed", seed}, {"c", c},          {"s", s},
                   {"kind", kind}};
            if (ell > 0) t31["ell"] = ell;
        });
    }

    json simple_params;
    auto add_simple = [&](const char* name, const char* desc) {
        auto* cmd = verify->add_subcommand(name, desc);
        cmd->fallthrough();
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { simple_params["seed"] = v; },
            "Seed");
        cmd->add_option_function<int>(
            "--instances",
            [&](int v) { simple_params["instances"] = v; }, "Instances");
        cmd->add_option_function<int>(
            "--trials", [&](int v) { simple_params["trials"] = v; },
            "Trials");
        return cmd;
    };
    auto* v_lemma = add_simple("lemma25", "Approximate matrix product tail");
    auto* v_round = add_simple("rounding", "Power-of-(1+eps) rounding sandwich");
    auto* v_rich = add_simple("richardson", "Preconditioned Richardson bounds");
    auto* v_rank = add_simple("rank_reduce", "Rank-reduction projection");
    auto* v_forms = add_simple("objective_forms", "Objective form equivalence");

    std::string verify_out;
    verify->add_option("--out", verify_out, "Write suite JSON to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_syn->parsed()) {
            save_matrix(harness::gen_synthetic(gs.n, gs.d, gs.sd_target,
                                               gs.lambda, gs.seed),
                        gs.out);
            return 0;
        }
        if (gen_w->parsed()) {
            harness::WeightProfile profile;
            if (gw.profile == "dense-paper")
                profile = harness::WeightProfile::dense_paper();
            else if (gw.profile == "binary-paper")
                profile = harness::WeightProfile::binary_paper();
            else if (gw.profile == "uniform")
                profile = harness::WeightProfile::uniform(gw.value);
            else
                throw std::invalid_argument("unknown profile " + gw.profile);
            save_matrix(harness::gen_weights(gw.n, gw.d, profile, gw.seed),
                        gw.out);
            return 0;
        }
        if (solve->parsed()) {
            WlraProblem problem(load_matrix(so.input), load_matrix(so.weights),
                                so.k, so.lambda, so.epsilon);
            AmConfig cfg;
            cfg.iterations = so.iters;
            cfg.init_seed = so.seed;
            if (so.solver == "richardson")
                cfg.solver = RidgeSolverKind::Richardson;
            else if (so.solver == "precond")
                cfg.solver = RidgeSolverKind::PreconditionedRichardson;
            else if (so.solver != "direct")
                throw std::invalid_argument("unknown solver " + so.solver);
            if (so.sketch_rows > 0) {
                const SketchKind kind = parse_kind(so.sketch_kind);
                cfg.sketch_u = SketchSpec{kind, so.sketch_rows, so.seed + 1};
                cfg.sketch_v = SketchSpec{kind, so.sketch_rows, so.seed + 2};
            }
            auto [factors, report] = alternating_minimization(problem, cfg);
            json payload{{"k", so.k},
                         {"lambda", so.lambda},
                         {"epsilon", so.epsilon},
                         {"iterations", report.iterations},
                         {"sketch_rows", so.sketch_rows},
                         {"sketch_kind", so.sketch_kind},
                         {"solver", so.solver},
                         {"seed", so.seed},
                         {"transposed_on_ingest", report.transposed},
                         {"objective_trace", report.objective_trace},
                         {"final_objective", report.final_objective},
                         {"residual_term", report.residual_term},
                         {"regularization_term", report.regularization_term},
                         {"s_estimate", report.s_estimate},
                         {"sigma_estimate", report.sigma_estimate},
                         {"containment_warnings", report.containment_warnings},
                         {"seconds", report.seconds}};
            if (!so.save_factors.empty()) {
                save_matrix(factors.U, so.save_factors[0]);
                save_matrix(factors.V, so.save_factors[1]);
                payload["factors"] = {{"U", so.save_factors[0]},
                                      {"V", so.save_factors[1]}};
            }
            emit(payload, so.out);
            return 0;
        }
        if (bench->parsed()) {
            bc.sketch_kind = parse_kind(bench_kind);
            if (bench_profile == "dense-paper")
                bc.weights = harness::WeightProfile::dense_paper();
            else if (bench_profile == "binary-paper")
                bc.weights = harness::WeightProfile::binary_paper();
            else if (bench_profile == "uniform")
                bc.weights = harness::WeightProfile::uniform();
            else
                throw std::invalid_argument("unknown profile " + bench_profile);
            const harness::BenchReport report = harness::run_benchmark(bc);
            if (!bench_csv.empty()) {
                std::ofstream out(bench_csv);
                if (!out) throw std::runtime_error("cannot write " + bench_csv);
                out << report.to_csv();
            }
            emit(report.to_json(), bench_out);
            return 0;
        }
        if (verify->parsed()) {
            json result;
            if (v_sketch->parsed()) {
                result = harness::sketch_tail_stats(parse_kind(vs.kind),
                                                    vs.rows, vs.trials,
                                                    vs.seed);
                emit(result, verify_out);
                return 0;
            }
            if (v_t31->parsed())
                result = harness::verify_suite("theorem31", t31);
            else if (v_lemma->parsed())
                result = harness::verify_suite("lemma25", simple_params);
            else if (v_round->parsed())
                result = harness::verify_suite("rounding", simple_params);
            else if (v_rich->parsed())
                result = harness::verify_suite("richardson", simple_params);
            else if (v_rank->parsed())
                result = harness::verify_suite("rank_reduce", simple_params);
            else if (v_forms->parsed())
                result = harness::verify_suite("objective_forms",
                                               simple_params);
            emit(result, verify_out);
            return result.value("pass", false) ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << std::endl;
        return 2;
    }
    return 0;
}
