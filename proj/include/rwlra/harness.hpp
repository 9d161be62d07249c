#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwlra/matrix.hpp"
#include "rwlra/sketch.hpp"
#include "rwlra/solver.hpp"

namespace rwlra::harness {

enum class WeightKind { DensePaper, BinaryPaper, Uniform, Custom };

/// Entry distribution for generated weight matrices. DensePaper draws 1 with
/// probability 0.8, 0.1 with probability 0.15 and 0.01 with probability 0.05;
/// BinaryPaper draws 1 with probability 0.9 and 0 otherwise.
struct WeightProfile {
    WeightKind kind = WeightKind::Uniform;
    double uniform_value = 1.0;
    /// Custom: (value, probability) categories; probabilities must sum to 1.
    std::vector<std::pair<double, double>> categories;

    static WeightProfile dense_paper();
    static WeightProfile binary_paper();
    static WeightProfile uniform(double value = 1.0);
    static WeightProfile custom(std::vector<std::pair<double, double>> cats);
};

DenseMatrix gen_weights(Index n, Index d, const WeightProfile& profile,
                        std::uint64_t seed);

/// Synthetic data with random orthogonal singular vectors, one singular value
/// of 10000 and the remaining ones equal and small, sized so that
/// sd_lambda(A) lands within +-0.25 of sd_target. Requires lambda > 0 and
/// sd_target in [1, min(n, d)].
DenseMatrix gen_synthetic(Index n, Index d, double sd_target, double lambda,
                          std::uint64_t seed);

struct BenchConfig {
    Index n = 1000;
    Index d = 200;
    int k = 20;
    double lambda = 1.0;
    int iterations = 25;
    double sd_target = 2.0;
    std::vector<Index> sketch_rows = {4, 8, 12, 16, 20};
    SketchKind sketch_kind = SketchKind::CountSketch;
    WeightProfile weights = WeightProfile::dense_paper();
    std::vector<std::string> algorithms = {"svd", "am", "am_sketched"};
    std::uint64_t seed = 1;
    int timing_repetitions = 3;
    bool parallel = false; // run sweep cells concurrently; timings not comparable
};

struct BenchRun {
    std::string algorithm;
    Index t = 0; // sketch rows (0 for svd / unsketched am)
    std::uint64_t data_seed = 0;
    std::uint64_t weight_seed = 0;
    std::uint64_t init_seed = 0;
    std::uint64_t sketch_seed = 0;
    std::vector<double> objective_trace;
    double final_objective = 0.0;
    double residual_term = 0.0;
    double regularization_term = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct BenchAggregate {
    Index t = 0;
    double svd_objective = 0.0;
    double am_objective = 0.0;
    double am_sketched_objective = 0.0;
    double objective_ratio = 0.0; // sketched / unsketched
    double runtime_ratio = 0.0;   // unsketched / sketched (>1: sketching faster)
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRun> runs;
    std::vector<BenchAggregate> aggregates;

    nlohmann::json to_json() const;
    std::string to_csv() const; // flat per-run table
};

/// The sketch-size sweep: per t, fresh data/weights with seeds derived from
/// (config.seed, t), matched across algorithms; each timed cell is the median
/// of timing_repetitions identical runs. A failing cell is recorded and the
/// sweep continues.
BenchReport run_benchmark(const BenchConfig& config);

/// Named verification suites. `which` is one of theorem31, lemma25, rounding,
/// richardson, rank_reduce, objective_forms; params override suite defaults.
/// The returned JSON always carries {"suite", "pass"} plus suite statistics.
nlohmann::json verify_suite(const std::string& which,
                            const nlohmann::json& params = {});

/// Empirical tail frequencies of sketch distortion (norm preservation and
/// subspace condition numbers) over `trials` fresh sketches.
nlohmann::json sketch_tail_stats(SketchKind kind, Index rows, int trials,
                                 std::uint64_t seed);

} // namespace rwlra::harness
