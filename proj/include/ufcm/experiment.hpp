#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ufcm/dataset.hpp"
#include "ufcm/selection.hpp"
#include "ufcm/solver.hpp"

namespace ufcm {

struct GridPoint {
    double alpha = 1.0;
    double beta = 1.0;
    double p = 1.0;
};

/// Everything needed to reproduce a batch run.
struct ExperimentSpec {
    std::optional<std::filesystem::path> input;
    CsvOptions csv;
    std::optional<BlobSpec> synthetic;
    bool unit_variance = false;

    SolverConfig solver;      // clusters == 0 takes the ground-truth class count
    std::vector<double> grid_alpha;  // empty: solver.alpha only
    std::vector<double> grid_beta;
    std::vector<double> grid_p;

    std::vector<Index> select_counts;  // empty: five evenly spaced counts up to d
    int eval_runs = 5;
    std::filesystem::path out = "results";
    int jobs = 1;

    std::vector<GridPoint> grid_points() const;
    void validate() const;  // ConfigError
};

// "blobs:n=100,c=3,informative=10,noise=40,sep=4,scale=1,seed=0"; every key optional.
BlobSpec parse_blob_spec(const std::string& text);
std::string format_blob_spec(const BlobSpec& spec);

struct SelectionScore {
    Index m = 0;
    std::vector<Index> features;
    std::optional<ClusteringScores> scores;  // absent without ground truth
};

struct StageTimes {
    double solve_seconds = 0.0;
    double evaluate_seconds = 0.0;
};

struct ResultRecord {
    int grid_index = 0;
    std::string source;
    std::string content_hash;  // 16 hex digits
    Index features = 0;
    Index samples = 0;
    int classes = 0;
    std::string preprocessing;
    SolverConfig config;
    int eval_runs = 0;
    std::uint64_t eval_seed = 0;
    bool converged = false;
    int iterations = 0;
    SolverTrace trace;
    FeatureRanking ranking;
    std::vector<SelectionScore> selections;
    StageTimes times;  // written to timing.csv, not to the record
};

struct BaselineScore {
    std::string method;  // "max_variance" or "all_features"
    Index m = 0;
    ClusteringScores scores;
};

struct ExperimentOutcome {
    std::vector<ResultRecord> records;
    std::vector<BaselineScore> baselines;
};

/// Loads or generates the dataset, centers it (optionally scales it) and returns it
/// together with a source description.
DataMatrix prepare_dataset(const ExperimentSpec& spec, std::string* source = nullptr,
                           std::string* preprocessing = nullptr);

/// Runs every grid point (in parallel up to spec.jobs) and writes into spec.out:
///   record_NNNN.json  one structured record per grid point
///   trace_NNNN.csv    objective trace per grid point
///   summary.csv       one row per (grid point, m, method)
///   oracle_best.csv   best UFCM row by ACC (uses the ground truth)
///   timing.csv        wall-clock per stage
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

void emit_trace(const SolverTrace& trace, std::ostream& out);
void emit_trace(const SolverTrace& trace, const std::filesystem::path& path);
SolverTrace read_trace(std::istream& in);
SolverTrace read_trace(const std::filesystem::path& path);

std::string record_to_text(const ResultRecord& record);
// Parses a record and re-validates its embedded solver configuration.
ResultRecord record_from_text(const std::string& text);
ResultRecord load_record(const std::filesystem::path& path);

}  // namespace ufcm
