#pragma once
// Experiment orchestration: one experiment end to end, and cartesian
// experiment matrices read from a key = value spec file.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kge/eval.hpp"
#include "kge/graph.hpp"
#include "kge/metrics.hpp"
#include "kge/training.hpp"

namespace kge {

/// "ring:N[:R[:SEED]]"
struct SyntheticSpec {
    SyntheticPattern pattern = SyntheticPattern::ring;
    std::size_t n_entities = 0;
    std::size_t n_relations = 1;
    std::uint64_t seed = 0;

    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

SyntheticSpec parse_synthetic_spec(std::string_view spec);
std::string to_string(const SyntheticSpec& spec);

using GraphSource = std::variant<std::filesystem::path, SyntheticSpec>;

/// Matrix-file graph entry: "synthetic:<spec>" or a dataset directory path.
GraphSource parse_graph_source(std::string_view entry);
/// Directory name for datasets ("wn18rr"), "ring-N" style names for synthetic graphs.
std::string graph_name(const GraphSource& source);

KnowledgeGraph load_graph(const GraphSource& source, const SplitFiles& files = {});

enum class EvalMode { none, rank };

EvalMode parse_eval_mode(std::string_view name);

struct ExperimentOptions {
    TrainConfig config;
    GraphSource graph = SyntheticSpec{};
    SplitFiles files;
    bool monitor_ram = false;
    std::filesystem::path out_csv;     // empty: no CSV row
    std::filesystem::path save_model;  // empty: no checkpoint
    EvalMode eval = EvalMode::none;
};

struct ExperimentOutcome {
    BenchmarkRecord record;
    DatasetStats stats;
    std::optional<RankResult> rank;  // filtered ranking over the test split
    std::vector<double> epoch_losses;
};

/// load graph → RAM probe → init params → timed train → timed inference
/// (test triples, test entities, test relations) → final RAM probe → CSV row
/// → optional ranking → optional checkpoint.
ExperimentOutcome run_experiment(const ExperimentOptions& options);

/// Command-line arguments (after the program name) that make `kgebench`
/// reproduce `options`, starting with the "run" subcommand.
std::vector<std::string> to_cli_args(const ExperimentOptions& options);

struct MatrixSpec {
    std::vector<ModelKind> models;
    std::vector<GraphSource> graphs;
    std::vector<std::size_t> thread_counts;
    std::vector<Backend> backends;
    std::size_t repeats = 1;
    TrainConfig base;  // shared overrides; model/threads/backend are replaced per cell
    bool monitor_ram = false;
    SplitFiles files;

    /// Throws ArgumentError when any axis is empty or repeats == 0.
    void validate() const;
    std::size_t size() const noexcept {
        return models.size() * graphs.size() * thread_counts.size() * backends.size() * repeats;
    }
};

/// Reads the key = value matrix format (see README). Throws ParseError with
/// the offending line number on unknown keys or bad values.
MatrixSpec parse_matrix_spec(std::istream& in, const std::string& source_name = "<matrix>");
MatrixSpec load_matrix_spec(const std::filesystem::path& path);

/// Cartesian product in model, graph, threads, backend, repeat order.
std::vector<ExperimentOptions> expand_matrix(const MatrixSpec& spec, const std::filesystem::path& out_csv);

struct MatrixOutcome {
    std::size_t completed = 0;
    std::vector<std::string> failures;  // one diagnostic per failed cell
};

using ExperimentRunner = std::function<void(const ExperimentOptions&)>;

/// Runs every cell sequentially through `runner` (in-process run_experiment
/// by default), continuing past failures. Throws IoError up front when the
/// output CSV is not writable and ArgumentError on an invalid spec.
MatrixOutcome run_matrix(const MatrixSpec& spec, const std::filesystem::path& out_csv,
                         const ExperimentRunner& runner = {});

/// Aligned table for cmd_stats.
std::string format_stats_table(const std::string& name, const DatasetStats& stats);

}  // namespace kge
