// kgebench: train, time and profile knowledge-graph embedding models.
//
//   kgebench run     --model transe --synthetic ring:1000 --epochs 10 --out results.csv
//   kgebench matrix  --spec sweep.cfg --out results.csv
//   kgebench stats   data/wn18rr
//   kgebench synth   --synthetic ring:1000 --out-dir data/ring-1000
//   kgebench info    model.kgeb
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kge/bench.hpp"
#include "kge/checkpoint.hpp"
#include "kge/errors.hpp"

extern char** environ;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : kge::Error {
    using kge::Error::Error;
};

struct RunFlags {
    std::string model = "transe";
    std::string graph;
    std::string synthetic;
    std::string backend = "vector";
    std::string norm = "l1";
    std::string eval = "none";
    std::string out;
    std::string save_model;
    bool monitor_ram = false;
    bool no_normalize = false;
    kge::TrainConfig config;
    kge::SplitFiles files;
};

void add_split_flags(CLI::App& cmd, kge::SplitFiles& files) {
    cmd.add_option("--train-file", files.train, "Training split file name")->capture_default_str();
    cmd.add_option("--valid-file", files.valid, "Validation split file name")->capture_default_str();
    cmd.add_option("--test-file", files.test, "Test split file name")->capture_default_str();
}

void add_run_flags(CLI::App& cmd, RunFlags& f) {
    auto& c = f.config;
    cmd.add_option("--model", f.model, "transe | distmult | convkb")->capture_default_str();
    auto* graph = cmd.add_option("--graph", f.graph, "Dataset directory with train/valid/test files");
    auto* synth = cmd.add_option("--synthetic", f.synthetic, "Synthetic graph, ring:N[:R[:SEED]]");
    graph->excludes(synth);
    cmd.add_option("--threads", c.threads, "Worker threads")->capture_default_str();
    cmd.add_option("--backend", f.backend, "scalar | vector")->capture_default_str();
    cmd.add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
    cmd.add_option("--eta", c.eta, "Negatives per positive")->capture_default_str();
    cmd.add_option("--batches", c.n_batches, "Batches per epoch")->capture_default_str();
    cmd.add_option("--dim", c.dim, "Embedding dimension")->capture_default_str();
    cmd.add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
    cmd.add_option("--margin", c.margin, "Hinge margin")->capture_default_str();
    cmd.add_option("--tau", c.tau, "ConvKB filter count")->capture_default_str();
    cmd.add_option("--seed", c.seed, "Random seed")->capture_default_str();
    cmd.add_option("--norm", f.norm, "TransE distance, l1 | l2")->capture_default_str();
    cmd.add_flag("--no-normalize", f.no_normalize, "Skip TransE entity renormalisation");
    cmd.add_flag("--monitor-ram", f.monitor_ram, "Record peak RSS after load and at the end");
    cmd.add_option("--out", f.out, "Append the result row to this CSV file");
    cmd.add_option("--save-model", f.save_model, "Write the trained parameters to this checkpoint");
    cmd.add_option("--eval", f.eval, "none | rank (filtered MRR and hits@k on the test split)")
        ->capture_default_str();
    add_split_flags(cmd, f.files);
}

kge::ExperimentOptions to_options(const RunFlags& f) {
    kge::ExperimentOptions o;
    o.config = f.config;
    o.config.model = kge::parse_model_kind(f.model);
    o.config.backend = kge::parse_backend(f.backend);
    o.config.norm = kge::parse_norm(f.norm);
    o.config.normalize_entities = !f.no_normalize;
    if (f.graph.empty() == f.synthetic.empty()) throw UsageError("exactly one of --graph or --synthetic is required");
    if (!f.graph.empty())
        o.graph = std::filesystem::path(f.graph);
    else
        o.graph = kge::parse_synthetic_spec(f.synthetic);
    o.files = f.files;
    o.monitor_ram = f.monitor_ram;
    o.out_csv = f.out;
    o.save_model = f.save_model;
    o.eval = kge::parse_eval_mode(f.eval);
    o.config.validate();
    return o;
}

void print_outcome(const kge::ExperimentOutcome& out) {
    const auto& r = out.record;
    std::printf("model=%s graph=%s threads=%zu backend=%s epochs=%zu\n", r.model.c_str(), r.graph.c_str(), r.threads,
                r.backend.c_str(), r.epochs);
    std::printf("train            wall %.6f s  cpu %.6f s\n", r.train.wall_seconds, r.train.cpu_seconds);
    std::printf("infer triples    wall %.6f s  cpu %.6f s\n", r.infer_triples.wall_seconds,
                r.infer_triples.cpu_seconds);
    std::printf("infer entities   wall %.6f s  cpu %.6f s\n", r.infer_entities.wall_seconds,
                r.infer_entities.cpu_seconds);
    std::printf("infer relations  wall %.6f s  cpu %.6f s\n", r.infer_relations.wall_seconds,
                r.infer_relations.cpu_seconds);
    if (r.memory.enabled)
        std::printf("peak RSS         load %.2f MiB  total %.2f MiB\n", r.memory.peak_after_load_mb,
                    r.memory.peak_total_mb);
    if (!out.epoch_losses.empty())
        std::printf("loss             first %.6f  last %.6f\n", out.epoch_losses.front(), out.epoch_losses.back());
    if (out.rank)
        std::printf("filtered rank    mrr %.4f  hits@1 %.4f  hits@3 %.4f  hits@10 %.4f\n", out.rank->mrr,
                    out.rank->hits_at.at(1), out.rank->hits_at.at(3), out.rank->hits_at.at(10));
}

int cmd_run(const RunFlags& flags) {
    const auto options = to_options(flags);
    std::fprintf(stderr, "kernels: %s; inter_op_parallelism_threads=2 (metadata only)\n",
                 std::string(kge::kernels::simd_isa()).c_str());
    print_outcome(kge::run_experiment(options));
    return 0;
}

// Each cell runs in a fresh process so peak RSS and timings stay per-experiment.
void run_subprocess(const kge::ExperimentOptions& options) {
    std::vector<std::string> args = kge::to_cli_args(options);
    args.insert(args.begin(), "kgebench");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    std::fflush(stdout);
    pid_t pid = 0;
    if (const int rc = posix_spawn(&pid, "/proc/self/exe", nullptr, nullptr, argv.data(), environ); rc != 0)
        throw kge::Error(std::string("posix_spawn failed: ") + std::strerror(rc));
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw kge::Error("waitpid failed");
    if (!WIFEXITED(status)) throw kge::Error("experiment terminated by a signal");
    if (WEXITSTATUS(status) != 0) throw kge::Error("experiment exited with code " + std::to_string(WEXITSTATUS(status)));
}

int cmd_matrix(const std::string& spec_path, const std::string& out, bool in_process) {
    const auto spec = kge::load_matrix_spec(spec_path);
    std::fprintf(stderr, "matrix: %zu experiments\n", spec.size());
    kge::ExperimentRunner runner;
    if (in_process)
        runner = [](const kge::ExperimentOptions& o) { print_outcome(kge::run_experiment(o)); };
    else
        runner = run_subprocess;
    const auto outcome = kge::run_matrix(spec, out, runner);
    std::printf("completed %zu of %zu experiments\n", outcome.completed, spec.size());
    for (const auto& f : outcome.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
    return outcome.failures.empty() ? 0 : kExitRuntime;
}

kge::GraphSource graph_arg(const std::string& path, const std::string& synthetic) {
    if (path.empty() == synthetic.empty()) throw UsageError("give a dataset path or --synthetic, not both");
    if (!synthetic.empty()) return kge::parse_synthetic_spec(synthetic);
    return std::filesystem::path(path);
}

int cmd_stats(const std::string& path, const std::string& synthetic, const kge::SplitFiles& files) {
    const auto source = graph_arg(path, synthetic);
    const auto kg = kge::load_graph(source, files);
    std::fputs(kge::format_stats_table(kge::graph_name(source), kge::stats(kg)).c_str(), stdout);
    return 0;
}

int cmd_synth(const std::string& synthetic, const std::string& out_dir, const kge::SplitFiles& files) {
    const auto spec = kge::parse_synthetic_spec(synthetic);
    const auto kg = kge::load_graph(spec);
    kge::write_dataset(kg, out_dir, files);
    std::fputs(kge::format_stats_table(kge::graph_name(spec), kge::stats(kg)).c_str(), stdout);
    return 0;
}

int cmd_info(const std::string& path) {
    const auto p = kge::load_checkpoint(path);
    std::printf("model      %s\n", std::string(kge::to_string(p.kind)).c_str());
    if (p.kind == kge::ModelKind::transe) std::printf("norm       %s\n", std::string(kge::to_string(p.norm)).c_str());
    std::printf("entities   %zu\nrelations  %zu\ndim        %zu\n", p.n_entities(), p.n_relations(), p.dim());
    if (p.kind == kge::ModelKind::convkb) std::printf("tau        %zu\n", p.tau());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph embedding training benchmark"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Train and time one experiment");
    add_run_flags(*run, run_flags);

    std::string matrix_spec, matrix_out;
    bool in_process = false;
    auto* matrix = app.add_subcommand("matrix", "Run every combination of a matrix spec file");
    matrix->add_option("--spec", matrix_spec, "Matrix spec file (key = value)")->required();
    matrix->add_option("--out", matrix_out, "CSV file receiving one row per experiment")->required();
    matrix->add_flag("--in-process", in_process, "Run cells inside this process instead of one child each");

    std::string stats_path, stats_synth;
    kge::SplitFiles stats_files;
    auto* stats = app.add_subcommand("stats", "Print entity, relation and split counts");
    stats->add_option("path", stats_path, "Dataset directory");
    stats->add_option("--synthetic", stats_synth, "Synthetic graph, ring:N[:R[:SEED]]");
    add_split_flags(*stats, stats_files);

    std::string synth_spec, synth_dir;
    kge::SplitFiles synth_files;
    auto* synth = app.add_subcommand("synth", "Write a synthetic graph as a dataset directory");
    synth->add_option("--synthetic", synth_spec, "ring:N[:R[:SEED]]")->required();
    synth->add_option("--out-dir", synth_dir, "Target directory")->required();
    add_split_flags(*synth, synth_files);

    std::string info_path;
    auto* info = app.add_subcommand("info", "Describe a model checkpoint");
    info->add_option("checkpoint", info_path, "Checkpoint file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*matrix) return cmd_matrix(matrix_spec, matrix_out, in_process);
        if (*stats) return cmd_stats(stats_path, stats_synth, stats_files);
        if (*synth) return cmd_synth(synth_spec, synth_dir, synth_files);
        if (*info) return cmd_info(info_path);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "kgebench: %s\n", e.what());
        return kExitUsage;
    } catch (const kge::ArgumentError& e) {
        std::fprintf(stderr, "kgebench: %s\n", e.what());
        return kExitUsage;
    } catch (const kge::DatasetNotFound& e) {
        std::fprintf(stderr, "kgebench: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "kgebench: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
