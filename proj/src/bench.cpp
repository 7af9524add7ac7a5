#include "kge/bench.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "kge/checkpoint.hpp"
#include "kge/errors.hpp"

namespace kge {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string_view::npos) return {};
    return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.emplace_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class N>
N to_number(std::string_view s, const char* what) {
    N v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ArgumentError(std::string("bad ") + what + ": '" + std::string(s) + "'");
    return v;
}

bool to_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ArgumentError("bad boolean: '" + std::string(s) + "'");
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::string_view spec) {
    const auto parts = split_list(spec, ':');
    if (parts.size() < 2 || parts.size() > 4)
        throw ArgumentError("synthetic spec must look like ring:N[:R[:SEED]], got '" + std::string(spec) + "'");
    SyntheticSpec s;
    s.pattern = parse_pattern(parts[0]);
    s.n_entities = to_number<std::size_t>(parts[1], "synthetic entity count");
    if (parts.size() > 2) s.n_relations = to_number<std::size_t>(parts[2], "synthetic relation count");
    if (parts.size() > 3) s.seed = to_number<std::uint64_t>(parts[3], "synthetic seed");
    if (s.n_entities < 2) throw ArgumentError("synthetic graph needs at least 2 entities");
    if (s.n_relations < 1) throw ArgumentError("synthetic graph needs at least 1 relation");
    return s;
}

std::string to_string(const SyntheticSpec& s) {
    return "ring:" + std::to_string(s.n_entities) + ":" + std::to_string(s.n_relations) + ":" + std::to_string(s.seed);
}

GraphSource parse_graph_source(std::string_view entry) {
    constexpr std::string_view prefix = "synthetic:";
    if (entry.substr(0, prefix.size()) == prefix) return parse_synthetic_spec(entry.substr(prefix.size()));
    return std::filesystem::path(std::string(entry));
}

std::string graph_name(const GraphSource& source) {
    if (const auto* s = std::get_if<SyntheticSpec>(&source)) {
        std::string name = "ring-" + std::to_string(s->n_entities);
        if (s->n_relations != 1) name += "x" + std::to_string(s->n_relations);
        return name;
    }
    auto p = std::get<std::filesystem::path>(source);
    if (!p.has_filename()) p = p.parent_path();
    return p.filename().string();
}

KnowledgeGraph load_graph(const GraphSource& source, const SplitFiles& files) {
    if (const auto* s = std::get_if<SyntheticSpec>(&source))
        return generate_synthetic(s->n_entities, s->n_relations, s->pattern, s->seed);
    return load_dataset(std::get<std::filesystem::path>(source), files);
}

EvalMode parse_eval_mode(std::string_view name) {
    if (name == "none") return EvalMode::none;
    if (name == "rank") return EvalMode::rank;
    throw ArgumentError("unknown eval mode '" + std::string(name) + "' (valid: none, rank)");
}

ExperimentOutcome run_experiment(const ExperimentOptions& o) {
    const TrainConfig& cfg = o.config;
    cfg.validate();

    ExperimentOutcome out;
    BenchmarkRecord& rec = out.record;
    rec.memory.enabled = o.monitor_ram;

    const KnowledgeGraph kg = load_graph(o.graph, o.files);
    // Load probe: after the graph is resident, before any model allocation.
    if (o.monitor_ram) rec.memory.peak_after_load_mb = peak_rss_mb();
    out.stats = stats(kg);
    if (kg.train.empty()) throw ArgumentError("graph has an empty training split");

    Params initial = init_params<float>(cfg.model, kg.entities.size(), kg.relations.size(), cfg.dim, cfg.tau,
                                        cfg.seed, cfg.norm);
    TrainResult trained = train(kg, cfg, std::move(initial));
    out.epoch_losses = std::move(trained.epoch_losses);
    rec.train = {trained.timings.wall_train_seconds, trained.timings.cpu_train_seconds};

    const Params& params = trained.params;
    rec.infer_triples = infer_triples(params, kg.test, cfg.backend, cfg.threads).timing;
    const auto test_entities = entities_of(kg.test);
    const auto test_relations = relations_of(kg.test);
    rec.infer_entities = infer_entities(params, test_entities).timing;
    rec.infer_relations = infer_relations(params, test_relations).timing;

    if (o.monitor_ram) rec.memory.peak_total_mb = peak_rss_mb();

    rec.timestamp = utc_timestamp();
    rec.model = std::string(to_string(cfg.model));
    rec.graph = graph_name(o.graph);
    rec.threads = cfg.threads;
    rec.backend = std::string(to_string(cfg.backend));
    rec.epochs = cfg.epochs;
    rec.eta = cfg.eta;
    rec.n_batches = cfg.n_batches;
    rec.dim = cfg.dim;
    rec.lr = cfg.lr;
    rec.seed = cfg.seed;
    if (!o.out_csv.empty()) write_record(o.out_csv, rec);

    if (o.eval == EvalMode::rank && !kg.test.empty()) {
        std::vector<Triple> known;
        known.reserve(kg.train.size() + kg.validation.size() + kg.test.size());
        for (const auto* split : {&kg.train, &kg.validation, &kg.test}) known.insert(known.end(), split->begin(), split->end());
        out.rank = rank_queries(params, kg.test, known, RankMode::filtered, cfg.backend, cfg.threads);
    }
    if (!o.save_model.empty()) save_checkpoint(o.save_model, params);
    return out;
}

std::vector<std::string> to_cli_args(const ExperimentOptions& o) {
    const TrainConfig& c = o.config;
    std::vector<std::string> a{"run", "--model", std::string(to_string(c.model))};
    if (const auto* s = std::get_if<SyntheticSpec>(&o.graph)) {
        a.insert(a.end(), {"--synthetic", to_string(*s)});
    } else {
        a.insert(a.end(), {"--graph", std::get<std::filesystem::path>(o.graph).string()});
        a.insert(a.end(), {"--train-file", o.files.train, "--valid-file", o.files.valid, "--test-file", o.files.test});
    }
    a.insert(a.end(), {"--threads", std::to_string(c.threads), "--backend", std::string(to_string(c.backend)),
                       "--epochs", std::to_string(c.epochs), "--eta", std::to_string(c.eta), "--batches",
                       std::to_string(c.n_batches), "--dim", std::to_string(c.dim), "--lr", shortest(c.lr),
                       "--margin", shortest(c.margin), "--tau", std::to_string(c.tau), "--seed",
                       std::to_string(c.seed), "--norm", std::string(to_string(c.norm))});
    if (!c.normalize_entities) a.emplace_back("--no-normalize");
    if (o.monitor_ram) a.emplace_back("--monitor-ram");
    if (!o.out_csv.empty()) a.insert(a.end(), {"--out", o.out_csv.string()});
    if (!o.save_model.empty()) a.insert(a.end(), {"--save-model", o.save_model.string()});
    a.insert(a.end(), {"--eval", o.eval == EvalMode::rank ? "rank" : "none"});
    return a;
}

void MatrixSpec::validate() const {
    if (models.empty()) throw ArgumentError("matrix: empty model list");
    if (graphs.empty()) throw ArgumentError("matrix: empty graph list");
    if (thread_counts.empty()) throw ArgumentError("matrix: empty thread list");
    if (backends.empty()) throw ArgumentError("matrix: empty backend list");
    if (repeats == 0) throw ArgumentError("matrix: repeats must be >= 1");
    for (auto t : thread_counts)
        if (t == 0) throw ArgumentError("matrix: thread counts must be >= 1");
}

MatrixSpec parse_matrix_spec(std::istream& in, const std::string& source_name) {
    MatrixSpec spec;
    spec.thread_counts = {1};
    spec.backends = {Backend::vectorized};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected key = value");
        const std::string key(trim(view.substr(0, eq)));
        const std::string_view value = trim(view.substr(eq + 1));
        try {
            TrainConfig& c = spec.base;
            if (key == "models") {
                spec.models.clear();
                for (const auto& m : split_list(value, ',')) spec.models.push_back(parse_model_kind(m));
            } else if (key == "graphs") {
                spec.graphs.clear();
                for (const auto& g : split_list(value, ',')) spec.graphs.push_back(parse_graph_source(g));
            } else if (key == "threads") {
                spec.thread_counts.clear();
                for (const auto& t : split_list(value, ',')) spec.thread_counts.push_back(to_number<std::size_t>(t, "threads"));
            } else if (key == "backends") {
                spec.backends.clear();
                for (const auto& b : split_list(value, ',')) spec.backends.push_back(parse_backend(b));
            } else if (key == "repeats") {
                spec.repeats = to_number<std::size_t>(value, "repeats");
            } else if (key == "epochs") {
                c.epochs = to_number<std::size_t>(value, "epochs");
            } else if (key == "eta") {
                c.eta = to_number<std::size_t>(value, "eta");
            } else if (key == "batches") {
                c.n_batches = to_number<std::size_t>(value, "batches");
            } else if (key == "dim") {
                c.dim = to_number<std::size_t>(value, "dim");
            } else if (key == "lr") {
                c.lr = to_number<double>(value, "lr");
            } else if (key == "margin") {
                c.margin = to_number<double>(value, "margin");
            } else if (key == "tau") {
                c.tau = to_number<std::size_t>(value, "tau");
            } else if (key == "seed") {
                c.seed = to_number<std::uint64_t>(value, "seed");
            } else if (key == "norm") {
                c.norm = parse_norm(value);
            } else if (key == "normalize_entities") {
                c.normalize_entities = to_bool(value);
            } else if (key == "monitor_ram") {
                spec.monitor_ram = to_bool(value);
            } else if (key == "train_file") {
                spec.files.train = std::string(value);
            } else if (key == "valid_file") {
                spec.files.valid = std::string(value);
            } else if (key == "test_file") {
                spec.files.test = std::string(value);
            } else {
                throw ArgumentError("unknown key '" + key + "'");
            }
        } catch (const ArgumentError& e) {
            throw ParseError(source_name, line_no, e.what());
        }
    }
    return spec;
}

MatrixSpec load_matrix_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetNotFound("matrix spec not found: " + path.string());
    return parse_matrix_spec(in, path.string());
}

std::vector<ExperimentOptions> expand_matrix(const MatrixSpec& spec, const std::filesystem::path& out_csv) {
    spec.validate();
    std::vector<ExperimentOptions> cells;
    cells.reserve(spec.size());
    for (ModelKind m : spec.models)
        for (const auto& g : spec.graphs)
            for (std::size_t t : spec.thread_counts)
                for (Backend b : spec.backends)
                    for (std::size_t r = 0; r < spec.repeats; ++r) {
                        ExperimentOptions o;
                        o.config = spec.base;
                        o.config.model = m;
                        o.config.threads = t;
                        o.config.backend = b;
                        o.graph = g;
                        o.files = spec.files;
                        o.monitor_ram = spec.monitor_ram;
                        o.out_csv = out_csv;
                        cells.push_back(std::move(o));
                    }
    return cells;
}

namespace {

void require_writable(const std::filesystem::path& csv) {
    std::error_code ec;
    const bool existed = std::filesystem::exists(csv, ec);
    {
        std::ofstream probe(csv, std::ios::app);
        if (!probe) throw IoError("results file is not writable: " + csv.string());
    }
    // An empty file would suppress the header on the first append.
    if (!existed) std::filesystem::remove(csv, ec);
}

std::string describe(const ExperimentOptions& o) {
    return std::string(to_string(o.config.model)) + "/" + graph_name(o.graph) + "/threads=" +
           std::to_string(o.config.threads) + "/" + std::string(to_string(o.config.backend));
}

}  // namespace

MatrixOutcome run_matrix(const MatrixSpec& spec, const std::filesystem::path& out_csv, const ExperimentRunner& runner) {
    spec.validate();
    if (out_csv.empty()) throw ArgumentError("matrix: an output CSV path is required");
    require_writable(out_csv);

    const ExperimentRunner run = runner ? runner : [](const ExperimentOptions& o) { (void)run_experiment(o); };
    MatrixOutcome outcome;
    for (const auto& cell : expand_matrix(spec, out_csv)) {
        try {
            run(cell);
            ++outcome.completed;
        } catch (const std::exception& e) {
            outcome.failures.push_back(describe(cell) + ": " + e.what());
        }
    }
    return outcome;
}

std::string format_stats_table(const std::string& name, const DatasetStats& s) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-16s %10s %10s %10s %10s %10s\n", "graph", "entities", "relations", "train",
                  "valid", "test");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s %10zu %10zu %10zu %10zu %10zu\n", name.c_str(), s.n_entities, s.n_relations,
                  s.n_train, s.n_valid, s.n_test);
    out += buf;
    return out;
}

}  // namespace kge
