#pragma once
// Mini-batch training: uniform head/tail corruption, pairwise max-margin loss,
// sparse Adam and data-parallel gradient accumulation.
//
// Per epoch e the train split is shuffled with a generator seeded by
// mix_seed(seed, e) and cut into n_batches contiguous batches. Each batch is
// split contiguously over `threads` workers; every worker scores its positives
// and their negatives and accumulates gradients into a private sparse buffer.
// Buffers are merged in ascending worker order, then one Adam step is taken on
// the calling thread. Negatives for the positive at batch position i come from
// SplitMix64(mix_seed(batch_seed, i)), so the sampled negatives do not depend
// on the thread count.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kge/graph.hpp"
#include "kge/kernels.hpp"
#include "kge/metrics.hpp"
#include "kge/models.hpp"
#include "kge/rng.hpp"
#include "kge/thread_pool.hpp"

namespace kge {

struct TrainConfig {
    ModelKind model = ModelKind::transe;
    std::size_t dim = 256;
    std::size_t epochs = 500;
    std::size_t eta = 2;
    std::size_t n_batches = 100;
    double lr = 0.01;
    double margin = 1.0;
    std::size_t threads = 1;
    Backend backend = Backend::vectorized;
    std::uint64_t seed = 0;
    bool normalize_entities = true;  // applied to TransE only
    std::size_t tau = 32;
    Norm norm = Norm::l1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    /// Throws ArgumentError naming the first violated constraint.
    void validate() const;
};

/// `eta` corruptions of `positive`: each copies it and replaces the head or
/// the tail (probability 1/2 each) with an entity drawn uniformly from
/// [0, n_entities), which may reproduce the positive. The relation is never
/// corrupted and collisions with true triples are not filtered. Throws ArgumentError when n_entities < 2 or eta == 0.
std::vector<Triple> sample_negatives(const Triple& positive, std::size_t eta, std::size_t n_entities,
                                     SplitMix64& rng);

/// max(0, margin − pos + neg)
double pairwise_loss(double pos_score, double neg_score, double margin);

/// Balanced contiguous split of [0, n_train) into n_batches ranges.
/// Throws ArgumentError when n_batches == 0, n_train == 0 or n_batches > n_train.
std::vector<Range> epoch_batches(std::size_t n_train, std::size_t n_batches);

/// Row-sparse gradient buffer: rows are materialised (zeroed) on first touch
/// and listed in first-touch order.
class SparseRows {
public:
    explicit SparseRows(std::size_t dim = 0) : dim_(dim) {}

    std::span<float> row(Index index);
    std::span<const float> row_at(std::size_t slot) const { return {values_.data() + slot * dim_, dim_}; }
    const std::vector<Index>& touched() const noexcept { return order_; }
    bool contains(Index index) const { return slot_.count(index) != 0; }
    std::size_t dim() const noexcept { return dim_; }
    void clear();
    /// Adds every row of `other` into this buffer, visiting other's rows in order.
    void merge(const SparseRows& other);

private:
    std::size_t dim_;
    std::unordered_map<Index, std::size_t> slot_;
    std::vector<Index> order_;
    std::vector<float> values_;
};

struct Gradients {
    SparseRows entities;
    SparseRows relations;
    std::vector<float> shared;  // ConvKB filters then w; empty otherwise

    Gradients() = default;
    Gradients(std::size_t dim, std::size_t shared_size) : entities(dim), relations(dim), shared(shared_size) {}
    void clear();
    void merge(const Gradients& other);
};

struct AdamState {
    EmbeddingTable<float> m_entities, v_entities;
    EmbeddingTable<float> m_relations, v_relations;
    std::vector<float> m_shared, v_shared;
    std::uint64_t timestep = 0;

    static AdamState zeros_like(const Params& params);
};

struct AdamHyper {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam. Moments of embedding rows are updated only for the
/// rows present in `grads`; shared ConvKB parameters are updated densely.
/// Increments state.timestep once. Throws ArgumentError on shape mismatch.
void adam_step(Params& params, const Gradients& grads, AdamState& state, const AdamHyper& hyper,
               Backend backend = Backend::vectorized);

struct TrainingTimings {
    double wall_train_seconds = 0.0;
    double cpu_train_seconds = 0.0;
    std::vector<double> epoch_wall_seconds;
};

struct TrainResult {
    Params params;
    TrainingTimings timings;
    std::vector<double> epoch_losses;  // mean batch loss per epoch
};

class Trainer {
public:
    /// Initialises parameters from config.seed.
    Trainer(const KnowledgeGraph& kg, TrainConfig config);
    /// Trains starting from `initial` (must match the graph and config shapes).
    Trainer(const KnowledgeGraph& kg, TrainConfig config, Params initial);

    /// One pass over the train split; returns the mean batch loss.
    double run_epoch(std::size_t epoch);

    /// One optimizer step on `batch`; returns the batch loss evaluated before
    /// the step. Negatives are derived from `batch_seed`.
    double train_batch(std::span<const Triple> batch, std::uint64_t batch_seed);

    const Params& params() const noexcept { return params_; }
    Params release_params() { return std::move(params_); }
    const AdamState& adam() const noexcept { return adam_; }
    const TrainConfig& config() const noexcept { return config_; }

private:
    void normalize_touched(const SparseRows& rows);

    const KnowledgeGraph& kg_;
    TrainConfig config_;
    Params params_;
    AdamState adam_;
    std::vector<Triple> order_;
    ThreadPool pool_;
    std::vector<Gradients> worker_grads_;
    std::vector<Workspace<float>> workspaces_;
    std::vector<double> worker_loss_;
};

/// Full training run timed as one phase. Throws ArgumentError on an invalid
/// config or an empty train split.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config);
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config, Params initial);

}  // namespace kge
