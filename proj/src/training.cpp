#include "kge/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kge/errors.hpp"

namespace kge {

void TrainConfig::validate() const {
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (eta < 1) throw ArgumentError("eta must be >= 1");
    if (n_batches < 1) throw ArgumentError("batches must be >= 1");
    if (threads < 1) throw ArgumentError("threads must be >= 1");
    if (dim < 1) throw ArgumentError("dim must be >= 1");
    if (!(lr > 0.0)) throw ArgumentError("lr must be > 0");
    if (!(margin >= 0.0)) throw ArgumentError("margin must be >= 0");
    if (model == ModelKind::convkb && tau < 1) throw ArgumentError("tau must be >= 1 for convkb");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ArgumentError("adam betas must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ArgumentError("adam eps must be > 0");
}

std::vector<Triple> sample_negatives(const Triple& positive, std::size_t eta, std::size_t n_entities,
                                     SplitMix64& rng) {
    if (n_entities < 2) throw ArgumentError("negative sampling needs at least 2 entities");
    if (eta == 0) throw ArgumentError("eta must be >= 1");
    std::uniform_int_distribution<Index> pick(0, static_cast<Index>(n_entities - 1));
    std::vector<Triple> out(eta, positive);
    for (auto& neg : out) {
        const bool corrupt_head = (rng() >> 63) != 0;
        (corrupt_head ? neg.head : neg.tail) = pick(rng);
    }
    return out;
}

double pairwise_loss(double pos_score, double neg_score, double margin) {
    return std::max(0.0, margin - pos_score + neg_score);
}

std::vector<Range> epoch_batches(std::size_t n_train, std::size_t n_batches) {
    if (n_batches == 0) throw ArgumentError("n_batches must be >= 1");
    if (n_train == 0) throw ArgumentError("empty training split");
    if (n_batches > n_train)
        throw ArgumentError("n_batches (" + std::to_string(n_batches) + ") exceeds training triples (" +
                            std::to_string(n_train) + ")");
    return split_even(n_train, n_batches);
}

std::span<float> SparseRows::row(Index index) {
    auto [it, inserted] = slot_.try_emplace(index, order_.size());
    if (inserted) {
        order_.push_back(index);
        values_.resize(values_.size() + dim_, 0.0f);
    }
    return {values_.data() + it->second * dim_, dim_};
}

void SparseRows::clear() {
    slot_.clear();
    order_.clear();
    values_.clear();
}

void SparseRows::merge(const SparseRows& other) {
    for (std::size_t s = 0; s < other.order_.size(); ++s) {
        auto dst = row(other.order_[s]);
        const auto src = other.row_at(s);
        for (std::size_t i = 0; i < dim_; ++i) dst[i] += src[i];
    }
}

void Gradients::clear() {
    entities.clear();
    relations.clear();
    std::fill(shared.begin(), shared.end(), 0.0f);
}

void Gradients::merge(const Gradients& other) {
    entities.merge(other.entities);
    relations.merge(other.relations);
    for (std::size_t i = 0; i < shared.size(); ++i) shared[i] += other.shared[i];
}

AdamState AdamState::zeros_like(const Params& p) {
    AdamState s;
    s.m_entities = EmbeddingTable<float>(p.n_entities(), p.dim());
    s.v_entities = EmbeddingTable<float>(p.n_entities(), p.dim());
    s.m_relations = EmbeddingTable<float>(p.n_relations(), p.dim());
    s.v_relations = EmbeddingTable<float>(p.n_relations(), p.dim());
    s.m_shared.assign(p.shared_size(), 0.0f);
    s.v_shared.assign(p.shared_size(), 0.0f);
    return s;
}

void adam_step(Params& params, const Gradients& grads, AdamState& state, const AdamHyper& hyper, Backend backend) {
    const std::size_t d = params.dim();
    if (state.m_entities.rows() != params.n_entities() || state.m_entities.dim() != d ||
        state.m_relations.rows() != params.n_relations() || state.m_relations.dim() != d ||
        state.m_shared.size() != params.shared_size())
        throw ArgumentError("adam_step: optimizer state does not match parameter shapes");
    if (grads.entities.dim() != d || grads.relations.dim() != d || grads.shared.size() != params.shared_size())
        throw ArgumentError("adam_step: gradient shapes do not match parameters");

    ++state.timestep;
    const double t = static_cast<double>(state.timestep);
    const kernels::AdamCoefficients c{hyper.lr, hyper.beta1, hyper.beta2, hyper.eps,
                                      1.0 - std::pow(hyper.beta1, t), 1.0 - std::pow(hyper.beta2, t)};

    auto update_rows = [&](const SparseRows& g, EmbeddingTable<float>& theta, EmbeddingTable<float>& m,
                           EmbeddingTable<float>& v) {
        const auto& rows = g.touched();
        for (std::size_t s = 0; s < rows.size(); ++s) {
            const Index r = rows[s];
            if (r >= theta.rows()) throw ArgumentError("adam_step: gradient row out of range");
            kernels::adam_update(backend, c, theta.row(r), m.row(r), v.row(r), g.row_at(s));
        }
    };
    update_rows(grads.entities, params.entities, state.m_entities, state.v_entities);
    update_rows(grads.relations, params.relations, state.m_relations, state.v_relations);

    if (!grads.shared.empty()) {
        const std::size_t nf = params.filters.size();
        const std::span<const float> g(grads.shared);
        kernels::adam_update(backend, c, std::span<float>(params.filters), std::span<float>(state.m_shared).first(nf),
                             std::span<float>(state.v_shared).first(nf), g.first(nf));
        kernels::adam_update(backend, c, std::span<float>(params.w), std::span<float>(state.m_shared).subspan(nf),
                             std::span<float>(state.v_shared).subspan(nf), g.subspan(nf));
    }
}

namespace {

Params checked_initial(const KnowledgeGraph& kg, const TrainConfig& config) {
    config.validate();
    if (kg.train.empty()) throw ArgumentError("empty training split");
    return init_params<float>(config.model, kg.entities.size(), kg.relations.size(), config.dim, config.tau,
                              config.seed, config.norm);
}

bool normalizes(const TrainConfig& c) { return c.normalize_entities && c.model == ModelKind::transe; }

}  // namespace

Trainer::Trainer(const KnowledgeGraph& kg, TrainConfig config)
    : Trainer(kg, config, checked_initial(kg, config)) {}

Trainer::Trainer(const KnowledgeGraph& kg, TrainConfig config, Params initial)
    : kg_(kg), config_(config), params_(std::move(initial)), order_(kg.train), pool_(config.threads) {
    config_.validate();
    if (kg_.train.empty()) throw ArgumentError("empty training split");
    if (params_.kind != config_.model || params_.dim() != config_.dim ||
        params_.n_entities() != kg_.entities.size() || params_.n_relations() != kg_.relations.size())
        throw ArgumentError("initial parameters do not match graph and config");
    if (kg_.entities.size() < 2) throw ArgumentError("training needs at least 2 entities");
    // Fail fast, before the first epoch, when the split is too small.
    (void)epoch_batches(kg_.train.size(), config_.n_batches);

    adam_ = AdamState::zeros_like(params_);
    worker_grads_.assign(config_.threads, Gradients(params_.dim(), params_.shared_size()));
    workspaces_.resize(config_.threads);
    worker_loss_.assign(config_.threads, 0.0);

    if (normalizes(config_))
        for (std::size_t e = 0; e < params_.n_entities(); ++e)
            kernels::l2_normalize(config_.backend, params_.entities.row(e));
}

void Trainer::normalize_touched(const SparseRows& rows) {
    for (Index e : rows.touched()) kernels::l2_normalize(config_.backend, params_.entities.row(e));
}

double Trainer::train_batch(std::span<const Triple> batch, std::uint64_t batch_seed) {
    if (batch.empty()) return 0.0;
    const std::size_t T = config_.threads;
    const auto parts = split_even(batch.size(), T);
    const float inv_b = 1.0f / static_cast<float>(batch.size());
    const auto margin = static_cast<float>(config_.margin);
    const Backend backend = config_.backend;
    const std::size_t n_entities = params_.n_entities();
    const std::size_t n_filters = params_.filters.size();

    auto work = [&](std::size_t w) {
        Gradients& g = worker_grads_[w];
        Workspace<float>& ws = workspaces_[w];
        g.clear();
        double loss = 0.0;
        std::span<float> d_filters, d_w;
        if (!g.shared.empty()) {
            d_filters = std::span<float>(g.shared).first(n_filters);
            d_w = std::span<float>(g.shared).subspan(n_filters);
        }
        auto sink_for = [&](const Triple& t) {
            // Materialise both entity rows before taking spans: inserting a row
            // may reallocate the buffer.
            (void)g.entities.row(t.head);
            (void)g.entities.row(t.tail);
            return GradientSink<float>{g.entities.row(t.head), g.relations.row(t.relation), g.entities.row(t.tail),
                                       d_filters, d_w};
        };
        for (std::size_t i = parts[w].begin; i < parts[w].end; ++i) {
            const Triple& pos = batch[i];
            SplitMix64 rng(mix_seed(batch_seed, i));
            const auto negs = sample_negatives(pos, config_.eta, n_entities, rng);
            const float pos_score = score_unchecked(params_, pos, backend, ws);
            std::size_t active = 0;
            for (const Triple& neg : negs) {
                const float neg_score = score_unchecked(params_, neg, backend, ws);
                const float l = margin - pos_score + neg_score;
                if (l > 0.0f) {
                    loss += l;
                    ++active;
                    accumulate_grad(params_, neg, inv_b, backend, sink_for(neg), ws);
                }
            }
            if (active > 0)
                accumulate_grad(params_, pos, -static_cast<float>(active) * inv_b, backend, sink_for(pos), ws);
        }
        worker_loss_[w] = loss;
    };
    pool_.run(work);

    Gradients& total = worker_grads_[0];
    double loss = worker_loss_[0];
    for (std::size_t w = 1; w < T; ++w) {
        total.merge(worker_grads_[w]);
        loss += worker_loss_[w];
    }

    adam_step(params_, total, adam_, {config_.lr, config_.adam_beta1, config_.adam_beta2, config_.adam_eps}, backend);
    if (normalizes(config_)) normalize_touched(total.entities);
    return loss / static_cast<double>(batch.size());
}

double Trainer::run_epoch(std::size_t epoch) {
    const std::uint64_t epoch_seed = mix_seed(config_.seed, epoch);
    std::mt19937_64 shuffle_rng(epoch_seed);
    std::shuffle(order_.begin(), order_.end(), shuffle_rng);

    const auto batches = epoch_batches(order_.size(), config_.n_batches);
    double sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const std::span<const Triple> batch(order_.data() + batches[b].begin, batches[b].size());
        sum += train_batch(batch, mix_seed(epoch_seed, b));
    }
    return sum / static_cast<double>(batches.size());
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config) {
    return train(kg, config, checked_initial(kg, config));
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config, Params initial) {
    config.validate();
    if (kg.train.empty()) throw ArgumentError("empty training split");

    TrainResult result;
    PhaseTimer timer;
    Trainer trainer(kg, config, std::move(initial));
    result.epoch_losses.reserve(config.epochs);
    result.timings.epoch_wall_seconds.reserve(config.epochs);
    for (std::size_t e = 0; e < config.epochs; ++e) {
        const double start = wall_now();
        result.epoch_losses.push_back(trainer.run_epoch(e));
        result.timings.epoch_wall_seconds.push_back(wall_now() - start);
    }
    const PhaseTiming t = timer.elapsed();
    result.timings.wall_train_seconds = t.wall_seconds;
    result.timings.cpu_train_seconds = t.cpu_seconds;
    result.params = trainer.release_params();
    return result;
}

}  // namespace kge
