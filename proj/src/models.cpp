#include "kge/models.hpp"

#include <cmath>
#include <random>
#include <string>

#include "kge/errors.hpp"
#include "kge/thread_pool.hpp"

namespace kge {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::transe: return "transe";
        case ModelKind::distmult: return "distmult";
        case ModelKind::convkb: return "convkb";
    }
    return "unknown";
}

std::string_view to_string(Norm norm) noexcept { return norm == Norm::l1 ? "l1" : "l2"; }

ModelKind parse_model_kind(std::string_view name) {
    if (name == "transe") return ModelKind::transe;
    if (name == "distmult") return ModelKind::distmult;
    if (name == "convkb") return ModelKind::convkb;
    throw ArgumentError("unknown model '" + std::string(name) + "' (valid models: " + std::string(kValidModels) + ")");
}

Norm parse_norm(std::string_view name) {
    if (name == "l1" || name == "L1") return Norm::l1;
    if (name == "l2" || name == "L2") return Norm::l2;
    throw ArgumentError("unknown norm '" + std::string(name) + "' (valid: l1, l2)");
}

template <class T>
ModelParams<T> init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                           std::size_t tau, std::uint64_t seed, Norm norm) {
    if (n_entities == 0) throw ArgumentError("init_params: zero entities");
    if (n_relations == 0) throw ArgumentError("init_params: zero relations");
    if (dim == 0) throw ArgumentError("init_params: dim must be >= 1");
    if (kind == ModelKind::convkb && tau == 0) throw ArgumentError("init_params: ConvKB needs tau >= 1");

    ModelParams<T> p;
    p.kind = kind;
    p.norm = norm;
    p.entities = EmbeddingTable<T>(n_entities, dim);
    p.relations = EmbeddingTable<T>(n_relations, dim);

    std::mt19937_64 rng(seed);
    const T bound = static_cast<T>(6.0 / std::sqrt(static_cast<double>(dim)));
    std::uniform_real_distribution<T> emb(-bound, bound);
    for (auto& x : p.entities.data()) x = emb(rng);
    for (auto& x : p.relations.data()) x = emb(rng);

    if (kind == ModelKind::convkb) {
        p.filters.resize(3 * tau);
        for (auto& x : p.filters) x = emb(rng);
        const T wb = static_cast<T>(1.0 / std::sqrt(static_cast<double>(tau * dim)));
        std::uniform_real_distribution<T> wd(-wb, wb);
        p.w.resize(tau * dim);
        for (auto& x : p.w) x = wd(rng);
    }
    return p;
}

template <class T>
void check_triple(const ModelParams<T>& params, const Triple& t) {
    if (t.head >= params.n_entities() || t.tail >= params.n_entities())
        throw ArgumentError("entity index out of range (" + std::to_string(t.head) + ", " + std::to_string(t.tail) +
                            " vs " + std::to_string(params.n_entities()) + " entities)");
    if (t.relation >= params.n_relations())
        throw ArgumentError("relation index " + std::to_string(t.relation) + " out of range (" +
                            std::to_string(params.n_relations()) + " relations)");
}

namespace {

template <class T>
T transe_unchecked(const ModelParams<T>& p, const Triple& t, Backend b) {
    const auto h = p.entities.row(t.head);
    const auto r = p.relations.row(t.relation);
    const auto tl = p.entities.row(t.tail);
    return p.norm == Norm::l1 ? -kernels::translation_l1(b, h, r, tl) : -kernels::translation_l2(b, h, r, tl);
}

template <class T>
T distmult_unchecked(const ModelParams<T>& p, const Triple& t, Backend b) {
    return kernels::trilinear(b, p.entities.row(t.head), p.relations.row(t.relation), p.entities.row(t.tail));
}

// Leaves the pre-activation feature map in ws.a[0, τd).
template <class T>
T convkb_unchecked(const ModelParams<T>& p, const Triple& t, Backend b, Workspace<T>& ws) {
    const std::size_t n = p.tau() * p.dim();
    ws.reserve(n);
    std::span<T> feat(ws.a.data(), n);
    std::span<T> act(ws.b.data(), n);
    kernels::conv3_rows(b, p.entities.row(t.head), p.relations.row(t.relation), p.entities.row(t.tail),
                        std::span<const T>(p.filters), feat);
    kernels::relu(b, std::span<const T>(feat), act);
    return kernels::dot(b, std::span<const T>(act), std::span<const T>(p.w));
}

}  // namespace

template <class T>
T score_transe(const ModelParams<T>& params, const Triple& triple, Backend backend) {
    check_triple(params, triple);
    return transe_unchecked(params, triple, backend);
}

template <class T>
T score_distmult(const ModelParams<T>& params, const Triple& triple, Backend backend) {
    check_triple(params, triple);
    return distmult_unchecked(params, triple, backend);
}

template <class T>
T score_convkb(const ModelParams<T>& params, const Triple& triple, Backend backend) {
    check_triple(params, triple);
    if (params.tau() == 0 || params.w.size() != params.tau() * params.dim())
        throw ArgumentError("ConvKB parameters need tau >= 1 and |w| == tau*d");
    Workspace<T> ws;
    return convkb_unchecked(params, triple, backend, ws);
}

template <class T>
T score_unchecked(const ModelParams<T>& params, const Triple& triple, Backend backend, Workspace<T>& ws) {
    switch (params.kind) {
        case ModelKind::transe: return transe_unchecked(params, triple, backend);
        case ModelKind::distmult: return distmult_unchecked(params, triple, backend);
        case ModelKind::convkb: return convkb_unchecked(params, triple, backend, ws);
    }
    throw ArgumentError("unknown model kind");
}

template <class T>
T score(const ModelParams<T>& params, const Triple& triple, Backend backend) {
    switch (params.kind) {
        case ModelKind::transe: return score_transe(params, triple, backend);
        case ModelKind::distmult: return score_distmult(params, triple, backend);
        case ModelKind::convkb: return score_convkb(params, triple, backend);
    }
    throw ArgumentError("unknown model kind");
}

template <class T>
void accumulate_grad(const ModelParams<T>& p, const Triple& t, T upstream, Backend b, const GradientSink<T>& sink,
                     Workspace<T>& ws) {
    using CS = std::span<const T>;
    const std::size_t d = p.dim();
    const CS h = p.entities.row(t.head);
    const CS r = p.relations.row(t.relation);
    const CS tl = p.entities.row(t.tail);

    auto add = [b](T alpha, CS x, std::span<T> out) { kernels::axpy(b, alpha, x, CS(out), out); };

    switch (p.kind) {
        case ModelKind::transe: {
            // f = −‖u‖ with u = h + r − t; ∂f/∂h = ∂f/∂r = −∂‖u‖/∂u, ∂f/∂t = +∂‖u‖/∂u.
            ws.reserve(d);
            std::span<T> unit(ws.a.data(), d);
            if (p.norm == Norm::l1) {
                kernels::translation_sign(b, h, r, tl, unit);
            } else {
                kernels::translation_residual(b, h, r, tl, unit);
                const T len = std::sqrt(kernels::dot(b, CS(unit), CS(unit)));
                if (len == T(0)) return;
                const T inv = T(1) / len;
                for (auto& x : unit) x *= inv;
            }
            add(-upstream, unit, sink.d_head);
            add(-upstream, unit, sink.d_relation);
            add(upstream, unit, sink.d_tail);
            return;
        }
        case ModelKind::distmult: {
            ws.reserve(d);
            std::span<T> tmp(ws.a.data(), d);
            kernels::hadamard(b, r, tl, tmp);
            add(upstream, tmp, sink.d_head);
            kernels::hadamard(b, h, tl, tmp);
            add(upstream, tmp, sink.d_relation);
            kernels::hadamard(b, h, r, tmp);
            add(upstream, tmp, sink.d_tail);
            return;
        }
        case ModelKind::convkb: {
            const std::size_t tau = p.tau();
            const std::size_t n = tau * d;
            convkb_unchecked(p, t, b, ws);  // ws.a = feat, ws.b = relu(feat)
            std::span<T> feat(ws.a.data(), n);
            std::span<T> act(ws.b.data(), n);
            // ∂f/∂w = relu(feat)
            add(upstream, act, sink.d_w);
            // ∂f/∂feat = w ⊙ [feat > 0], written over act.
            kernels::relu_backward(b, CS(feat), CS(p.w), act);
            for (std::size_t k = 0; k < tau; ++k) {
                const CS gk(act.data() + k * d, d);
                const T w1 = p.filters[3 * k], w2 = p.filters[3 * k + 1], w3 = p.filters[3 * k + 2];
                sink.d_filters[3 * k] += upstream * kernels::dot(b, gk, h);
                sink.d_filters[3 * k + 1] += upstream * kernels::dot(b, gk, r);
                sink.d_filters[3 * k + 2] += upstream * kernels::dot(b, gk, tl);
                add(upstream * w1, gk, sink.d_head);
                add(upstream * w2, gk, sink.d_relation);
                add(upstream * w3, gk, sink.d_tail);
            }
            return;
        }
    }
    throw ArgumentError("unknown model kind");
}

template <class T>
ScoreGradient<T> grad(ModelKind kind, const ModelParams<T>& params, const Triple& triple, T upstream,
                      Backend backend) {
    if (kind != ModelKind::transe && kind != ModelKind::distmult && kind != ModelKind::convkb)
        throw ArgumentError("grad: unknown model kind");
    if (kind != params.kind) throw ArgumentError("grad: model kind does not match parameters");
    check_triple(params, triple);

    const std::size_t d = params.dim();
    ScoreGradient<T> g;
    g.d_head.assign(d, T(0));
    g.d_relation.assign(d, T(0));
    g.d_tail.assign(d, T(0));
    GradientSink<T> sink{g.d_head, g.d_relation, g.d_tail, {}, {}};
    if (kind == ModelKind::convkb) {
        g.d_shared.emplace(params.shared_size(), T(0));
        auto& shared = *g.d_shared;
        sink.d_filters = std::span<T>(shared.data(), params.filters.size());
        sink.d_w = std::span<T>(shared.data() + params.filters.size(), params.w.size());
    }
    Workspace<T> ws;
    accumulate_grad(params, triple, upstream, backend, sink, ws);
    return g;
}

template <class T>
std::vector<T> score_batch(const ModelParams<T>& params, std::span<const Triple> triples, Backend backend,
                           std::size_t threads) {
    if (threads == 0) throw ArgumentError("score_batch: threads must be >= 1");
    for (std::size_t i = 0; i < triples.size(); ++i) {
        try {
            check_triple(params, triples[i]);
        } catch (const ArgumentError& e) {
            throw ArgumentError("triple #" + std::to_string(i) + ": " + e.what());
        }
    }
    std::vector<T> out(triples.size());
    const auto parts = split_even(triples.size(), threads);
    auto work = [&](std::size_t worker) {
        Workspace<T> ws;
        for (std::size_t i = parts[worker].begin; i < parts[worker].end; ++i)
            out[i] = score_unchecked(params, triples[i], backend, ws);
    };
    if (threads == 1) {
        work(0);
    } else {
        ThreadPool pool(threads);
        pool.run(work);
    }
    return out;
}

#define KGE_INSTANTIATE(T)                                                                                        \
    template ModelParams<T> init_params<T>(ModelKind, std::size_t, std::size_t, std::size_t, std::size_t,        \
                                           std::uint64_t, Norm);                                                  \
    template void check_triple<T>(const ModelParams<T>&, const Triple&);                                          \
    template T score_transe<T>(const ModelParams<T>&, const Triple&, Backend);                                    \
    template T score_distmult<T>(const ModelParams<T>&, const Triple&, Backend);                                  \
    template T score_convkb<T>(const ModelParams<T>&, const Triple&, Backend);                                    \
    template T score<T>(const ModelParams<T>&, const Triple&, Backend);                                           \
    template T score_unchecked<T>(const ModelParams<T>&, const Triple&, Backend, Workspace<T>&);                  \
    template void accumulate_grad<T>(const ModelParams<T>&, const Triple&, T, Backend, const GradientSink<T>&,    \
                                     Workspace<T>&);                                                              \
    template ScoreGradient<T> grad<T>(ModelKind, const ModelParams<T>&, const Triple&, T, Backend);               \
    template std::vector<T> score_batch<T>(const ModelParams<T>&, std::span<const Triple>, Backend, std::size_t);

KGE_INSTANTIATE(float)
KGE_INSTANTIATE(double)
#undef KGE_INSTANTIATE

}  // namespace kge
