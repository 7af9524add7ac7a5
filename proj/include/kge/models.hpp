#pragma once
// TransE, DistMult and ConvKB: parameter storage, score functions and
// analytic gradients.
//
// Scores follow the "higher is more plausible" convention:
//   TransE    f = −‖h + r − t‖  (L1 or L2)
//   DistMult  f = Σ r_i·h_i·t_i
//   ConvKB    f = relu(conv([h r t], Ω)) · w, feature maps concatenated filter-major
//
// Everything is templated on the parameter scalar. Training and benchmarks use
// float; double exists for finite-difference gradient checks.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kge/graph.hpp"
#include "kge/kernels.hpp"

namespace kge {

enum class ModelKind { transe, distmult, convkb };
enum class Norm { l1, l2 };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Norm norm) noexcept;
/// Throws ArgumentError whose message lists the valid model names.
ModelKind parse_model_kind(std::string_view name);
Norm parse_norm(std::string_view name);

inline constexpr std::string_view kValidModels = "transe, distmult, convkb";

/// Dense row-major rows×dim matrix.
template <class T>
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<T> data_;
};

template <class T>
struct ModelParams {
    ModelKind kind = ModelKind::transe;
    Norm norm = Norm::l1;  // TransE only
    EmbeddingTable<T> entities;
    EmbeddingTable<T> relations;
    std::vector<T> filters;  // ConvKB Ω: τ triples (w1, w2, w3), flat
    std::vector<T> w;        // ConvKB dense weights, length τ·d

    std::size_t dim() const noexcept { return entities.dim(); }
    std::size_t tau() const noexcept { return filters.size() / 3; }
    std::size_t n_entities() const noexcept { return entities.rows(); }
    std::size_t n_relations() const noexcept { return relations.rows(); }
    /// Number of shared (non-embedding) parameters: 3τ + τ·d for ConvKB, else 0.
    std::size_t shared_size() const noexcept { return filters.size() + w.size(); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

using Params = ModelParams<float>;

/// Embeddings and ConvKB filters ~ U[−6/√d, 6/√d]; w ~ U[−1/√(τd), 1/√(τd)].
/// `tau` is ignored for TransE and DistMult. Deterministic given seed.
/// Throws ArgumentError on zero entities, relations or dim, or tau == 0 for ConvKB.
template <class T>
ModelParams<T> init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                           std::size_t tau, std::uint64_t seed, Norm norm = Norm::l1);

/// Throws ArgumentError when an index is out of range.
template <class T>
void check_triple(const ModelParams<T>& params, const Triple& triple);

/// Per-thread scratch buffers reused across score/gradient calls.
template <class T>
struct Workspace {
    std::vector<T> a;
    std::vector<T> b;

    void reserve(std::size_t n) {
        if (a.size() < n) a.resize(n);
        if (b.size() < n) b.resize(n);
    }
};

template <class T>
T score_transe(const ModelParams<T>& params, const Triple& triple, Backend backend = Backend::vectorized);
template <class T>
T score_distmult(const ModelParams<T>& params, const Triple& triple, Backend backend = Backend::vectorized);
template <class T>
T score_convkb(const ModelParams<T>& params, const Triple& triple, Backend backend = Backend::vectorized);

/// Dispatches on params.kind.
template <class T>
T score(const ModelParams<T>& params, const Triple& triple, Backend backend = Backend::vectorized);

/// Unchecked hot-path variant; the caller guarantees valid indices.
template <class T>
T score_unchecked(const ModelParams<T>& params, const Triple& triple, Backend backend, Workspace<T>& ws);

template <class T>
struct ScoreGradient {
    std::vector<T> d_head;
    std::vector<T> d_relation;
    std::vector<T> d_tail;
    std::optional<std::vector<T>> d_shared;  // ConvKB: ∂filters (3τ) then ∂w (τ·d)
};

/// Destination rows for gradient accumulation (+=). d_head and d_tail may
/// refer to the same memory when the triple's head equals its tail.
template <class T>
struct GradientSink {
    std::span<T> d_head;
    std::span<T> d_relation;
    std::span<T> d_tail;
    std::span<T> d_filters;  // empty unless ConvKB
    std::span<T> d_w;        // empty unless ConvKB
};

/// Adds upstream·∂f/∂θ for the triple's three rows (and ConvKB shared
/// parameters) into `sink`. TransE-L1 uses sign(0) = 0; TransE-L2 has zero
/// gradient at zero residual; relu'(0) = 0.
template <class T>
void accumulate_grad(const ModelParams<T>& params, const Triple& triple, T upstream, Backend backend,
                     const GradientSink<T>& sink, Workspace<T>& ws);

/// Analytic gradient of the score scaled by `upstream`. Throws ArgumentError
/// when `kind` does not match params.kind or indices are invalid.
template <class T>
ScoreGradient<T> grad(ModelKind kind, const ModelParams<T>& params, const Triple& triple, T upstream,
                      Backend backend = Backend::scalar);

/// Scores every triple, partitioning the list contiguously over `threads`
/// workers. Invalid triples raise ArgumentError naming their position.
template <class T>
std::vector<T> score_batch(const ModelParams<T>& params, std::span<const Triple> triples, Backend backend,
                           std::size_t threads);

}  // namespace kge
