#pragma once
// Timed inference phases and link-prediction ranking.
//
// "Entity inference" and "relation inference" are timed retrievals of
// embedding rows (copies), the cheapest reading of the benchmark's
// per-element inference phases.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "kge/graph.hpp"
#include "kge/metrics.hpp"
#include "kge/models.hpp"

namespace kge {

struct TripleScores {
    std::vector<float> scores;
    PhaseTiming timing;
};

struct EmbeddingRows {
    std::vector<std::vector<float>> rows;
    PhaseTiming timing;
};

/// score_batch over `triples`, timed as one phase.
TripleScores infer_triples(const Params& params, std::span<const Triple> triples, Backend backend,
                           std::size_t threads);

/// Copies of the requested entity / relation rows, timed. Throws ArgumentError
/// on an out-of-range index.
EmbeddingRows infer_entities(const Params& params, std::span<const Index> entity_indices);
EmbeddingRows infer_relations(const Params& params, std::span<const Index> relation_indices);

/// Distinct entities / relations appearing in `triples`, in first-appearance order.
std::vector<Index> entities_of(std::span<const Triple> triples);
std::vector<Index> relations_of(std::span<const Triple> triples);

enum class RankMode { raw, filtered };

struct RankResult {
    double mrr = 0.0;
    std::map<std::size_t, double> hits_at;  // k ∈ {1, 3, 10}
    std::size_t n_queries = 0;              // test triples; each yields a tail and a head query
    std::vector<std::size_t> ranks;         // per test triple i: [2i] tail query, [2i+1] head query
};

/// Ranks every test triple against all candidate tails and all candidate
/// heads. Ties count against the model (rank = 1 + #candidates scoring ≥ the
/// true entity). Filtered mode drops candidates that form a triple in `known`
/// other than the query itself. Work is split over `threads` workers by query.
/// Throws ArgumentError on an empty test set.
RankResult rank_queries(const Params& params, std::span<const Triple> test, std::span<const Triple> known,
                        RankMode mode, Backend backend = Backend::vectorized, std::size_t threads = 1);

/// Same protocol for an arbitrary scoring function (single-threaded).
RankResult rank_queries(const std::function<double(const Triple&)>& scorer, std::size_t n_entities,
                        std::span<const Triple> test, std::span<const Triple> known, RankMode mode);

}  // namespace kge
