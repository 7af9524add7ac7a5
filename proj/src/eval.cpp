#include "kge/eval.hpp"

#include <string>
#include <unordered_set>

#include "kge/errors.hpp"
#include "kge/thread_pool.hpp"

namespace kge {

TripleScores infer_triples(const Params& params, std::span<const Triple> triples, Backend backend,
                           std::size_t threads) {
    auto [scores, timing] = time_phase([&] { return score_batch(params, triples, backend, threads); });
    return {std::move(scores), timing};
}

namespace {

EmbeddingRows copy_rows(const EmbeddingTable<float>& table, std::span<const Index> indices, const char* what) {
    for (Index i : indices)
        if (i >= table.rows())
            throw ArgumentError(std::string(what) + " index " + std::to_string(i) + " out of range");
    auto [rows, timing] = time_phase([&] {
        std::vector<std::vector<float>> out;
        out.reserve(indices.size());
        for (Index i : indices) {
            const auto r = table.row(i);
            out.emplace_back(r.begin(), r.end());
        }
        return out;
    });
    return {std::move(rows), timing};
}

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t k = (static_cast<std::uint64_t>(t.head) << 32) | t.tail;
        k ^= static_cast<std::uint64_t>(t.relation) * 0x9E3779B97F4A7C15ULL;
        k ^= k >> 33;
        k *= 0xFF51AFD7ED558CCDULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

// Ranks the tail and head queries of test[i] into ranks[2i], ranks[2i+1].
template <class Score>
void rank_one(const Triple& q, std::size_t i, std::size_t n_entities, const TripleSet* known, Score&& score,
              std::vector<std::size_t>& ranks) {
    for (int side = 0; side < 2; ++side) {
        const double truth = score(q);
        std::size_t rank = 1;
        Triple cand = q;
        for (Index e = 0; e < n_entities; ++e) {
            if (side == 0) {
                if (e == q.tail) continue;
                cand.tail = e;
            } else {
                if (e == q.head) continue;
                cand.head = e;
            }
            if (known && known->count(cand)) continue;
            if (score(cand) >= truth) ++rank;
        }
        ranks[2 * i + side] = rank;
    }
}

RankResult summarize(std::vector<std::size_t> ranks, std::size_t n_queries) {
    RankResult r;
    r.n_queries = n_queries;
    double rr = 0.0;
    std::size_t h1 = 0, h3 = 0, h10 = 0;
    for (std::size_t k : ranks) {
        rr += 1.0 / static_cast<double>(k);
        h1 += k <= 1;
        h3 += k <= 3;
        h10 += k <= 10;
    }
    const double n = static_cast<double>(ranks.size());
    r.mrr = rr / n;
    r.hits_at = {{1, h1 / n}, {3, h3 / n}, {10, h10 / n}};
    r.ranks = std::move(ranks);
    return r;
}

}  // namespace

EmbeddingRows infer_entities(const Params& params, std::span<const Index> entity_indices) {
    return copy_rows(params.entities, entity_indices, "entity");
}

EmbeddingRows infer_relations(const Params& params, std::span<const Index> relation_indices) {
    return copy_rows(params.relations, relation_indices, "relation");
}

std::vector<Index> entities_of(std::span<const Triple> triples) {
    std::vector<Index> out;
    std::unordered_set<Index> seen;
    for (const auto& t : triples)
        for (Index e : {t.head, t.tail})
            if (seen.insert(e).second) out.push_back(e);
    return out;
}

std::vector<Index> relations_of(std::span<const Triple> triples) {
    std::vector<Index> out;
    std::unordered_set<Index> seen;
    for (const auto& t : triples)
        if (seen.insert(t.relation).second) out.push_back(t.relation);
    return out;
}

RankResult rank_queries(const Params& params, std::span<const Triple> test, std::span<const Triple> known,
                        RankMode mode, Backend backend, std::size_t threads) {
    if (test.empty()) throw ArgumentError("rank_queries: empty test set");
    if (threads == 0) throw ArgumentError("rank_queries: threads must be >= 1");
    for (const auto& t : test) check_triple(params, t);

    TripleSet known_set;
    if (mode == RankMode::filtered) known_set.insert(known.begin(), known.end());
    const TripleSet* filter = mode == RankMode::filtered ? &known_set : nullptr;

    std::vector<std::size_t> ranks(2 * test.size());
    const auto parts = split_even(test.size(), threads);
    ThreadPool pool(threads);
    pool.run([&](std::size_t w) {
        Workspace<float> ws;
        auto score = [&](const Triple& t) { return static_cast<double>(score_unchecked(params, t, backend, ws)); };
        for (std::size_t i = parts[w].begin; i < parts[w].end; ++i)
            rank_one(test[i], i, params.n_entities(), filter, score, ranks);
    });
    return summarize(std::move(ranks), test.size());
}

RankResult rank_queries(const std::function<double(const Triple&)>& scorer, std::size_t n_entities,
                        std::span<const Triple> test, std::span<const Triple> known, RankMode mode) {
    if (test.empty()) throw ArgumentError("rank_queries: empty test set");
    TripleSet known_set;
    if (mode == RankMode::filtered) known_set.insert(known.begin(), known.end());
    const TripleSet* filter = mode == RankMode::filtered ? &known_set : nullptr;

    std::vector<std::size_t> ranks(2 * test.size());
    for (std::size_t i = 0; i < test.size(); ++i) rank_one(test[i], i, n_entities, filter, scorer, ranks);
    return summarize(std::move(ranks), test.size());
}

}  // namespace kge
