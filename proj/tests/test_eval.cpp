#include <gtest/gtest.h>

#include "kge/errors.hpp"
#include "kge/eval.hpp"
#include "kge/training.hpp"

using namespace kge;

namespace {

// Score = −|tail − (head + 1)| − 0.01·head: tails prefer head + 1, heads prefer small indices.
double line_scorer(const Triple& t) {
    return -std::abs(double(t.tail) - double(t.head) - 1.0) - 0.01 * double(t.head);
}

}  // namespace

TEST(Ranking, RawRanksFromKnownScorer) {
    const std::vector<Triple> test{{2, 0, 3}};
    const auto r = rank_queries(line_scorer, 6, test, {}, RankMode::raw);
    ASSERT_EQ(r.ranks.size(), 2u);
    EXPECT_EQ(r.ranks[0], 1u);  // tail 3 is the unique best for head 2
    // Head query for tail 3: head 2 scores −0.02; head 1 −1.01, head 3 −1.03, head 0 −2, head 4 −2.04, head 5 −3.05.
    EXPECT_EQ(r.ranks[1], 1u);
    EXPECT_DOUBLE_EQ(r.mrr, 1.0);
}

TEST(Ranking, FilteringRemovesOtherKnownTriples) {
    const std::vector<Triple> test{{2, 0, 5}};
    const std::vector<Triple> known{{2, 0, 3}, {2, 0, 4}, {2, 0, 5}};
    // Tails 1, 2, 3 and 4 score at least as well as 5; filtering drops 3 and 4.
    const auto raw = rank_queries(line_scorer, 6, test, known, RankMode::raw);
    EXPECT_EQ(raw.ranks[0], 5u);
    const auto filtered = rank_queries(line_scorer, 6, test, known, RankMode::filtered);
    EXPECT_EQ(filtered.ranks[0], 3u);
}

TEST(Ranking, TiesCountAgainstTheModel) {
    const auto constant = [](const Triple&) { return 0.0; };
    const std::vector<Triple> test{{0, 0, 1}};
    const auto r = rank_queries(constant, 10, test, {}, RankMode::raw);
    EXPECT_EQ(r.ranks[0], 10u);
    EXPECT_EQ(r.ranks[1], 10u);
    EXPECT_DOUBLE_EQ(r.hits_at.at(10), 1.0);
    EXPECT_DOUBLE_EQ(r.hits_at.at(3), 0.0);
}

TEST(Ranking, SummaryArithmetic) {
    // Ranks 1 and 4 for the first triple, 2 and 11 for the second.
    const std::vector<Triple> test{{0, 0, 1}, {5, 0, 6}};
    auto scorer = [](const Triple& t) {
        if (t == Triple{0, 0, 1}) return 10.0;
        if (t == Triple{5, 0, 6}) return 5.0;
        if (t.tail == 1 && t.head >= 1 && t.head <= 3) return 11.0;
        if (t.head == 5 && t.tail == 0) return 6.0;
        if (t.tail == 6 && t.head != 5 && t.head != 11) return 6.0;
        return 0.0;
    };
    const auto r = rank_queries(scorer, 12, test, {}, RankMode::raw);
    EXPECT_EQ(r.ranks, (std::vector<std::size_t>{1, 4, 2, 11}));
    EXPECT_EQ(r.n_queries, 2u);
    EXPECT_NEAR(r.mrr, (1.0 + 0.25 + 0.5 + 1.0 / 11.0) / 4.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.hits_at.at(1), 0.25);
    EXPECT_DOUBLE_EQ(r.hits_at.at(3), 0.5);
    EXPECT_DOUBLE_EQ(r.hits_at.at(10), 0.75);
}

TEST(Ranking, ModelOverloadMatchesScorerAndThreads) {
    const auto p = init_params<float>(ModelKind::distmult, 25, 2, 8, 0, 3);
    std::vector<Triple> test, known;
    for (Index i = 0; i < 10; ++i) test.push_back({i, i % 2, (i * 3 + 1) % 25});
    for (Index i = 0; i < 25; ++i) known.push_back({i, 0, (i + 2) % 25});
    const auto scorer = [&](const Triple& t) { return double(score(p, t, Backend::scalar)); };
    const auto a = rank_queries(scorer, 25, test, known, RankMode::filtered);
    const auto b = rank_queries(p, test, known, RankMode::filtered, Backend::scalar, 1);
    const auto c = rank_queries(p, test, known, RankMode::filtered, Backend::scalar, 3);
    EXPECT_EQ(a.ranks, b.ranks);
    EXPECT_EQ(b.ranks, c.ranks);
    EXPECT_THROW(rank_queries(p, {}, known, RankMode::raw), ArgumentError);
}

TEST(Inference, TripleScoresAndEmbeddingRows) {
    const auto kg = generate_synthetic(30, 2, SyntheticPattern::ring, 0);
    const auto p = init_params<float>(ModelKind::transe, 30, 2, 16, 0, 1);
    const auto s = infer_triples(p, kg.test, Backend::vectorized, 2);
    EXPECT_EQ(s.scores.size(), kg.test.size());
    EXPECT_GE(s.timing.wall_seconds, 0.0);

    const auto ents = entities_of(kg.test);
    EXPECT_EQ(ents, (std::vector<Index>{9, 10, 19, 20, 29, 0}));
    const auto rows = infer_entities(p, ents);
    ASSERT_EQ(rows.rows.size(), ents.size());
    EXPECT_EQ(rows.rows[0].size(), 16u);
    EXPECT_TRUE(std::equal(rows.rows[2].begin(), rows.rows[2].end(), p.entities.row(19).begin()));

    EXPECT_EQ(relations_of(kg.test), (std::vector<Index>{0}));
    EXPECT_EQ(infer_relations(p, std::vector<Index>{1, 0}).rows.size(), 2u);
    EXPECT_THROW(infer_entities(p, std::vector<Index>{30}), ArgumentError);
    EXPECT_THROW(infer_relations(p, std::vector<Index>{2}), ArgumentError);
}

TEST(Ranking, TrainedTransEOnRingRanksEdgesNearTop) {
    const auto kg = generate_synthetic(50, 1, SyntheticPattern::ring, 0);
    TrainConfig c;
    c.dim = 16;
    c.epochs = 200;
    c.n_batches = 5;
    const auto r = train(kg, c);
    std::vector<Triple> known = kg.train;
    known.insert(known.end(), kg.test.begin(), kg.test.end());
    const auto rank = rank_queries(r.params, kg.train, known, RankMode::filtered);
    EXPECT_GE(rank.hits_at.at(3), 0.8);
}
