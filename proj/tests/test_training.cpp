#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "kge/errors.hpp"
#include "kge/training.hpp"
#include "support.hpp"

using namespace kge;

namespace {

KnowledgeGraph ring(std::size_t n) { return generate_synthetic(n, 1, SyntheticPattern::ring, 0); }

TrainConfig small_config(ModelKind kind) {
    TrainConfig c;
    c.model = kind;
    c.dim = 16;
    c.tau = 4;
    c.epochs = 20;
    c.n_batches = 5;
    return c;
}

double decile_mean(const std::vector<double>& v, bool last) {
    const std::size_t n = std::max<std::size_t>(1, v.size() / 10);
    const auto first = last ? v.end() - static_cast<long>(n) : v.begin();
    return std::accumulate(first, first + static_cast<long>(n), 0.0) / static_cast<double>(n);
}

}  // namespace

TEST(PairwiseLoss, HandExamples) {
    EXPECT_EQ(pairwise_loss(5, 1, 1), 0.0);
    EXPECT_EQ(pairwise_loss(1, 1, 1), 1.0);
    EXPECT_EQ(pairwise_loss(0, 2, 1), 3.0);
}

TEST(PairwiseLoss, NonNegativeAndZeroIffMarginMet) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto v = test::random_vector(rng, 3, -3, 3);
        const double margin = std::abs(v[2]);
        const double l = pairwise_loss(v[0], v[1], margin);
        EXPECT_GE(l, 0.0);
        EXPECT_EQ(l == 0.0, v[0] >= v[1] + margin);
    }
}

TEST(SampleNegatives, CorruptsOneSideOnly) {
    SplitMix64 rng(5);
    const Triple pos{3, 2, 7};
    std::size_t heads = 0, tails = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto negs = sample_negatives(pos, 2, 10, rng);
        ASSERT_EQ(negs.size(), 2u);
        for (const auto& n : negs) {
            EXPECT_EQ(n.relation, pos.relation);
            EXPECT_TRUE(n.head == pos.head || n.tail == pos.tail);
            EXPECT_LT(n.head, 10u);
            EXPECT_LT(n.tail, 10u);
            heads += n.head != pos.head;
            tails += n.tail != pos.tail;
        }
    }
    // Each side is corrupted about half the time (9/10 of those change the entity).
    EXPECT_NEAR(static_cast<double>(heads) / 4000.0, 0.45, 0.05);
    EXPECT_NEAR(static_cast<double>(tails) / 4000.0, 0.45, 0.05);
}

TEST(SampleNegatives, TinyUniverseAndErrors) {
    SplitMix64 rng(2);
    std::set<Index> heads;
    for (int i = 0; i < 200; ++i)
        for (const auto& n : sample_negatives({0, 0, 1}, 1, 2, rng))
            if (n.tail == 1) heads.insert(n.head);
    EXPECT_EQ(heads, (std::set<Index>{0, 1}));
    EXPECT_THROW(sample_negatives({0, 0, 0}, 1, 1, rng), ArgumentError);
    EXPECT_THROW(sample_negatives({0, 0, 1}, 0, 5, rng), ArgumentError);
}

TEST(SampleNegatives, DeterministicForSeed) {
    SplitMix64 a(77), b(77);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_negatives({1, 0, 2}, 3, 100, a), sample_negatives({1, 0, 2}, 3, 100, b));
}

TEST(EpochBatches, BalancedCover) {
    const auto r = epoch_batches(10, 3);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].size(), 4u);
    EXPECT_EQ(r[1].size(), 3u);
    EXPECT_EQ(r[2].size(), 3u);
    EXPECT_EQ(epoch_batches(10, 1), (std::vector<Range>{{0, 10}}));
    EXPECT_THROW(epoch_batches(5, 10), ArgumentError);
    EXPECT_THROW(epoch_batches(5, 0), ArgumentError);
    EXPECT_THROW(epoch_batches(0, 1), ArgumentError);
}

TEST(EpochBatches, PropertyDisjointCoverSizesWithinOne) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + rng() % 1000, b = 1 + rng() % n;
        const auto r = epoch_batches(n, b);
        ASSERT_EQ(r.size(), b);
        std::size_t next = 0, lo = n, hi = 0;
        for (const auto& x : r) {
            EXPECT_EQ(x.begin, next);
            next = x.end;
            lo = std::min(lo, x.size());
            hi = std::max(hi, x.size());
        }
        EXPECT_EQ(next, n);
        EXPECT_LE(hi - lo, 1u);
    }
}

TEST(SplitEven, WorkerPartitionCoversBatch) {
    for (std::size_t n : {0u, 1u, 7u, 100u})
        for (std::size_t t : {1u, 2u, 3u, 8u}) {
            const auto parts = split_even(n, t);
            ASSERT_EQ(parts.size(), t);
            std::size_t next = 0;
            for (const auto& p : parts) {
                EXPECT_EQ(p.begin, next);
                next = p.end;
            }
            EXPECT_EQ(next, n);
        }
    EXPECT_THROW(split_even(3, 0), ArgumentError);
}

TEST(ThreadPool, RunsEveryWorkerAndPropagatesErrors) {
    ThreadPool pool(4);
    std::vector<int> hits(4, 0);
    for (int rep = 0; rep < 20; ++rep) pool.run([&](std::size_t w) { ++hits[w]; });
    EXPECT_EQ(hits, std::vector<int>(4, 20));
    EXPECT_THROW(pool.run([](std::size_t w) {
        if (w == 2) throw ArgumentError("boom");
    }),
                 ArgumentError);
    pool.run([&](std::size_t w) { ++hits[w]; });
    EXPECT_EQ(hits[3], 21);
}

TEST(TrainConfig, ValidationRejectsBadValues) {
    EXPECT_NO_THROW(TrainConfig{}.validate());
    auto bad = [](auto mutate) {
        TrainConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), ArgumentError);
    };
    bad([](TrainConfig& c) { c.epochs = 0; });
    bad([](TrainConfig& c) { c.eta = 0; });
    bad([](TrainConfig& c) { c.n_batches = 0; });
    bad([](TrainConfig& c) { c.threads = 0; });
    bad([](TrainConfig& c) { c.lr = 0; });
    bad([](TrainConfig& c) { c.margin = -1; });
    bad([](TrainConfig& c) {
        c.model = ModelKind::convkb;
        c.tau = 0;
    });
}

TEST(TrainConfig, DefaultsMatchBenchmarkProtocol) {
    const TrainConfig c;
    EXPECT_EQ(c.dim, 256u);
    EXPECT_EQ(c.epochs, 500u);
    EXPECT_EQ(c.eta, 2u);
    EXPECT_EQ(c.n_batches, 100u);
    EXPECT_DOUBLE_EQ(c.lr, 0.01);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
    auto p = init_params<float>(ModelKind::convkb, 4, 2, 3, 2, 1);
    const auto before = p;
    auto state = AdamState::zeros_like(p);
    Gradients g(3, p.shared_size());
    (void)g.entities.row(1);
    (void)g.relations.row(0);
    adam_step(p, g, state, AdamHyper{});
    EXPECT_EQ(p, before);
    EXPECT_EQ(state.timestep, 1u);
}

TEST(Adam, FirstStepOnUnitGradient) {
    auto p = init_params<float>(ModelKind::transe, 2, 1, 1, 0, 1);
    p.entities.row(0)[0] = 0.0f;
    auto state = AdamState::zeros_like(p);
    Gradients g(1, 0);
    g.entities.row(0)[0] = 1.0f;
    adam_step(p, g, state, AdamHyper{});
    EXPECT_NEAR(p.entities.row(0)[0], -0.01f, 1e-7);
}

TEST(Adam, ShapeMismatchThrows) {
    auto p = init_params<float>(ModelKind::transe, 2, 1, 4, 0, 1);
    auto state = AdamState::zeros_like(p);
    Gradients wrong(3, 0);
    EXPECT_THROW(adam_step(p, wrong, state, AdamHyper{}), ArgumentError);
    auto other = init_params<float>(ModelKind::transe, 5, 1, 4, 0, 1);
    Gradients g(4, 0);
    auto other_state = AdamState::zeros_like(other);
    EXPECT_THROW(adam_step(p, g, other_state, AdamHyper{}), ArgumentError);
}

TEST(SparseRows, MergeAddsInOrder) {
    SparseRows a(2), b(2);
    a.row(5)[0] = 1;
    b.row(3)[1] = 2;
    b.row(5)[0] = 4;
    a.merge(b);
    EXPECT_EQ(a.touched(), (std::vector<Index>{5, 3}));
    EXPECT_EQ(a.row(5)[0], 5.0f);
    EXPECT_EQ(a.row(3)[1], 2.0f);
    a.clear();
    EXPECT_TRUE(a.touched().empty());
    EXPECT_FALSE(a.contains(5));
}

TEST(Training, UntouchedEntitiesKeepTheirEmbedding) {
    for (ModelKind k : {ModelKind::transe, ModelKind::distmult, ModelKind::convkb}) {
        const auto kg = ring(30);
        auto c = small_config(k);
        c.normalize_entities = false;
        Trainer trainer(kg, c);
        const Params before = trainer.params();
        const std::vector<Triple> batch{{0, 0, 1}, {1, 0, 2}};
        // Sample the negatives the trainer will draw, to know every touched entity.
        std::set<Index> touched{0, 1, 2};
        const std::uint64_t seed = 12345;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            SplitMix64 rng(mix_seed(seed, i));
            for (const auto& n : sample_negatives(batch[i], c.eta, 30, rng)) touched.insert({n.head, n.tail});
        }
        trainer.train_batch(batch, seed);
        for (Index e = 0; e < 30; ++e) {
            const auto a = before.entities.row(e), b = trainer.params().entities.row(e);
            if (!touched.count(e)) EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin())) << e;
        }
    }
}

TEST(Training, RingLossDropsBelowTenth) {
    const auto kg = ring(50);
    auto c = small_config(ModelKind::transe);
    c.epochs = 200;
    c.n_batches = 45;
    const auto r = train(kg, c);
    ASSERT_EQ(r.epoch_losses.size(), 200u);
    EXPECT_LT(r.epoch_losses.back(), 0.1);
    EXPECT_GT(r.timings.wall_train_seconds, 0.0);
    EXPECT_GE(r.timings.cpu_train_seconds, 0.0);
    EXPECT_EQ(r.timings.epoch_wall_seconds.size(), 200u);
}

TEST(Training, LastDecileBelowFirstDecileForEveryModel) {
    const auto kg = ring(50);
    for (ModelKind k : {ModelKind::transe, ModelKind::distmult, ModelKind::convkb}) {
        auto c = small_config(k);
        c.epochs = 100;
        const auto r = train(kg, c);
        EXPECT_LT(decile_mean(r.epoch_losses, true), decile_mean(r.epoch_losses, false)) << to_string(k);
    }
}

TEST(Training, BitIdenticalAcrossRuns) {
    const auto kg = ring(60);
    for (ModelKind k : {ModelKind::transe, ModelKind::distmult, ModelKind::convkb})
        for (std::size_t threads : {1u, 3u}) {
            auto c = small_config(k);
            c.threads = threads;
            const auto a = train(kg, c), b = train(kg, c);
            EXPECT_EQ(a.params, b.params);
            EXPECT_EQ(a.epoch_losses, b.epoch_losses);
        }
}

TEST(Training, ThreadCountsAgreeWithinTolerance) {
    const auto kg = ring(60);
    for (ModelKind k : {ModelKind::transe, ModelKind::distmult, ModelKind::convkb}) {
        auto c = small_config(k);
        const auto one = train(kg, c);
        c.threads = 4;
        const auto four = train(kg, c);
        double worst = 0.0;
        for (std::size_t i = 0; i < one.params.entities.data().size(); ++i)
            worst = std::max(worst, double(std::abs(one.params.entities.data()[i] - four.params.entities.data()[i])));
        for (std::size_t i = 0; i < one.params.relations.data().size(); ++i)
            worst = std::max(worst, double(std::abs(one.params.relations.data()[i] - four.params.relations.data()[i])));
        EXPECT_LE(worst, 1e-3) << to_string(k);
    }
}

TEST(Training, TransEEntitiesStayUnitNorm) {
    const auto kg = ring(40);
    const auto r = train(kg, small_config(ModelKind::transe));
    for (std::size_t e = 0; e < r.params.n_entities(); ++e) {
        double sq = 0.0;
        for (float x : r.params.entities.row(e)) sq += double(x) * x;
        EXPECT_NEAR(sq, 1.0, 1e-4);
    }
}

TEST(Training, RejectsEmptySplitAndTooManyBatches) {
    KnowledgeGraph empty = ring(10);
    empty.train.clear();
    EXPECT_THROW(train(empty, small_config(ModelKind::transe)), ArgumentError);
    auto c = small_config(ModelKind::transe);
    c.n_batches = 100;
    EXPECT_THROW(train(ring(50), c), ArgumentError);
    c.n_batches = 5;
    c.epochs = 0;
    EXPECT_THROW(train(ring(50), c), ArgumentError);
}
