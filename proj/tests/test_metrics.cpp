#include <gtest/gtest.h>

#include <cstring>
#include <memory>
#include <thread>

#include "kge/errors.hpp"
#include "kge/metrics.hpp"
#include "support.hpp"

using namespace kge;

namespace {

BenchmarkRecord sample_record() {
    BenchmarkRecord r;
    r.timestamp = "2026-10-15T08:30:00Z";
    r.model = "convkb";
    r.graph = "wn18rr";
    r.threads = 4;
    r.backend = "scalar";
    r.epochs = 500;
    r.eta = 2;
    r.n_batches = 100;
    r.dim = 256;
    r.lr = 0.01;
    r.seed = 42;
    r.train = {12.5, 48.25};
    r.infer_triples = {0.125, 0.5};
    r.infer_entities = {0.001, 0.001};
    r.infer_relations = {0.0005, 0.0005};
    r.memory = {true, 310.5, 512.25};
    return r;
}

}  // namespace

TEST(Timing, SleepConsumesWallButNotCpu) {
    const auto t = time_phase([] { std::this_thread::sleep_for(std::chrono::milliseconds(200)); });
    EXPECT_NEAR(t.wall_seconds, 0.2, 0.05);
    EXPECT_LT(t.cpu_seconds, 0.05);
}

TEST(Timing, BusyLoopCpuTracksWallPerWorker) {
    const std::size_t cores = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t threads : {1u, 2u, 4u}) {
        if (threads > cores) continue;
        const auto t = time_phase([&] { test::busy_spin_threads(threads, 0.5); });
        const double ratio = t.cpu_seconds / t.wall_seconds;
        EXPECT_GE(ratio, 0.8 * threads) << threads;
        EXPECT_LE(ratio, 1.2 * threads) << threads;
    }
}

TEST(Timing, TimePhaseReturnsResult) {
    auto [value, t] = time_phase([] { return 41 + 1; });
    EXPECT_EQ(value, 42);
    EXPECT_GE(t.wall_seconds, 0.0);
    EXPECT_GE(t.cpu_seconds, 0.0);
}

TEST(Timing, ClocksAreMonotonic) {
    const double w0 = wall_now(), c0 = process_cpu_now();
    test::busy_spin(0.01);
    EXPECT_GT(wall_now(), w0);
    EXPECT_GE(process_cpu_now(), c0);
}

TEST(PeakRss, GrowsWithTouchedAllocation) {
    const double before = peak_rss_mb();
    constexpr std::size_t bytes = std::size_t(512) << 20;
    std::unique_ptr<char[]> block(new char[bytes]);
    for (std::size_t i = 0; i < bytes; i += 4096) block[i] = static_cast<char>(i);
    std::memset(block.get(), 1, bytes);
    const double after = peak_rss_mb();
    EXPECT_GE(after - before, 450.0);
    volatile char keep = block[bytes - 1];
    (void)keep;
}

TEST(PeakRss, NeverDecreases) {
    const double a = peak_rss_mb();
    { std::vector<char> v(std::size_t(32) << 20, 1); }
    EXPECT_GE(peak_rss_mb(), a);
}

TEST(Csv, HeaderHasTwentyOneColumns) {
    EXPECT_EQ(parse_csv_record(kCsvHeader).size(), kCsvColumns);
    EXPECT_EQ(kCsvHeader.substr(0, 16), "timestamp,model,");
}

TEST(Csv, EscapeAndParseRoundTrip) {
    const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
    EXPECT_EQ(parse_csv_record(line), fields);
    EXPECT_EQ(csv_escape("a\"b"), "\"a\"\"b\"");
}

TEST(Csv, FormatRecordFields) {
    const auto f = parse_csv_record(format_record(sample_record()));
    ASSERT_EQ(f.size(), kCsvColumns);
    EXPECT_EQ(f[1], "convkb");
    EXPECT_EQ(f[9], "0.01");
    EXPECT_EQ(f[11], "12.500000");
    EXPECT_EQ(f[19], "310.50");
    EXPECT_EQ(f[20], "512.25");
}

TEST(Csv, MemoryColumnsEmptyWhenProbeDisabled) {
    auto r = sample_record();
    r.memory = {};
    const auto f = parse_csv_record(format_record(r));
    EXPECT_EQ(f[19], "");
    EXPECT_EQ(f[20], "");
}

TEST(Csv, WriteAppendsAndReadsBack) {
    test::TempDir dir;
    const auto path = dir / "results.csv";
    auto a = sample_record();
    auto b = sample_record();
    b.model = "transe";
    b.memory = {};
    write_record(path, a);
    write_record(path, b);
    const auto text = test::read_file(path);
    EXPECT_EQ(text.find(std::string(kCsvHeader)), 0u);
    EXPECT_EQ(text.find(std::string(kCsvHeader), 1), std::string::npos);
    const auto rows = read_records(path);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].model, "convkb");
    EXPECT_EQ(rows[0].threads, 4u);
    EXPECT_DOUBLE_EQ(rows[0].train.cpu_seconds, 48.25);
    EXPECT_TRUE(rows[0].memory.enabled);
    EXPECT_DOUBLE_EQ(rows[0].memory.peak_total_mb, 512.25);
    EXPECT_FALSE(rows[1].memory.enabled);
    EXPECT_EQ(format_record(rows[0]), format_record(a));
}

TEST(Csv, SchemaViolationsRaiseParseError) {
    test::TempDir dir;
    test::write_file(dir / "bad.csv", "a,b,c\n1,2,3\n");
    EXPECT_THROW(read_records(dir / "bad.csv"), ParseError);
    test::write_file(dir / "short.csv", std::string(kCsvHeader) + "\nx,y\n");
    EXPECT_THROW(read_records(dir / "short.csv"), ParseError);
    EXPECT_THROW(write_record(dir / "no/such/dir.csv", sample_record()), IoError);
}

TEST(Timestamp, IsoUtc) {
    const auto ts = utc_timestamp();
    ASSERT_EQ(ts.size(), 20u);
    EXPECT_EQ(ts[4], '-');
    EXPECT_EQ(ts[10], 'T');
    EXPECT_EQ(ts.back(), 'Z');
}
