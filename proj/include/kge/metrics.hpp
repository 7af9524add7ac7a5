#pragma once
// Wallclock and process CPU timing, peak-RSS probing and the benchmark CSV.
//
// Wall time comes from std::chrono::steady_clock. CPU time is the process-wide
// user + system time summed over all threads (CLOCK_PROCESS_CPUTIME_ID), so it
// exceeds wall time when several workers are busy. Memory is the kernel's
// high-water mark of resident set size (getrusage ru_maxrss), reported in MiB.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace kge {

struct PhaseTiming {
    double wall_seconds = 0.0;
    double cpu_seconds = 0.0;
};

/// Seconds on the monotonic clock since an arbitrary epoch.
double wall_now();
/// Process CPU seconds (all threads, user + system). Throws EnvironmentError.
double process_cpu_now();

class PhaseTimer {
public:
    PhaseTimer() : wall_(wall_now()), cpu_(process_cpu_now()) {}
    PhaseTiming elapsed() const;

private:
    double wall_;
    double cpu_;
};

/// Runs `action` and measures it. Returns PhaseTiming for void actions and
/// std::pair<result, PhaseTiming> otherwise.
template <class F>
auto time_phase(F&& action) {
    PhaseTimer timer;
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        std::forward<F>(action)();
        return timer.elapsed();
    } else {
        auto result = std::forward<F>(action)();
        const PhaseTiming t = timer.elapsed();
        return std::pair<decltype(result), PhaseTiming>(std::move(result), t);
    }
}

/// Peak resident set size of this process in MiB. Throws EnvironmentError on
/// platforms without the probe.
double peak_rss_mb();

struct MemoryProbe {
    bool enabled = false;
    double peak_after_load_mb = 0.0;
    double peak_total_mb = 0.0;
};

struct BenchmarkRecord {
    std::string timestamp;
    std::string model;
    std::string graph;
    std::size_t threads = 1;
    std::string backend;
    std::size_t epochs = 0;
    std::size_t eta = 0;
    std::size_t n_batches = 0;
    std::size_t dim = 0;
    double lr = 0.0;
    std::uint64_t seed = 0;
    PhaseTiming train;
    PhaseTiming infer_triples;
    PhaseTiming infer_entities;
    PhaseTiming infer_relations;
    MemoryProbe memory;
};

inline constexpr std::string_view kCsvHeader =
    "timestamp,model,graph,threads,backend,epochs,eta,batches,dim,lr,seed,"
    "wall_train_s,cpu_train_s,wall_infer_triples_s,cpu_infer_triples_s,"
    "wall_infer_entities_s,cpu_infer_entities_s,wall_infer_relations_s,cpu_infer_relations_s,"
    "ram_peak_load_mb,ram_peak_total_mb";

inline constexpr std::size_t kCsvColumns = 21;

/// ISO-8601 UTC timestamp with second resolution, e.g. 2026-10-15T08:30:00Z.
std::string utc_timestamp();

/// Quotes a field per RFC 4180 when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);
/// Splits one RFC 4180 record (no trailing line break) into fields.
std::vector<std::string> parse_csv_record(std::string_view line);

/// One CSV line, no trailing newline. Timings use 6 decimals, memory 2
/// decimals (empty when the probe is disabled), lr the shortest round-trip form.
std::string format_record(const BenchmarkRecord& record);

/// Appends one CRLF-free line; writes the header first iff the file did not
/// exist. Throws IoError when the file cannot be opened or written.
void write_record(const std::filesystem::path& path, const BenchmarkRecord& record);

/// Parses a file produced by write_record. Throws ParseError on schema
/// mismatches (wrong header, wrong field count, unparsable numbers).
std::vector<BenchmarkRecord> read_records(const std::filesystem::path& path);

}  // namespace kge
