#include "kge/metrics.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "kge/errors.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#include <time.h>
#define KGE_POSIX 1
#endif

namespace kge {

double wall_now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

double process_cpu_now() {
#if KGE_POSIX
    timespec ts{};
    if (clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts) != 0) throw EnvironmentError("process CPU clock unavailable");
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
#else
    const std::clock_t c = std::clock();
    if (c == static_cast<std::clock_t>(-1)) throw EnvironmentError("process CPU clock unavailable");
    return static_cast<double>(c) / CLOCKS_PER_SEC;
#endif
}

PhaseTiming PhaseTimer::elapsed() const {
    return {wall_now() - wall_, process_cpu_now() - cpu_};
}

double peak_rss_mb() {
#if KGE_POSIX
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) throw EnvironmentError("getrusage failed");
#if defined(__APPLE__)
    return static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);  // bytes
#else
    return static_cast<double>(usage.ru_maxrss) / 1024.0;  // KiB
#endif
#else
    throw EnvironmentError("peak RSS probe not supported on this platform");
#endif
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
#if KGE_POSIX
    gmtime_r(&now, &tm);
#else
    tm = *std::gmtime(&now);
#endif
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> parse_csv_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <class N>
N parse_number(const std::string& s, const std::string& file, std::size_t line, const char* column) {
    N v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(file, line, std::string("bad value for ") + column + ": '" + s + "'");
    return v;
}

// Splits file content into records, honouring quoted line breaks.
std::vector<std::string> split_records(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : text) {
        if (c == '"') quoted = !quoted;
        if (!quoted && (c == '\n')) {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            out.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::string format_record(const BenchmarkRecord& r) {
    std::string line;
    std::size_t n = 0;
    auto put = [&](std::string_view v) {
        if (n++ > 0) line += ',';
        line += csv_escape(v);
    };
    put(r.timestamp);
    put(r.model);
    put(r.graph);
    put(std::to_string(r.threads));
    put(r.backend);
    put(std::to_string(r.epochs));
    put(std::to_string(r.eta));
    put(std::to_string(r.n_batches));
    put(std::to_string(r.dim));
    put(shortest(r.lr));
    put(std::to_string(r.seed));
    for (const PhaseTiming* t : {&r.train, &r.infer_triples, &r.infer_entities, &r.infer_relations}) {
        put(fixed(t->wall_seconds, 6));
        put(fixed(t->cpu_seconds, 6));
    }
    put(r.memory.enabled ? fixed(r.memory.peak_after_load_mb, 2) : "");
    put(r.memory.enabled ? fixed(r.memory.peak_total_mb, 2) : "");
    return line;
}

void write_record(const std::filesystem::path& path, const BenchmarkRecord& record) {
    std::error_code ec;
    const bool existed = std::filesystem::exists(path, ec);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open results file for appending: " + path.string());
    if (!existed) out << kCsvHeader << '\n';
    out << format_record(record) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<BenchmarkRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open results file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto lines = split_records(buf.str());
    const std::string file = path.string();
    if (lines.empty() || lines.front() != kCsvHeader) throw ParseError(file, 1, "unexpected CSV header");

    std::vector<BenchmarkRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        const auto f = parse_csv_record(lines[i]);
        if (f.size() != kCsvColumns)
            throw ParseError(file, line_no, "expected " + std::to_string(kCsvColumns) + " fields, found " +
                                                std::to_string(f.size()));
        BenchmarkRecord r;
        r.timestamp = f[0];
        r.model = f[1];
        r.graph = f[2];
        r.threads = parse_number<std::size_t>(f[3], file, line_no, "threads");
        r.backend = f[4];
        r.epochs = parse_number<std::size_t>(f[5], file, line_no, "epochs");
        r.eta = parse_number<std::size_t>(f[6], file, line_no, "eta");
        r.n_batches = parse_number<std::size_t>(f[7], file, line_no, "batches");
        r.dim = parse_number<std::size_t>(f[8], file, line_no, "dim");
        r.lr = parse_number<double>(f[9], file, line_no, "lr");
        r.seed = parse_number<std::uint64_t>(f[10], file, line_no, "seed");
        PhaseTiming* phases[] = {&r.train, &r.infer_triples, &r.infer_entities, &r.infer_relations};
        for (std::size_t p = 0; p < 4; ++p) {
            phases[p]->wall_seconds = parse_number<double>(f[11 + 2 * p], file, line_no, "wall");
            phases[p]->cpu_seconds = parse_number<double>(f[12 + 2 * p], file, line_no, "cpu");
        }
        if (f[19].empty() != f[20].empty()) throw ParseError(file, line_no, "memory columns partially empty");
        r.memory.enabled = !f[19].empty();
        if (r.memory.enabled) {
            r.memory.peak_after_load_mb = parse_number<double>(f[19], file, line_no, "ram_peak_load_mb");
            r.memory.peak_total_mb = parse_number<double>(f[20], file, line_no, "ram_peak_total_mb");
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace kge
