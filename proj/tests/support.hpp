#pragma once
// Helpers shared by the unit tests and the acceptance binary.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kge/models.hpp"

namespace kge::test {

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("kge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

/// Spins the calling thread until `seconds` of wall time have passed.
inline void busy_spin(double seconds) {
    const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
    volatile std::uint64_t sink = 0;
    while (std::chrono::steady_clock::now() < end)
        for (int i = 0; i < 1000; ++i) sink = sink + static_cast<std::uint64_t>(i);
}

/// `threads` workers (the caller included) spinning for `seconds` each.
inline void busy_spin_threads(std::size_t threads, double seconds) {
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(busy_spin, seconds);
    busy_spin(seconds);
    for (auto& t : pool) t.join();
}

/// A random double-precision instance for gradient checking: 3 entities,
/// 2 relations, head != tail.
struct GradInstance {
    ModelParams<double> params;
    Triple triple;
};

/// Distance of the instance from the score's non-differentiable set: the
/// smallest |residual_i| for TransE-L1, the residual norm for TransE-L2 and the
/// smallest |pre-activation| for ConvKB. +inf for DistMult.
inline double kink_distance(const ModelParams<double>& p, const Triple& t) {
    const auto h = p.entities.row(t.head), r = p.relations.row(t.relation), tl = p.entities.row(t.tail);
    const std::size_t d = p.dim();
    double best = std::numeric_limits<double>::infinity();
    switch (p.kind) {
        case ModelKind::transe: {
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double e = h[i] + r[i] - tl[i];
                sq += e * e;
                if (p.norm == Norm::l1) best = std::min(best, std::abs(e));
            }
            if (p.norm == Norm::l2) best = std::sqrt(sq);
            break;
        }
        case ModelKind::distmult:
            break;
        case ModelKind::convkb:
            for (std::size_t k = 0; k < p.tau(); ++k)
                for (std::size_t i = 0; i < d; ++i)
                    best = std::min(best, std::abs(p.filters[3 * k] * h[i] + p.filters[3 * k + 1] * r[i] +
                                                   p.filters[3 * k + 2] * tl[i]));
            break;
    }
    return best;
}

/// Draws instances until one lies at least `margin` away from every kink, so a
/// central difference with a much smaller step never straddles one.
inline GradInstance random_grad_instance(ModelKind kind, Norm norm, std::mt19937_64& rng, double margin = 1e-3) {
    std::uniform_int_distribution<std::size_t> dim_dist(1, 8), tau_dist(1, 3);
    for (;;) {
        const std::size_t d = dim_dist(rng);
        const std::size_t tau = tau_dist(rng);
        GradInstance g{init_params<double>(kind, 3, 2, d, tau, rng(), norm), {}};
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& x : g.params.entities.data()) x = u(rng);
        for (auto& x : g.params.relations.data()) x = u(rng);
        for (auto& x : g.params.filters) x = u(rng);
        for (auto& x : g.params.w) x = u(rng);
        std::uniform_int_distribution<Index> ent(0, 2), rel(0, 1);
        g.triple.head = ent(rng);
        do g.triple.tail = ent(rng);
        while (g.triple.tail == g.triple.head);
        g.triple.relation = rel(rng);
        if (kink_distance(g.params, g.triple) >= margin) return g;
    }
}

/// Largest relative discrepancy between the analytic gradient and central
/// finite differences over every parameter the triple touches. The relative
/// error of a pair (a, n) is |a − n| / max(|a|, |n|, 1e-6).
inline double max_fd_relative_error(const GradInstance& inst, double step = 1e-4) {
    ModelParams<double> p = inst.params;
    const Triple& t = inst.triple;
    const auto g = grad(p.kind, p, t, 1.0, Backend::scalar);

    auto rel = [](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}); };
    auto central = [&](double& x) {
        const double saved = x;
        x = saved + step;
        const double up = score(p, t, Backend::scalar);
        x = saved - step;
        const double down = score(p, t, Backend::scalar);
        x = saved;
        return (up - down) / (2.0 * step);
    };

    double worst = 0.0;
    const std::size_t d = p.dim();
    for (std::size_t i = 0; i < d; ++i) {
        worst = std::max(worst, rel(g.d_head[i], central(p.entities.row(t.head)[i])));
        worst = std::max(worst, rel(g.d_relation[i], central(p.relations.row(t.relation)[i])));
        worst = std::max(worst, rel(g.d_tail[i], central(p.entities.row(t.tail)[i])));
    }
    if (p.kind == ModelKind::convkb) {
        const auto& shared = *g.d_shared;
        for (std::size_t k = 0; k < p.filters.size(); ++k) worst = std::max(worst, rel(shared[k], central(p.filters[k])));
        for (std::size_t k = 0; k < p.w.size(); ++k)
            worst = std::max(worst, rel(shared[p.filters.size() + k], central(p.w[k])));
    }
    return worst;
}

}  // namespace kge::test
