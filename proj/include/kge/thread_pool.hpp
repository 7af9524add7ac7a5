#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace kge {

/// Half-open index range [begin, end).
struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const Range&, const Range&) = default;
};

/// Splits [0, n) into `parts` contiguous ranges whose sizes differ by at most
/// one; the first n % parts ranges get the extra element. Ranges may be empty
/// when parts > n. Throws ArgumentError when parts == 0.
std::vector<Range> split_even(std::size_t n, std::size_t parts);

/// Fixed-size fork/join pool. `run` executes fn(worker) once for every worker
/// index in [0, size()) and returns when all have finished. The calling thread
/// executes worker 0, so a pool of size 1 spawns no threads.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t workers);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const noexcept { return size_; }

    /// Rethrows the exception of the lowest-indexed failing worker.
    void run(const std::function<void(std::size_t)>& fn);

private:
    void worker_loop(std::size_t index);

    std::size_t size_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t generation_ = 0;
    std::size_t pending_ = 0;
    bool stop_ = false;
    std::vector<std::exception_ptr> errors_;
};

}  // namespace kge
