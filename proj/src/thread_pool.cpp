#include "kge/thread_pool.hpp"

#include "kge/errors.hpp"

namespace kge {

std::vector<Range> split_even(std::size_t n, std::size_t parts) {
    if (parts == 0) throw ArgumentError("split_even: parts must be >= 1");
    std::vector<Range> out;
    out.reserve(parts);
    const std::size_t base = n / parts;
    const std::size_t extra = n % parts;
    std::size_t begin = 0;
    for (std::size_t p = 0; p < parts; ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        out.push_back({begin, begin + len});
        begin += len;
    }
    return out;
}

ThreadPool::ThreadPool(std::size_t workers) : size_(workers), errors_(workers) {
    if (workers == 0) throw ArgumentError("thread pool needs at least one worker");
    threads_.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPool::run(const std::function<void(std::size_t)>& fn) {
    for (auto& e : errors_) e = nullptr;
    if (size_ > 1) {
        std::lock_guard lock(mutex_);
        job_ = &fn;
        pending_ = size_ - 1;
        ++generation_;
    }
    start_cv_.notify_all();

    try {
        fn(0);
    } catch (...) {
        errors_[0] = std::current_exception();
    }

    if (size_ > 1) {
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [this] { return pending_ == 0; });
        job_ = nullptr;
    }
    for (auto& e : errors_)
        if (e) std::rethrow_exception(e);
}

void ThreadPool::worker_loop(std::size_t index) {
    std::size_t seen = 0;
    while (true) {
        const std::function<void(std::size_t)>* job = nullptr;
        {
            std::unique_lock lock(mutex_);
            start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            job = job_;
        }
        try {
            (*job)(index);
        } catch (...) {
            errors_[index] = std::current_exception();
        }
        {
            std::lock_guard lock(mutex_);
            if (--pending_ == 0) done_cv_.notify_one();
        }
    }
}

}  // namespace kge
