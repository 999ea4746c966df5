#include "lsilu/worker_pool.hpp"

#include <algorithm>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace lsilu {

void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#elif defined(__aarch64__)
  asm volatile("yield");
#endif
}

WorkerPool::WorkerPool(int nthreads) : nthreads_(nthreads) {
  if (nthreads < 1) throw_error(ErrorCode::invalid_argument, "worker pool needs at least one thread");
  threads_.reserve(static_cast<std::size_t>(nthreads - 1));
  for (int id = 1; id < nthreads; ++id) threads_.emplace_back([this, id] { worker_loop(id); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop(int id) {
  std::uint64_t seen = 0;
  while (true) {
    const std::function<void(int)>* job;
    {
      std::unique_lock lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    std::exception_ptr err;
    try {
      (*job)(id);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::run(const std::function<void(int)>& fn) {
  if (nthreads_ == 1) {
    fn(0);
    return;
  }
  {
    std::lock_guard lock(mu_);
    job_ = &fn;
    pending_ = nthreads_ - 1;
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();
  std::exception_ptr own;
  try {
    fn(0);
  } catch (...) {
    own = std::current_exception();
  }
  std::exception_ptr err;
  {
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    job_ = nullptr;
    err = own ? own : error_;
    error_ = nullptr;
  }
  if (err) std::rethrow_exception(err);
}

void WorkerPool::parallel_for(Index count, const std::function<void(Index, Index, int)>& fn) {
  const Index chunks = nthreads_;
  run([&](int w) {
    const Index begin = static_cast<Index>(static_cast<std::int64_t>(count) * w / chunks);
    const Index end = static_cast<Index>(static_cast<std::int64_t>(count) * (w + 1) / chunks);
    if (begin < end) fn(begin, end, w);
  });
}

CompletionFlags::CompletionFlags(Index n) { resize(n); }

void CompletionFlags::resize(Index n) {
  n_ = n;
  epoch_ = 0;
  flags_ = std::make_unique<std::atomic<std::uint32_t>[]>(static_cast<std::size_t>(std::max<Index>(n, 1)));
  for (Index i = 0; i < n; ++i) flags_[static_cast<std::size_t>(i)].store(0, std::memory_order_relaxed);
}

void CompletionFlags::next_epoch() {
  if (++epoch_ == 0) {
    for (Index i = 0; i < n_; ++i) flags_[static_cast<std::size_t>(i)].store(0, std::memory_order_relaxed);
    epoch_ = 1;
  }
}

void CompletionFlags::wait(Index row) const noexcept {
  int spins = 0;
  while (!is_set(row)) {
    if (spins < 128) {
      cpu_relax();
      ++spins;
    } else {
      std::this_thread::yield();
    }
  }
}

}  // namespace lsilu
