#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "lsilu/error.hpp"

namespace lsilu {

// Fixed-size fork-join pool. The calling thread acts as worker 0, so a pool
// of size 1 never starts a thread.
class WorkerPool {
 public:
  explicit WorkerPool(int nthreads);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const noexcept { return nthreads_; }

  // Runs fn(worker) once on every worker and returns when all have finished.
  // The first exception thrown by any worker is rethrown here.
  void run(const std::function<void(int)>& fn);

  // Splits [0, count) into `size()` contiguous chunks.
  void parallel_for(Index count, const std::function<void(Index begin, Index end, int worker)>& fn);

 private:
  void worker_loop(int id);

  int nthreads_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

// One single-writer completion flag per row. A flag counts as set when it
// holds the current epoch, so starting a new run is O(1).
class CompletionFlags {
 public:
  explicit CompletionFlags(Index n = 0);

  void resize(Index n);
  Index size() const noexcept { return n_; }
  // Invalidates every flag; call once per run before any worker starts.
  void next_epoch();

  void publish(Index row) noexcept { flags_[static_cast<std::size_t>(row)].store(epoch_, std::memory_order_release); }
  bool is_set(Index row) const noexcept {
    return flags_[static_cast<std::size_t>(row)].load(std::memory_order_acquire) == epoch_;
  }
  // Busy-polls with a short spin before yielding the core.
  void wait(Index row) const noexcept;

 private:
  Index n_ = 0;
  std::uint32_t epoch_ = 0;
  std::unique_ptr<std::atomic<std::uint32_t>[]> flags_;
};

void cpu_relax() noexcept;

}  // namespace lsilu
