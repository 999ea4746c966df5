#pragma once

#include <span>
#include <vector>

#include "lsilu/sparse.hpp"
#include "lsilu/worker_pool.hpp"

namespace lsilu {

// Row-to-worker mapping plus pruned wait lists for point-to-point
// synchronization. Rows are identified by their index in the factor
// ordering; rows outside the scheduled set have owner -1.
struct SyncSchedule {
  int nthreads = 1;
  Index n = 0;
  std::vector<int> owner;
  std::vector<std::vector<Index>> program_order;
  std::vector<Index> wait_start;
  std::vector<Index> wait_rows;
  // Position of each scheduled row in the level concatenation, -1 otherwise.
  std::vector<Index> sequence;
  Index dependency_count = 0;    // structural dependencies among scheduled rows
  Index cross_worker_count = 0;  // ...of which cross a worker boundary

  std::span<const Index> waits(Index row) const {
    const auto b = static_cast<std::size_t>(wait_start[static_cast<std::size_t>(row)]);
    const auto e = static_cast<std::size_t>(wait_start[static_cast<std::size_t>(row) + 1]);
    return std::span<const Index>(wait_rows).subspan(b, e - b);
  }
  Index retained_waits() const noexcept { return static_cast<Index>(wait_rows.size()); }
};

// Deals rows round-robin to `nthreads` workers in level-concatenation order
// (the dealing continues across level boundaries) and keeps only the waits
// that neither program order nor another retained wait already implies.
// `deps` row r lists the rows r reads;
// entries naming unscheduled rows or r itself are ignored. Every dependency
// must precede r in the level concatenation.
SyncSchedule build_sync_schedule(std::span<const std::vector<Index>> levels, const SparsityPattern& deps,
                                 int nthreads);

// Runs body(row) for every scheduled row: each worker walks its program order,
// waits on the row's retained waits, runs the body and publishes the row.
// `body` must not throw.
template <typename Body>
void run_point_to_point(WorkerPool& pool, const SyncSchedule& schedule, CompletionFlags& flags, Body&& body) {
  if (pool.size() != schedule.nthreads)
    throw_error(ErrorCode::invalid_argument, "worker pool size differs from the schedule's thread count");
  if (flags.size() < schedule.n) flags.resize(schedule.n);
  flags.next_epoch();
  pool.run([&](int w) {
    for (Index r : schedule.program_order[static_cast<std::size_t>(w)]) {
      for (Index c : schedule.waits(r)) flags.wait(c);
      body(r);
      flags.publish(r);
    }
  });
}

}  // namespace lsilu
