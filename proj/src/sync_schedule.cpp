#include "lsilu/sync_schedule.hpp"

#include <algorithm>
#include <string>

namespace lsilu {
namespace {
inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }
}  // namespace

SyncSchedule build_sync_schedule(std::span<const std::vector<Index>> levels, const SparsityPattern& deps,
                                 int nthreads) {
  if (nthreads < 1) throw_error(ErrorCode::invalid_argument, "nthreads must be at least 1");
  const Index n = deps.n;
  const auto p = static_cast<std::size_t>(nthreads);

  SyncSchedule s;
  s.nthreads = nthreads;
  s.n = n;
  s.owner.assign(sz(n), -1);
  s.sequence.assign(sz(n), -1);
  s.program_order.resize(p);
  s.wait_start.assign(sz(n) + 1, 0);

  std::vector<Index> by_sequence;
  std::vector<Index> slot(sz(n), -1);  // position in the owner's program order
  for (const auto& level : levels) {
    for (const Index r : level) {
      if (r < 0 || r >= n) throw_error(ErrorCode::invalid_argument, "scheduled row out of range");
      if (s.sequence[sz(r)] >= 0) throw_error(ErrorCode::invalid_argument, "row scheduled twice", r);
      const int w = static_cast<int>(by_sequence.size() % p);
      s.owner[sz(r)] = w;
      s.sequence[sz(r)] = static_cast<Index>(by_sequence.size());
      slot[sz(r)] = static_cast<Index>(s.program_order[static_cast<std::size_t>(w)].size());
      s.program_order[static_cast<std::size_t>(w)].push_back(r);
      by_sequence.push_back(r);
    }
  }

  // Vector clocks: known[seq * p + v] is the last slot of worker v known to be
  // complete once the row at `seq` has finished. Completed rows of a worker
  // always form a prefix of its program order, so one slot per worker is exact.
  std::vector<Index> known(by_sequence.size() * p, -1);
  std::vector<Index> last_seq_of_worker(p, -1);
  std::vector<Index> clock(p);
  std::vector<Index> candidates;
  std::vector<std::vector<Index>> retained(sz(n));

  for (std::size_t seq = 0; seq < by_sequence.size(); ++seq) {
    const Index r = by_sequence[seq];
    const auto w = static_cast<std::size_t>(s.owner[sz(r)]);
    if (last_seq_of_worker[w] >= 0) {
      const auto base = sz(last_seq_of_worker[w]) * p;
      std::copy(known.begin() + static_cast<std::ptrdiff_t>(base),
                known.begin() + static_cast<std::ptrdiff_t>(base + p), clock.begin());
    } else {
      std::fill(clock.begin(), clock.end(), -1);
    }

    candidates.clear();
    for (Index c : deps.row(r)) {
      if (c == r || s.sequence[sz(c)] < 0) continue;
      if (s.sequence[sz(c)] >= static_cast<Index>(seq))
        throw_error(ErrorCode::invalid_argument,
                    "row " + std::to_string(r) + " depends on row " + std::to_string(c) + " scheduled after it", r);
      ++s.dependency_count;
      if (s.owner[sz(c)] != static_cast<int>(w)) ++s.cross_worker_count;
      candidates.push_back(c);
    }
    // Later rows first: a wait can only be implied by a row sequenced after it.
    std::sort(candidates.begin(), candidates.end(),
              [&](Index x, Index y) { return s.sequence[sz(x)] > s.sequence[sz(y)]; });
    for (Index c : candidates) {
      const auto v = static_cast<std::size_t>(s.owner[sz(c)]);
      if (slot[sz(c)] <= clock[v]) continue;
      retained[sz(r)].push_back(c);
      const auto base = sz(s.sequence[sz(c)]) * p;
      for (std::size_t u = 0; u < p; ++u) clock[u] = std::max(clock[u], known[base + u]);
    }
    clock[w] = slot[sz(r)];
    std::copy(clock.begin(), clock.end(), known.begin() + static_cast<std::ptrdiff_t>(seq * p));
    last_seq_of_worker[w] = static_cast<Index>(seq);
  }

  for (Index r = 0; r < n; ++r) {
    auto& list = retained[sz(r)];
    std::sort(list.begin(), list.end());
    s.wait_rows.insert(s.wait_rows.end(), list.begin(), list.end());
    s.wait_start[sz(r) + 1] = static_cast<Index>(s.wait_rows.size());
  }
  return s;
}

}  // namespace lsilu
