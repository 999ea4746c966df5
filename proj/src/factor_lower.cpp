#include "lsilu/factor_lower.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "lsilu/factor_upper.hpp"
#include "row_kernel.hpp"

namespace lsilu {
namespace {

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

Subblock make_subblock(const IluFactors& f, Index upper_rows, Index col_begin, Index col_end) {
  Subblock s;
  s.col_begin = col_begin;
  s.col_end = col_end;
  const Index lower = f.n - upper_rows;
  s.seg_begin.resize(sz(lower));
  s.offset.assign(sz(lower) + 1, 0);
  const auto& col = f.pattern.col;
  for (Index k = 0; k < lower; ++k) {
    const Index r = upper_rows + k;
    const auto first = col.begin() + f.pattern.row_begin(r);
    const auto last = col.begin() + f.pattern.row_end(r);
    const auto lo = std::lower_bound(first, last, col_begin);
    const auto hi = std::lower_bound(lo, last, col_end);
    s.seg_begin[sz(k)] = static_cast<Index>(lo - col.begin());
    s.offset[sz(k) + 1] = s.offset[sz(k)] + static_cast<Index>(hi - lo);
  }
  return s;
}

std::vector<Tile> make_tiles(const Subblock& s, Index tile_size) {
  std::vector<Tile> tiles;
  const Index total = s.entries();
  for (Index b = 0; b < total; b += tile_size) {
    Tile t;
    t.begin = b;
    t.end = std::min(total, b + tile_size);
    // Row holding entry e: last k with offset[k] <= e.
    auto row_of = [&](Index e) {
      return static_cast<Index>(std::upper_bound(s.offset.begin(), s.offset.end(), e) - s.offset.begin()) - 1;
    };
    t.first_row = row_of(t.begin);
    t.last_row = row_of(t.end - 1);
    tiles.push_back(t);
  }
  return tiles;
}

// Positions of tile `t` inside local row k, as [lo, hi).
inline std::pair<Index, Index> tile_window(const Subblock& s, const Tile& t, Index k) {
  const Index e_lo = std::max(t.begin, s.offset[sz(k)]);
  const Index e_hi = std::min(t.end, s.offset[sz(k) + 1]);
  if (e_lo >= e_hi) return {0, 0};
  const Index lo = s.seg_begin[sz(k)] + (e_lo - s.offset[sz(k)]);
  return {lo, lo + (e_hi - e_lo)};
}

// Values an L entry held before it was dropped, for the MILU diagonal update.
struct DropRecord {
  std::vector<unsigned char> dropped;
  std::vector<double> original;
};

void divide_tile(const detail::FactorView& f, Index upper_rows, const Subblock& s, const Tile& t, DropRecord* rec) {
  for (Index k = t.first_row; k <= t.last_row; ++k) {
    const auto [lo, hi] = tile_window(s, t, k);
    const Index row = upper_rows + k;
    for (Index p = lo; p < hi; ++p) {
      const double w = f.val[p];
      const double l = detail::multiplier(f, p, f.col[p]);
      if (f.dropped(row, l)) {
        f.val[p] = 0.0;
        if (rec) {
          rec->dropped[sz(p)] = 1;
          rec->original[sz(p)] = w;
        }
      } else {
        f.val[p] = l;
        if (rec) rec->dropped[sz(p)] = 0;
      }
    }
  }
}

// Applies the updates from the L entries of level block `src` to the
// positions of `target` (a tile of a later block or of the corner). For each
// row the sources are visited in ascending column order, matching the serial
// elimination sequence for every target value.
void update_tile(const detail::FactorView& f, Index upper_rows, const Subblock& src, const Subblock& tgt,
                 const Tile& target, const DropRecord* rec) {
  for (Index k = target.first_row; k <= target.last_row; ++k) {
    const Index s_count = src.row_entries(k);
    if (s_count == 0) continue;
    const auto [t_lo, t_hi] = tile_window(tgt, target, k);
    if (t_lo == t_hi) continue;
    const Index row = upper_rows + k;
    const Index d = f.diag_pos[row];
    const Index row_end = f.row_start[row + 1];
    const bool diag_here = d >= t_lo && d < t_hi;
    const Index s_lo = src.seg_begin[sz(k)];
    for (Index p = s_lo; p < s_lo + s_count; ++p) {
      if (rec && rec->dropped[sz(p)]) {
        if (f.milu && diag_here) f.val[d] += rec->original[sz(p)];
        continue;
      }
      const Index c = f.col[p];
      const double l = f.val[p];
      const Index u_begin = f.diag_pos[c] + 1;
      const Index u_end = f.row_start[c + 1];
      if (f.milu && diag_here) {
        Index q = p + 1;
        for (Index u = u_begin; u < u_end; ++u) {
          const Index j = f.col[u];
          while (q < row_end && f.col[q] < j) ++q;
          if (q < row_end && f.col[q] == j) {
            if (q >= t_lo && q < t_hi) f.val[q] -= l * f.val[u];
          } else {
            f.val[d] -= l * f.val[u];
          }
        }
      } else {
        const Index j_lo = f.col[t_lo];
        const Index j_hi = f.col[t_hi - 1];
        Index u = static_cast<Index>(std::lower_bound(f.col + u_begin, f.col + u_end, j_lo) - f.col);
        Index q = t_lo;
        for (; u < u_end && f.col[u] <= j_hi; ++u) {
          const Index j = f.col[u];
          while (q < t_hi && f.col[q] < j) ++q;
          if (q == t_hi) break;
          if (f.col[q] == j) f.val[q] -= l * f.val[u];
        }
      }
    }
  }
}

// Dependency-counted task graph drained by every worker of the pool.
class TaskGraph {
 public:
  Index add(Index a, Index b, Index c) {
    tasks_.push_back({a, b, c});
    preds_.emplace_back();
    return static_cast<Index>(tasks_.size()) - 1;
  }
  void depend(Index task, Index on) {
    if (on >= 0) preds_[sz(task)].push_back(on);
  }
  Index size() const noexcept { return static_cast<Index>(tasks_.size()); }

  template <typename Run>
  void execute(WorkerPool& pool, Run&& run) {
    const Index n = size();
    std::vector<Index> succ_start(sz(n) + 1, 0);
    for (Index t = 0; t < n; ++t) {
      auto& p = preds_[sz(t)];
      std::sort(p.begin(), p.end());
      p.erase(std::unique(p.begin(), p.end()), p.end());
      for (Index q : p) ++succ_start[sz(q) + 1];
    }
    for (Index t = 0; t < n; ++t) succ_start[sz(t) + 1] += succ_start[sz(t)];
    std::vector<Index> succ(sz(succ_start.back()));
    std::vector<Index> fill(succ_start.begin(), succ_start.end() - 1);
    auto pending = std::make_unique<std::atomic<Index>[]>(sz(std::max<Index>(n, 1)));
    std::vector<Index> ready;
    for (Index t = 0; t < n; ++t) {
      pending[sz(t)].store(static_cast<Index>(preds_[sz(t)].size()), std::memory_order_relaxed);
      for (Index q : preds_[sz(t)]) succ[sz(fill[sz(q)]++)] = t;
      if (preds_[sz(t)].empty()) ready.push_back(t);
    }
    std::reverse(ready.begin(), ready.end());

    std::mutex mu;
    std::condition_variable cv;
    Index remaining = n;
    pool.run([&](int) {
      while (true) {
        Index t;
        {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return !ready.empty() || remaining == 0; });
          if (ready.empty()) return;
          t = ready.back();
          ready.pop_back();
        }
        run(tasks_[sz(t)]);
        std::vector<Index> released;
        for (Index k = succ_start[sz(t)]; k < succ_start[sz(t) + 1]; ++k) {
          const Index s = succ[sz(k)];
          if (pending[sz(s)].fetch_sub(1, std::memory_order_acq_rel) == 1) released.push_back(s);
        }
        {
          std::lock_guard lock(mu);
          --remaining;
          for (auto it = released.rbegin(); it != released.rend(); ++it) ready.push_back(*it);
        }
        cv.notify_all();
      }
    });
  }

  struct Task {
    Index a, b, c;
  };

 private:
  std::vector<Task> tasks_;
  std::vector<std::vector<Index>> preds_;
};

void factor_corner(IluFactors& f, const StageLayout& layout, WorkerPool& pool, CompletionFlags& flags,
                   const SyncSchedule* corner_schedule) {
  const detail::FactorView view(f);
  const Index nu = layout.upper_rows;
  if (corner_schedule != nullptr) {
    run_point_to_point(pool, *corner_schedule, flags, [&](Index r) { detail::eliminate_row(view, r, nu, r); });
  } else {
    for (Index r = nu; r < f.n; ++r) detail::eliminate_row(view, r, nu, r);
  }
}

void check_lower_pivots(const IluFactors& f, const StageLayout& layout) {
  for (Index r = layout.upper_rows; r < f.n; ++r)
    if (f.diag(r) == 0.0) throw_error(ErrorCode::zero_pivot, "zero pivot in row " + std::to_string(r), r);
}

}  // namespace

const char* to_string(LowerMethod m) noexcept {
  switch (m) {
    case LowerMethod::none: return "none";
    case LowerMethod::sr: return "sr";
    case LowerMethod::er: return "er";
    case LowerMethod::automatic: return "auto";
  }
  return "unknown";
}

std::vector<std::vector<Index>> StageLayout::upper_level_rows() const {
  std::vector<std::vector<Index>> levels(sz(num_levels()));
  for (Index l = 0; l < num_levels(); ++l)
    for (Index r = level_ptr[sz(l)]; r < level_ptr[sz(l) + 1]; ++r) levels[sz(l)].push_back(r);
  return levels;
}

StageLayout stage_layout(const StagePartition& partition, Index n) {
  StageLayout s;
  s.n = n;
  s.source = partition.source;
  for (const auto& level : partition.upper_levels) s.level_ptr.push_back(s.level_ptr.back() + static_cast<Index>(level.size()));
  s.upper_rows = s.level_ptr.back();
  if (s.upper_rows + partition.lower_row_count() != n)
    throw_error(ErrorCode::size_mismatch, "partition does not cover the matrix");
  return s;
}

LowerMethod select_lower_method(Index lower_rows, int nthreads, double imbalance, const SelectionConfig& config) {
  if (lower_rows <= 0) return LowerMethod::none;
  if (static_cast<double>(lower_rows) >= config.er_rows_per_thread * nthreads && imbalance <= config.max_imbalance)
    return LowerMethod::er;
  return LowerMethod::sr;
}

double lower_row_imbalance(const IluFactors& f, const StageLayout& layout) {
  if (layout.lower_rows() == 0) return 0.0;
  Index max_nnz = 0;
  double total = 0.0;
  for (Index r = layout.upper_rows; r < f.n; ++r) {
    max_nnz = std::max(max_nnz, f.pattern.row_nnz(r));
    total += f.pattern.row_nnz(r);
  }
  const double mean = total / layout.lower_rows();
  return mean > 0.0 ? max_nnz / mean : 0.0;
}

Index TileLayout::total_tiles() const {
  Index count = 0;
  for (const auto& t : tiles) count += static_cast<Index>(t.size());
  return count;
}

void check_intra_level_independence(const IluFactors& f, const StageLayout& layout) {
  for (Index l = 0; l < layout.num_levels(); ++l) {
    const Index lo = layout.level_ptr[sz(l)];
    const Index hi = layout.level_ptr[sz(l) + 1];
    for (Index r = lo; r < hi; ++r) {
      for (Index c : f.pattern.row(r)) {
        if (c != r && c >= lo && c < hi)
          throw_error(ErrorCode::sr_dependency_violation,
                      "rows " + std::to_string(r) + " and " + std::to_string(c) + " share level " + std::to_string(l),
                      r);
      }
    }
  }
}

TileLayout build_tiles(const IluFactors& f, const StageLayout& layout, Index tile_size) {
  if (layout.source != LevelSource::lower_AplusAT)
    throw_error(ErrorCode::sr_requires_symmetrized_levels,
                "segmented rows needs levels computed on lower(A + A^T)");
  if (tile_size < 1) throw_error(ErrorCode::invalid_argument, "tile size must be positive");
  if (layout.n != f.n) throw_error(ErrorCode::size_mismatch, "layout was built for a different matrix");
  check_intra_level_independence(f, layout);

  TileLayout t;
  t.tile_size = tile_size;
  t.upper_rows = layout.upper_rows;
  for (Index l = 0; l < layout.num_levels(); ++l)
    t.subblocks.push_back(make_subblock(f, layout.upper_rows, layout.level_ptr[sz(l)], layout.level_ptr[sz(l) + 1]));
  t.subblocks.push_back(make_subblock(f, layout.upper_rows, layout.upper_rows, f.n));
  for (const auto& s : t.subblocks) t.tiles.push_back(make_tiles(s, tile_size));
  return t;
}

ErChunks build_er_chunks(const IluFactors& f, const StageLayout& layout, int nthreads) {
  if (nthreads < 1) throw_error(ErrorCode::invalid_argument, "nthreads must be at least 1");
  const Index lower = layout.lower_rows();
  std::vector<Index> prefix(sz(lower) + 1, 0);
  for (Index k = 0; k < lower; ++k) {
    const Index r = layout.upper_rows + k;
    const auto row = f.pattern.row(r);
    const auto left = std::lower_bound(row.begin(), row.end(), layout.upper_rows) - row.begin();
    prefix[sz(k) + 1] = prefix[sz(k)] + static_cast<Index>(left) + 1;
  }
  ErChunks chunks;
  chunks.bounds.push_back(0);
  const double total = static_cast<double>(prefix.back());
  for (int w = 1; w < nthreads; ++w) {
    const auto target = static_cast<Index>(total * w / nthreads);
    Index k = static_cast<Index>(std::lower_bound(prefix.begin(), prefix.end(), target) - prefix.begin());
    k = std::clamp(k, chunks.bounds.back(), lower);
    chunks.bounds.push_back(k);
  }
  chunks.bounds.push_back(lower);
  return chunks;
}

bool corner_worth_parallel(const StageLayout& layout, int nthreads) {
  return nthreads > 1 && layout.lower_rows() > 4 * nthreads;
}

SyncSchedule build_corner_schedule(const IluFactors& f, const StageLayout& layout, int nthreads) {
  const Index nu = layout.upper_rows;
  const Index m = layout.lower_rows();
  SparsityPattern local;
  local.n = m;
  local.row_start.assign(sz(m) + 1, 0);
  for (Index k = 0; k < m; ++k) {
    for (Index c : f.pattern.row(nu + k))
      if (c >= nu && c < nu + k) local.col.push_back(c - nu);
    local.row_start[sz(k) + 1] = local.nnz();
  }
  const LevelSchedule levels = compute_levels(local, LevelSource::lower_A);
  std::vector<std::vector<Index>> global(levels.levels.size());
  for (std::size_t l = 0; l < levels.levels.size(); ++l)
    for (Index k : levels.levels[l]) global[l].push_back(nu + k);
  return build_factor_schedule(f, global, nthreads);
}

void factor_sr(IluFactors& f, const StageLayout& layout, const TileLayout& tiles, WorkerPool& pool,
               CompletionFlags& flags, const SyncSchedule* corner_schedule) {
  if (layout.lower_rows() == 0) return;
  if (static_cast<Index>(tiles.subblocks.size()) != layout.num_levels() + 1 || tiles.upper_rows != layout.upper_rows)
    throw_error(ErrorCode::invalid_argument, "tile layout does not match the stage layout");
  const detail::FactorView view(f);
  const Index nu = layout.upper_rows;
  const Index corner = tiles.corner();

  std::optional<DropRecord> drops;
  if (f.drop_tol > 0.0) {
    drops.emplace();
    drops->dropped.assign(f.val.size(), 0);
    drops->original.assign(f.val.size(), 0.0);
  }
  DropRecord* rec = drops ? &*drops : nullptr;

  // Task tags: (kind 0 = divide, level, tile) and (kind 1 + target block, source level, tile).
  TaskGraph graph;
  std::vector<std::vector<Index>> last_writer(tiles.subblocks.size());
  std::vector<std::vector<Index>> divide_task(tiles.subblocks.size());
  for (std::size_t j = 0; j < tiles.subblocks.size(); ++j) last_writer[j].assign(tiles.tiles[j].size(), -1);

  for (Index i = 0; i < corner; ++i) {
    const Subblock& src = tiles.subblocks[sz(i)];
    const auto& src_tiles = tiles.tiles[sz(i)];
    if (src_tiles.empty()) continue;
    for (std::size_t t = 0; t < src_tiles.size(); ++t) {
      const Index task = graph.add(0, i, static_cast<Index>(t));
      graph.depend(task, last_writer[sz(i)][t]);
      divide_task[sz(i)].push_back(task);
    }
    for (Index j = i + 1; j <= corner; ++j) {
      const Subblock& tgt = tiles.subblocks[sz(j)];
      const auto& tgt_tiles = tiles.tiles[sz(j)];
      for (std::size_t t = 0; t < tgt_tiles.size(); ++t) {
        const Tile& target = tgt_tiles[t];
        const Index e_lo = src.offset[sz(target.first_row)];
        const Index e_hi = src.offset[sz(target.last_row) + 1];
        if (e_lo == e_hi) continue;
        (void)tgt;
        const Index task = graph.add(1 + j, i, static_cast<Index>(t));
        // Divide tasks whose entries cover the source rows of this target.
        const auto first = std::upper_bound(src_tiles.begin(), src_tiles.end(), e_lo,
                                            [](Index e, const Tile& x) { return e < x.end; });
        for (auto it = first; it != src_tiles.end() && it->begin < e_hi; ++it)
          graph.depend(task, divide_task[sz(i)][sz(static_cast<Index>(it - src_tiles.begin()))]);
        graph.depend(task, last_writer[sz(j)][t]);
        last_writer[sz(j)][t] = task;
      }
    }
  }

  graph.execute(pool, [&](const TaskGraph::Task& task) {
    if (task.a == 0) {
      divide_tile(view, nu, tiles.subblocks[sz(task.b)], tiles.tiles[sz(task.b)][sz(task.c)], rec);
    } else {
      const Index j = task.a - 1;
      update_tile(view, nu, tiles.subblocks[sz(task.b)], tiles.subblocks[sz(j)], tiles.tiles[sz(j)][sz(task.c)], rec);
    }
  });

  factor_corner(f, layout, pool, flags, corner_schedule);
  check_lower_pivots(f, layout);
}

void factor_er(IluFactors& f, const StageLayout& layout, const ErChunks& chunks, WorkerPool& pool,
               CompletionFlags& flags, const SyncSchedule* corner_schedule) {
  if (layout.lower_rows() == 0) return;
  if (chunks.bounds.size() != sz(pool.size()) + 1)
    throw_error(ErrorCode::invalid_argument, "chunk count differs from the worker count");
  const detail::FactorView view(f);
  const Index nu = layout.upper_rows;
  pool.run([&](int w) {
    for (Index k = chunks.bounds[sz(w)]; k < chunks.bounds[sz(w) + 1]; ++k) detail::eliminate_row(view, nu + k, 0, nu);
  });
  factor_corner(f, layout, pool, flags, corner_schedule);
  check_lower_pivots(f, layout);
}

}  // namespace lsilu
