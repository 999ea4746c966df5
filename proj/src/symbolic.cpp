#include "lsilu/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include "lsilu/worker_pool.hpp"

namespace lsilu {
namespace {
inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }
}  // namespace

Index first_missing_diagonal(const SparsityPattern& a) {
  for (Index r = 0; r < a.n; ++r)
    if (a.find(r, r) < 0) return r;
  return -1;
}

SparsityPattern ilu0_pattern(const SparsityPattern& a) {
  if (const Index r = first_missing_diagonal(a); r >= 0)
    throw_error(ErrorCode::missing_diagonal, "row " + std::to_string(r) + " has no diagonal entry", r);
  return a;
}

std::pair<SparsityPattern, FillLevelTable> iluk_pattern(const SparsityPattern& a, int k) {
  if (k < 0) throw_error(ErrorCode::invalid_argument, "fill level must be non-negative");
  if (const Index r = first_missing_diagonal(a); r >= 0)
    throw_error(ErrorCode::missing_diagonal, "row " + std::to_string(r) + " has no diagonal entry", r);
  if (k == 0) {
    FillLevelTable t;
    t.level.assign(a.col.size(), 0);
    return {a, std::move(t)};
  }

  // Finished upper parts (col > row) of each row with their fill levels.
  std::vector<std::vector<std::pair<Index, int>>> upper(sz(a.n));
  SparsityPattern out;
  out.n = a.n;
  out.row_start.assign(sz(a.n) + 1, 0);
  FillLevelTable table;
  std::map<Index, int> row;
  for (Index i = 0; i < a.n; ++i) {
    row.clear();
    for (Index c : a.row(i)) row.emplace(c, 0);
    for (auto it = row.begin(); it != row.end() && it->first < i; ++it) {
      const Index m = it->first;
      const int lim = it->second;
      for (const auto& [j, lmj] : upper[sz(m)]) {
        const int level = lim + lmj + 1;
        if (level > k) continue;
        auto [pos, inserted] = row.emplace(j, level);
        if (!inserted) pos->second = std::min(pos->second, level);
      }
    }
    for (const auto& [c, level] : row) {
      out.col.push_back(c);
      table.level.push_back(level);
      if (c > i) upper[sz(i)].emplace_back(c, level);
    }
    out.row_start[sz(i) + 1] = out.nnz();
  }
  return {std::move(out), std::move(table)};
}

IluFactors assemble_factors(const CsrMatrix& a, const SparsityPattern& pattern, const Permutation& perm,
                            double drop_tol, bool milu, WorkerPool* pool, std::span<const int> row_owner) {
  if (pattern.n != a.n || perm.size() != a.n)
    throw_error(ErrorCode::size_mismatch, "matrix, pattern and permutation sizes differ");
  if (!row_owner.empty() && row_owner.size() != sz(a.n))
    throw_error(ErrorCode::size_mismatch, "row owner map has the wrong length");
  if (drop_tol < 0.0) throw_error(ErrorCode::invalid_argument, "drop tolerance must be non-negative");

  IluFactors f;
  f.n = a.n;
  f.pattern = pattern;
  f.perm = perm;
  f.drop_tol = drop_tol;
  f.milu = milu;
  f.diag_pos.resize(sz(a.n));
  for (Index i = 0; i < a.n; ++i) {
    const Index d = pattern.find(i, i);
    if (d < 0) throw_error(ErrorCode::missing_diagonal, "row " + std::to_string(i) + " has no diagonal entry", i);
    f.diag_pos[sz(i)] = d;
  }
  // Allocation only; each worker first touches the rows it owns.
  f.val = std::vector<double>(pattern.col.size());
  f.row_norm = std::vector<double>(sz(a.n));

  auto fill_row = [&](Index i, std::vector<std::pair<Index, double>>& buf) {
    const Index old = perm.old_of(i);
    buf.clear();
    double norm = 0.0;
    for (Index q = a.row_begin(old); q < a.row_end(old); ++q) {
      buf.emplace_back(perm.new_of(a.col[sz(q)]), a.val[sz(q)]);
      norm = std::max(norm, std::abs(a.val[sz(q)]));
    }
    std::sort(buf.begin(), buf.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Index p = pattern.row_begin(i);
    const Index end = pattern.row_end(i);
    for (Index p0 = p; p0 < end; ++p0) f.val[sz(p0)] = 0.0;
    for (const auto& [c, v] : buf) {
      while (p < end && pattern.col[sz(p)] < c) ++p;
      if (p == end || pattern.col[sz(p)] != c)
        throw_error(ErrorCode::invalid_argument,
                    "pattern lacks entry (" + std::to_string(i) + ", " + std::to_string(c) + ")", i);
      f.val[sz(p)] = v;
    }
    f.row_norm[sz(i)] = norm;
  };

  if (pool == nullptr || pool->size() == 1) {
    std::vector<std::pair<Index, double>> buf;
    for (Index i = 0; i < a.n; ++i) fill_row(i, buf);
  } else if (!row_owner.empty()) {
    pool->run([&](int w) {
      std::vector<std::pair<Index, double>> buf;
      for (Index i = 0; i < a.n; ++i)
        if (row_owner[sz(i)] == w) fill_row(i, buf);
    });
  } else {
    pool->parallel_for(a.n, [&](Index begin, Index end, int) {
      std::vector<std::pair<Index, double>> buf;
      for (Index i = begin; i < end; ++i) fill_row(i, buf);
    });
  }
  return f;
}

std::uint64_t factor_digest(std::span<const double> values) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace lsilu
