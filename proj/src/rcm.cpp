#include <algorithm>
#include <vector>

#include "lsilu/ordering.hpp"

namespace lsilu {
namespace {

inline std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

// Undirected adjacency without self loops.
struct Graph {
  std::vector<Index> start;
  std::vector<Index> adj;
  Index degree(Index v) const { return start[sz(v) + 1] - start[sz(v)]; }
};

Graph build_graph(const SparsityPattern& a) {
  const SparsityPattern s = symmetrize_pattern(a);
  Graph g;
  g.start.assign(sz(s.n) + 1, 0);
  for (Index r = 0; r < s.n; ++r) {
    for (Index c : s.row(r))
      if (c != r) g.adj.push_back(c);
    g.start[sz(r) + 1] = static_cast<Index>(g.adj.size());
  }
  return g;
}

// BFS over the unvisited component of `root`; fills `levels_out` with the
// rooted level structure and returns its eccentricity.
Index rooted_levels(const Graph& g, Index root, const std::vector<char>& done, std::vector<Index>& mark, Index stamp,
                    std::vector<std::vector<Index>>& levels_out) {
  levels_out.clear();
  levels_out.push_back({root});
  mark[sz(root)] = stamp;
  while (true) {
    std::vector<Index> next;
    for (Index v : levels_out.back()) {
      for (Index p = g.start[sz(v)]; p < g.start[sz(v) + 1]; ++p) {
        const Index w = g.adj[sz(p)];
        if (done[sz(w)] || mark[sz(w)] == stamp) continue;
        mark[sz(w)] = stamp;
        next.push_back(w);
      }
    }
    if (next.empty()) break;
    levels_out.push_back(std::move(next));
  }
  return static_cast<Index>(levels_out.size()) - 1;
}

Index min_degree_vertex(const Graph& g, const std::vector<Index>& vs) {
  Index best = vs.front();
  for (Index v : vs)
    if (g.degree(v) < g.degree(best) || (g.degree(v) == g.degree(best) && v < best)) best = v;
  return best;
}

}  // namespace

Permutation rcm_order(const SparsityPattern& a) {
  const Graph g = build_graph(a);
  const Index n = a.n;
  std::vector<char> done(sz(n), 0);
  std::vector<Index> mark(sz(n), -1);
  Index stamp = 0;
  std::vector<Index> order;
  order.reserve(sz(n));
  std::vector<std::vector<Index>> levels;

  for (Index seed = 0; seed < n; ++seed) {
    if (done[sz(seed)]) continue;
    // Component vertices, then the minimum-degree start for the peripheral search.
    rooted_levels(g, seed, done, mark, stamp++, levels);
    std::vector<Index> component;
    for (const auto& l : levels) component.insert(component.end(), l.begin(), l.end());
    Index root = min_degree_vertex(g, component);

    Index ecc = rooted_levels(g, root, done, mark, stamp++, levels);
    while (true) {
      const Index candidate = min_degree_vertex(g, levels.back());
      std::vector<std::vector<Index>> candidate_levels;
      const Index candidate_ecc = rooted_levels(g, candidate, done, mark, stamp++, candidate_levels);
      if (candidate_ecc <= ecc) break;
      root = candidate;
      ecc = candidate_ecc;
      levels = std::move(candidate_levels);
    }

    // Cuthill-McKee sweep: neighbours by ascending degree, ties by index.
    const std::size_t head_start = order.size();
    order.push_back(root);
    done[sz(root)] = 1;
    std::vector<Index> nbrs;
    for (std::size_t head = head_start; head < order.size(); ++head) {
      const Index v = order[head];
      nbrs.clear();
      for (Index p = g.start[sz(v)]; p < g.start[sz(v) + 1]; ++p) {
        const Index w = g.adj[sz(p)];
        if (!done[sz(w)]) {
          done[sz(w)] = 1;
          nbrs.push_back(w);
        }
      }
      std::sort(nbrs.begin(), nbrs.end(), [&](Index x, Index y) {
        return g.degree(x) != g.degree(y) ? g.degree(x) < g.degree(y) : x < y;
      });
      order.insert(order.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return Permutation::from_new_to_old(std::move(order));
}

}  // namespace lsilu
