#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/weights.hpp"

// Passage-time engine: windowed single-source shortest paths with an
// exactness certificate, geodesic DAGs with exact path counts and pivotal
// edges, growth balls, box-to-box times, box diameters, local-box restricted
// times and minimal self-avoiding-walk times.

namespace fpp {

using BigInt = boost::multiprecision::cpp_int;

template <class F>
concept EdgeWeightFn = requires(const F& f, const Edge& e) {
  { f(e) } -> std::convertible_to<double>;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PassageField {
  Site source;
  Window window;
  std::vector<double> dist;      // tau(source, site) within the window
  std::vector<std::size_t> parent;  // one shortest-path predecessor per site
  double boundary_min = kInf;    // min of dist over the window boundary

  double at(const Site& s) const { return dist[window.index_of(s)]; }
};

namespace detail {

struct QueueEntry {
  double d;
  std::size_t idx;
  friend bool operator>(const QueueEntry& a, const QueueEntry& b) { return a.d > b.d; }
};

}  // namespace detail

// Single- or multi-source Dijkstra restricted to the window. Weights are
// nonnegative, so the settled distances are exact window-restricted passage
// times.
template <EdgeWeightFn F>
PassageField dijkstra_multi(const F& weights, const std::vector<Site>& sources,
                            const Window& window) {
  PassageField pf;
  pf.source = sources.front();
  pf.window = window;
  pf.dist.assign(window.size(), kInf);
  pf.parent.assign(window.size(), Window::npos);

  std::priority_queue<detail::QueueEntry, std::vector<detail::QueueEntry>, std::greater<>> heap;
  for (const Site& s : sources) {
    if (!window.contains(s)) throw std::invalid_argument("dijkstra: source outside window");
    std::size_t i = window.index_of(s);
    pf.dist[i] = 0.0;
    heap.push({0.0, i});
  }

  const int d = window.dim();
  std::vector<bool> settled(window.size(), false);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    Site su = window.site_at(u);
    for (int a = 0; a < d; ++a) {
      for (int dir : {+1, -1}) {
        std::size_t v = window.neighbor_index(u, a, dir);
        if (v == Window::npos || settled[v]) continue;
        Site sv = su.shifted(a, dir);
        double w = weights(Edge(su, sv));
        double dv = du + w;
        if (dv < pf.dist[v]) {
          pf.dist[v] = dv;
          pf.parent[v] = u;
          heap.push({dv, v});
        }
      }
    }
  }

  for (std::size_t i = 0; i < window.size(); ++i)
    if (window.is_boundary(i)) pf.boundary_min = std::min(pf.boundary_min, pf.dist[i]);
  return pf;
}

template <EdgeWeightFn F>
PassageField dijkstra(const F& weights, const Site& source, const Window& window) {
  return dijkstra_multi(weights, std::vector<Site>{source}, window);
}

// --------------------------------------------------------------------------
// Exact passage time with truncation certificate.
//
// Any path that leaves the window pays at least the cheapest exit cost from
// each terminal, so tau_win(0,x) <= bmin(0) + bmin(x) certifies that the
// window value equals the infinite-lattice value.

struct ExactPassageOptions {
  int initial_margin = 4;
  double growth_factor = 1.6;
  int radius_cap = 4096;
};

struct ExactPassageResult {
  double time = kInf;
  Window window;
  bool certified = false;
  double certificate_slack = 0.0;  // bmin(src)+bmin(dst) - T, >= 0 when certified
  PassageField forward;            // from src
  PassageField backward;           // from dst
};

template <EdgeWeightFn F>
ExactPassageResult exact_passage_time(const F& weights, const Site& src, const Site& dst,
                                      const ExactPassageOptions& opt = {}) {
  if (opt.growth_factor <= 1.0)
    throw std::invalid_argument("exact_passage_time: growth factor must exceed 1");
  const int d = src.dim();
  Site center(std::vector<int>(d, 0));
  for (int a = 0; a < d; ++a) center.coords[a] = (src[a] + dst[a]) / 2;
  int need = std::max(linf_distance(center, src), linf_distance(center, dst));
  int radius = need + opt.initial_margin;

  ExactPassageResult res;
  while (true) {
    Window win(center, radius);
    PassageField fwd = dijkstra(weights, src, win);
    PassageField bwd = dijkstra(weights, dst, win);
    double t = fwd.at(dst);
    res.time = t;
    res.window = win;
    res.certificate_slack = fwd.boundary_min + bwd.boundary_min - t;
    if (t <= fwd.boundary_min + bwd.boundary_min) {
      res.certified = true;
      res.forward = std::move(fwd);
      res.backward = std::move(bwd);
      return res;
    }
    int next = static_cast<int>(std::ceil(radius * opt.growth_factor));
    if (next <= radius) next = radius + 1;
    if (next > opt.radius_cap) {
      res.certified = false;  // uncertified upper bound
      res.forward = std::move(fwd);
      res.backward = std::move(bwd);
      return res;
    }
    radius = next;
  }
}

// --------------------------------------------------------------------------
// Geodesic DAG: union of all geodesic edges between the terminals, oriented
// by increasing tau(0,.), with exact path counts and the pivotal set.

struct GeodesicDag {
  Site src, dst;
  double total_time = 0.0;
  Window window;
  struct DagEdge {
    std::size_t u, v;  // window indices, oriented src -> dst
    Edge edge;
  };
  std::vector<DagEdge> edges;
  std::map<std::size_t, BigInt> forward_count;   // paths src -> site within the DAG
  std::map<std::size_t, BigInt> backward_count;  // paths site -> dst
  BigInt geodesic_count = 0;
  std::vector<Edge> pivotal;
  bool tie_collapse = false;  // a zero-weight geodesic edge joined equal tau values

  std::vector<std::size_t> node_indices() const {
    std::set<std::size_t> s;
    for (const auto& e : edges) {
      s.insert(e.u);
      s.insert(e.v);
    }
    return {s.begin(), s.end()};
  }
};

inline double geodesic_tolerance(double total_time, bool integer_weights) {
  return integer_weights ? 0.0 : 1e-9 * std::max(1.0, total_time);
}

// Membership test: edge {u,v} is on some geodesic iff
// tau(0,u) + t_e + tau(v,x) = T for one of its orientations.
template <EdgeWeightFn F>
GeodesicDag geodesic_dag(const F& weights, const PassageField& fwd, const PassageField& bwd,
                         double total_time, double eps) {
  GeodesicDag dag;
  dag.src = fwd.source;
  dag.dst = bwd.source;
  dag.total_time = total_time;
  dag.window = fwd.window;
  const Window& win = fwd.window;
  const int d = win.dim();

  for (std::size_t u = 0; u < win.size(); ++u) {
    if (fwd.dist[u] == kInf) continue;
    Site su = win.site_at(u);
    for (int a = 0; a < d; ++a) {
      std::size_t v = win.neighbor_index(u, a, +1);
      if (v == Window::npos) continue;
      Site sv = su.shifted(a, +1);
      Edge e(su, sv);
      double w = weights(e);
      bool uv = std::abs(fwd.dist[u] + w + bwd.dist[v] - total_time) <= eps;
      bool vu = std::abs(fwd.dist[v] + w + bwd.dist[u] - total_time) <= eps;
      if (!uv && !vu) continue;
      if (std::abs(fwd.dist[u] - fwd.dist[v]) <= eps) {
        // zero-weight tie: orientation is ambiguous and counting would
        // cycle; report the collapse instead of guessing
        dag.tie_collapse = true;
        continue;
      }
      if (uv && fwd.dist[u] < fwd.dist[v])
        dag.edges.push_back({u, v, e});
      else if (vu && fwd.dist[v] < fwd.dist[u])
        dag.edges.push_back({v, u, e});
    }
  }

  // Topological sweep by increasing tau(0,.): every DAG edge strictly
  // increases it, so processing edges by the distance of their source
  // endpoint is a valid order.
  std::sort(dag.edges.begin(), dag.edges.end(), [&](const auto& a, const auto& b) {
    return fwd.dist[a.u] < fwd.dist[b.u];
  });

  dag.forward_count[win.index_of(dag.src)] = 1;
  for (const auto& e : dag.edges) dag.forward_count[e.v] += dag.forward_count[e.u];
  dag.backward_count[win.index_of(dag.dst)] = 1;
  for (auto it = dag.edges.rbegin(); it != dag.edges.rend(); ++it)
    dag.backward_count[it->u] += dag.backward_count[it->v];
  dag.geodesic_count = dag.forward_count[win.index_of(dag.dst)];

  // Pivotal iff the edge carries every geodesic: fwd(u) * bwd(v) = N.
  if (dag.geodesic_count > 0) {
    for (const auto& e : dag.edges) {
      if (dag.forward_count[e.u] * dag.backward_count[e.v] == dag.geodesic_count)
        dag.pivotal.push_back(e.edge);
    }
    std::sort(dag.pivotal.begin(), dag.pivotal.end());
  }
  return dag;
}

inline const std::vector<Edge>& pivotal_edges(const GeodesicDag& dag) {
  if (dag.geodesic_count < 1) throw std::logic_error("pivotal_edges: empty geodesic DAG");
  return dag.pivotal;
}

// Deletion-based pivotal test, valid even with zero-weight ties: an edge lies
// on every geodesic iff removing it strictly increases the passage time.
// Quadratic in the DAG size; used when tie_collapse is reported.
template <EdgeWeightFn F>
std::vector<Edge> pivotal_edges_by_deletion(const F& weights, const Site& src, const Site& dst,
                                            const Window& window, double total_time, double eps) {
  PassageField fwd = dijkstra(weights, src, window);
  PassageField bwd = dijkstra(weights, dst, window);
  // candidates: edges on some geodesic
  std::vector<Edge> candidates;
  const int d = window.dim();
  for (std::size_t u = 0; u < window.size(); ++u) {
    if (fwd.dist[u] == kInf) continue;
    Site su = window.site_at(u);
    for (int a = 0; a < d; ++a) {
      std::size_t v = window.neighbor_index(u, a, +1);
      if (v == Window::npos) continue;
      Site sv = su.shifted(a, +1);
      Edge e(su, sv);
      double w = weights(e);
      if (std::abs(fwd.dist[u] + w + bwd.dist[v] - total_time) <= eps ||
          std::abs(fwd.dist[v] + w + bwd.dist[u] - total_time) <= eps)
        candidates.push_back(e);
    }
  }
  std::vector<Edge> pivotal;
  for (const Edge& e : candidates) {
    auto deleted = [&](const Edge& q) { return q == e ? kInf : weights(q); };
    PassageField pf = dijkstra(deleted, src, window);
    if (pf.at(dst) > total_time + eps) pivotal.push_back(e);
  }
  std::sort(pivotal.begin(), pivotal.end());
  return pivotal;
}

// --------------------------------------------------------------------------
// Growth ball B(t) = { x : tau(0,x) <= t } (site set; the fattened version
// adds the unit cube around each site).

struct Ball {
  double t = 0.0;
  std::vector<Site> sites;
  bool fattened = false;  // descriptor: each site padded by the unit cube
  bool certified = false;

  bool contains(const Site& s) const {
    return std::binary_search(sites.begin(), sites.end(), s);
  }
};

inline Ball ball(const PassageField& pf, double t) {
  Ball b;
  b.t = t;
  b.certified = pf.boundary_min > t;
  for (std::size_t i = 0; i < pf.window.size(); ++i)
    if (pf.dist[i] <= t) b.sites.push_back(pf.window.site_at(i));
  std::sort(b.sites.begin(), b.sites.end());
  return b;
}

// --------------------------------------------------------------------------
// Box-to-box passage time tau(A, B): minimum over a in A, b in B of the
// window-restricted tau(a, b), via one multi-source run.

template <EdgeWeightFn F>
double box_to_box_time(const F& weights, const std::vector<Site>& a, const std::vector<Site>& b,
                       const Window& window) {
  if (a.empty() || b.empty()) throw std::invalid_argument("box_to_box_time: empty site set");
  PassageField pf = dijkstra_multi(weights, a, window);
  double best = kInf;
  for (const Site& s : b) best = std::min(best, pf.at(s));
  return best;
}

// --------------------------------------------------------------------------
// Box diameter time J_m = max over ordered pairs in the box of tau(z1, z2),
// one single-source run per box site. Certified when every pair satisfies
// the two-sided boundary-exit certificate.

struct BoxDiameterResult {
  double value = 0.0;
  bool certified = true;
};

template <EdgeWeightFn F>
BoxDiameterResult box_diameter_time(const F& weights, const MacroBox& box, const Window& window) {
  std::vector<Site> sites = box.sites();
  for (const Site& s : sites)
    if (!window.contains(s)) throw std::invalid_argument("box_diameter_time: box outside window");
  std::vector<PassageField> fields;
  fields.reserve(sites.size());
  for (const Site& s : sites) fields.push_back(dijkstra(weights, s, window));
  BoxDiameterResult r;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (i == j) continue;
      double t = fields[i].at(sites[j]);
      r.value = std::max(r.value, t);
      if (t > fields[i].boundary_min + fields[j].boundary_min) r.certified = false;
    }
  }
  return r;
}

// --------------------------------------------------------------------------
// Restricted time T_i(u, v): minimal passage time among paths that only use
// the edges of the local box S_i. The box has at most 3^d vertices, so a
// dense Dijkstra over the box is plenty.

template <EdgeWeightFn F>
double restricted_time(const F& weights, const LocalBox& box, const Site& u, const Site& v) {
  if (!box.contains_vertex(u) || !box.contains_vertex(v))
    throw std::invalid_argument("restricted_time: endpoint outside the box");
  std::map<Site, double> dist;
  for (const Site& s : box.vertices) dist[s] = kInf;
  dist[u] = 0.0;
  std::priority_queue<std::pair<double, Site>, std::vector<std::pair<double, Site>>,
                      std::greater<>> heap;
  heap.push({0.0, u});
  while (!heap.empty()) {
    auto [du, su] = heap.top();
    heap.pop();
    if (du > dist[su]) continue;
    if (su == v) return du;
    for (const Site& sv : neighbors(su)) {
      if (!box.contains_vertex(sv)) continue;
      double dv = du + weights(Edge(su, sv));
      if (dv < dist[sv]) {
        dist[sv] = dv;
        heap.push({dv, sv});
      }
    }
  }
  return dist[v];
}

// --------------------------------------------------------------------------
// Minimal passage time over self-avoiding walks of exactly m edges from the
// source: depth-first search with branch-and-bound pruning.

struct SawOptions {
  std::uint64_t node_budget = 200'000'000;
};

struct SawResult {
  double min_time = kInf;
  std::uint64_t nodes_expanded = 0;
  bool budget_exhausted = false;
};

namespace detail {

template <EdgeWeightFn F>
void saw_dfs(const F& weights, const Window& win, std::vector<bool>& visited, Site& cur,
             std::size_t cur_idx, int remaining, double partial, SawResult& out,
             const SawOptions& opt) {
  if (out.budget_exhausted) return;
  if (remaining == 0) {
    out.min_time = std::min(out.min_time, partial);
    return;
  }
  if (++out.nodes_expanded > opt.node_budget) {
    out.budget_exhausted = true;
    return;
  }
  const int d = win.dim();
  for (int a = 0; a < d; ++a) {
    for (int dir : {+1, -1}) {
      std::size_t nxt = win.neighbor_index(cur_idx, a, dir);
      if (nxt == Window::npos || visited[nxt]) continue;
      Site s = cur.shifted(a, dir);
      double w = weights(Edge(cur, s));
      double total = partial + w;
      if (total >= out.min_time) continue;  // prune: cannot beat the incumbent
      visited[nxt] = true;
      std::swap(cur, s);
      saw_dfs(weights, win, visited, cur, nxt, remaining - 1, total, out, opt);
      std::swap(cur, s);
      visited[nxt] = false;
    }
  }
}

}  // namespace detail

template <EdgeWeightFn F>
SawResult min_saw_time(const F& weights, const Site& source, int m, const Window& window,
                       const SawOptions& opt = {}) {
  if (m < 1) throw std::invalid_argument("min_saw_time: m >= 1 required");
  if (window.radius() < m || linf_distance(source, window.center()) + m > window.radius())
    throw std::invalid_argument("min_saw_time: window too small for walks of length m");
  SawResult out;
  std::vector<bool> visited(window.size(), false);
  std::size_t src_idx = window.index_of(source);
  visited[src_idx] = true;
  Site cur = source;
  detail::saw_dfs(weights, window, visited, cur, src_idx, m, 0.0, out, opt);
  if (out.budget_exhausted) throw std::runtime_error("min_saw_time: node budget exhausted");
  return out;
}

}  // namespace fpp
