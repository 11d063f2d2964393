#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/passage.hpp"
#include "fpp/stats.hpp"

// Exact micro-laboratory for the entropy method: full configuration
// enumeration of a tiny edge-weighted graph, certifying the entropy
// definition, the variational formula, per-edge and per-box tensorization,
// the resampling bound, the pivotal-count entropy bound and the Chebyshev
// association inequality with machine precision. Monte Carlo estimators
// cover systems beyond the enumeration cap.

namespace fpp {

// Ent X = E X log X - E X log E X, with 0 log 0 = 0.
inline double entropy(const std::vector<double>& values, const std::vector<double>& probs) {
  if (values.size() != probs.size()) throw std::invalid_argument("entropy: size mismatch");
  std::vector<double> xlogx(values.size()), px(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw std::invalid_argument("entropy: negative value");
    xlogx[i] = probs[i] * (values[i] > 0 ? values[i] * std::log(values[i]) : 0.0);
    px[i] = probs[i] * values[i];
  }
  double ex = stats::kahan_sum(px);
  double exlogx = stats::kahan_sum(xlogx);
  if (ex <= 0) return 0.0;
  return exlogx - ex * std::log(ex);
}

// A tiny finite graph with per-edge finite-discrete weight laws and two
// terminals; small enough that the product measure is enumerable.
struct ExactSystem {
  int d = 2;
  std::vector<Site> sites;
  std::vector<Edge> edges;
  std::vector<std::vector<double>> support;  // per edge, values >= 0
  std::vector<std::vector<double>> probs;
  Site src, dst;
  std::vector<double> lambda_grid = {-1.0, -0.5, -0.1, -0.01};
  std::size_t config_cap = std::size_t{1} << 20;

  std::size_t site_index(const Site& s) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
      if (sites[i] == s) return i;
    throw std::out_of_range("ExactSystem: unknown site " + s.to_string());
  }

  std::size_t config_count() const {
    std::size_t n = 1;
    for (const auto& sup : support) {
      if (sup.empty()) throw std::invalid_argument("ExactSystem: empty support");
      n *= sup.size();
    }
    return n;
  }
};

// Axis-aligned lattice box system: sites in prod_a {0..extent_a}, all
// nearest-neighbor edges, terminals at opposite corners, the same law on
// every edge. extents {1,1} gives the 4-edge 2x2 system, {2,2} the 12-edge
// 3x3 system.
inline ExactSystem make_box_system(const std::vector<int>& extents,
                                   const std::vector<double>& values,
                                   const std::vector<double>& probs) {
  ExactSystem sys;
  sys.d = static_cast<int>(extents.size());
  std::vector<int> cur(extents.size(), 0);
  // row-major enumeration of the box
  std::size_t total = 1;
  for (int e : extents) total *= static_cast<std::size_t>(e + 1);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    std::vector<int> c(extents.size());
    for (int a = static_cast<int>(extents.size()) - 1; a >= 0; --a) {
      c[a] = static_cast<int>(rem % (extents[a] + 1));
      rem /= (extents[a] + 1);
    }
    sys.sites.emplace_back(c);
  }
  for (const Site& s : sys.sites) {
    for (int a = 0; a < sys.d; ++a) {
      Site t = s.shifted(a, 1);
      if (t[a] <= extents[a]) {
        sys.edges.emplace_back(s, t);
        sys.support.push_back(values);
        sys.probs.push_back(probs);
      }
    }
  }
  sys.src = sys.sites.front();
  std::vector<int> corner(extents.begin(), extents.end());
  sys.dst = Site(corner);
  return sys;
}

// Straight path of `length` edges along the first axis.
inline ExactSystem make_path_system(int length, const std::vector<double>& values,
                                    const std::vector<double>& probs, int d = 2) {
  ExactSystem sys;
  sys.d = d;
  for (int i = 0; i <= length; ++i) {
    std::vector<int> c(d, 0);
    c[0] = i;
    sys.sites.emplace_back(c);
  }
  for (int i = 0; i < length; ++i) {
    sys.edges.emplace_back(sys.sites[i], sys.sites[i + 1]);
    sys.support.push_back(values);
    sys.probs.push_back(probs);
  }
  sys.src = sys.sites.front();
  sys.dst = sys.sites.back();
  return sys;
}

namespace detail {

// Shortest s->t distances on the explicit system graph for one weight
// assignment; dense Dijkstra, graph has a handful of sites.
inline std::vector<double> system_distances(const ExactSystem& sys,
                                            const std::vector<double>& weights,
                                            std::size_t source) {
  const std::size_t n = sys.sites.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> graph(n);  // (site, edge id)
  for (std::size_t e = 0; e < sys.edges.size(); ++e) {
    std::size_t u = sys.site_index(sys.edges[e].u);
    std::size_t v = sys.site_index(sys.edges[e].v());
    graph[u].push_back({v, e});
    graph[v].push_back({u, e});
  }

  std::vector<double> dist(n, kInf);
  dist[source] = 0.0;
  std::priority_queue<std::pair<double, std::size_t>, std::vector<std::pair<double, std::size_t>>,
                      std::greater<>> heap;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (auto [v, e] : graph[u]) {
      double dv = du + weights[e];
      if (dv < dist[v]) {
        dist[v] = dv;
        heap.push({dv, v});
      }
    }
  }
  return dist;
}

inline double system_time(const ExactSystem& sys, const std::vector<double>& weights) {
  return system_distances(sys, weights, sys.site_index(sys.src))[sys.site_index(sys.dst)];
}

// Pivotal edges for one weight assignment: forward/backward path counting on
// the geodesic DAG when edge orientations are unambiguous, deletion test
// when a zero-weight tie makes them ambiguous.
inline std::vector<std::size_t> system_pivotal_edges(const ExactSystem& sys,
                                                     const std::vector<double>& weights,
                                                     double eps = 1e-12) {
  std::size_t s = sys.site_index(sys.src), t = sys.site_index(sys.dst);
  std::vector<double> fwd = system_distances(sys, weights, s);
  std::vector<double> bwd = system_distances(sys, weights, t);
  double total = fwd[t];
  double tol = eps * std::max(1.0, total);

  struct DagEdge {
    std::size_t u, v, id;
  };
  std::vector<DagEdge> dag;
  bool tie = false;
  for (std::size_t e = 0; e < sys.edges.size(); ++e) {
    std::size_t u = sys.site_index(sys.edges[e].u);
    std::size_t v = sys.site_index(sys.edges[e].v());
    bool uv = std::abs(fwd[u] + weights[e] + bwd[v] - total) <= tol;
    bool vu = std::abs(fwd[v] + weights[e] + bwd[u] - total) <= tol;
    if (!uv && !vu) continue;
    if (std::abs(fwd[u] - fwd[v]) <= tol) {
      tie = true;
      break;
    }
    if (uv && fwd[u] < fwd[v])
      dag.push_back({u, v, e});
    else if (vu && fwd[v] < fwd[u])
      dag.push_back({v, u, e});
  }

  std::vector<std::size_t> pivotal;
  if (!tie) {
    std::sort(dag.begin(), dag.end(),
              [&](const DagEdge& a, const DagEdge& b) { return fwd[a.u] < fwd[b.u]; });
    std::vector<BigInt> fc(sys.sites.size(), 0), bc(sys.sites.size(), 0);
    fc[s] = 1;
    for (const auto& e : dag) fc[e.v] += fc[e.u];
    bc[t] = 1;
    for (auto it2 = dag.rbegin(); it2 != dag.rend(); ++it2) bc[it2->u] += bc[it2->v];
    BigInt n = fc[t];
    for (const auto& e : dag)
      if (fc[e.u] * bc[e.v] == n) pivotal.push_back(e.id);
    return pivotal;
  }

  // deletion test
  for (std::size_t e = 0; e < sys.edges.size(); ++e) {
    std::vector<double> w2 = weights;
    w2[e] = kInf;
    if (system_distances(sys, w2, s)[t] > total + tol) pivotal.push_back(e);
  }
  return pivotal;
}

}  // namespace detail

// One row per configuration of the product measure.
struct ConfigRow {
  double prob = 0.0;
  double t = 0.0;
  long long pivotal_count = 0;
};

class ConfigTable {
 public:
  const ExactSystem* sys = nullptr;
  std::vector<ConfigRow> rows;

  std::size_t digit(std::size_t config, std::size_t edge) const {
    return (config / radix_[edge]) % sys->support[edge].size();
  }

  // configuration id with the digits of the given edges zeroed; the group
  // key for conditional expectations over those coordinates
  std::size_t complement_key(std::size_t config, const std::vector<std::size_t>& edges) const {
    std::size_t key = config;
    for (std::size_t e : edges) key -= digit(config, e) * radix_[e];
    return key;
  }

  std::size_t with_digits(std::size_t config, const std::vector<std::size_t>& edges,
                          const std::vector<std::size_t>& digits) const {
    std::size_t id = complement_key(config, edges);
    for (std::size_t i = 0; i < edges.size(); ++i) id += digits[i] * radix_[edges[i]];
    return id;
  }

  std::vector<double> weights_of(std::size_t config) const {
    std::vector<double> w(sys->edges.size());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = sys->support[e][digit(config, e)];
    return w;
  }

  double total_probability() const {
    std::vector<double> p(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) p[i] = rows[i].prob;
    return stats::kahan_sum(p);
  }

  friend ConfigTable enumerate(const ExactSystem& sys, bool with_pivotal);

 private:
  std::vector<std::size_t> radix_;
};

inline ConfigTable enumerate(const ExactSystem& sys, bool with_pivotal = true) {
  std::size_t n = sys.config_count();
  if (n > sys.config_cap) throw std::length_error("enumerate: configuration cap exceeded");
  ConfigTable table;
  table.sys = &sys;
  table.radix_.assign(sys.edges.size(), 1);
  for (std::size_t e = 1; e < sys.edges.size(); ++e)
    table.radix_[e] = table.radix_[e - 1] * sys.support[e - 1].size();
  table.rows.resize(n);
  for (std::size_t id = 0; id < n; ++id) {
    double p = 1.0;
    for (std::size_t e = 0; e < sys.edges.size(); ++e) p *= sys.probs[e][table.digit(id, e)];
    std::vector<double> w = table.weights_of(id);
    table.rows[id].prob = p;
    table.rows[id].t = detail::system_time(sys, w);
    if (with_pivotal)
      table.rows[id].pivotal_count =
          static_cast<long long>(detail::system_pivotal_edges(sys, w).size());
  }
  return table;
}

// E over the complement coordinates of the entropy of X restricted to the
// coordinates in `inner`. Exact: configurations are grouped by their
// complement key and each group is a conditional distribution.
inline double expected_conditional_entropy(const ConfigTable& table,
                                           const std::vector<double>& x,
                                           const std::vector<std::size_t>& inner) {
  struct Acc {
    double p = 0.0, px = 0.0, pxlogx = 0.0;
  };
  std::unordered_map<std::size_t, Acc> groups;
  for (std::size_t id = 0; id < table.rows.size(); ++id) {
    if (x[id] < 0) throw std::invalid_argument("expected_conditional_entropy: negative value");
    Acc& g = groups[table.complement_key(id, inner)];
    double p = table.rows[id].prob;
    g.p += p;
    g.px += p * x[id];
    g.pxlogx += p * (x[id] > 0 ? x[id] * std::log(x[id]) : 0.0);
  }
  double total = 0.0;
  for (const auto& [key, g] : groups) {
    if (g.p <= 0 || g.px <= 0) continue;
    total += g.pxlogx - g.px * std::log(g.px / g.p);
  }
  return total;
}

// The covering family of local boxes: for each system edge, the 3^d box
// anchored at its lexicographically smaller endpoint, restricted to system
// edges. One box per edge, as in the infinite enumeration.
inline std::vector<std::vector<std::size_t>> covering_boxes(const ExactSystem& sys) {
  std::vector<std::vector<std::size_t>> boxes;
  boxes.reserve(sys.edges.size());
  for (const Edge& anchor_edge : sys.edges) {
    LocalBox box = local_box(anchor_edge.u);
    std::vector<std::size_t> members;
    for (std::size_t e = 0; e < sys.edges.size(); ++e)
      if (box.contains_edge(sys.edges[e])) members.push_back(e);
    boxes.push_back(std::move(members));
  }
  return boxes;
}

struct TensorizationReport {
  double lambda = 0.0;
  double ent = 0.0;        // Ent e^{lambda T}
  double edge_sum = 0.0;   // sum_e E Ent_e
  double box_sum = 0.0;    // sum_i E Ent_{S_i}
  bool chain_holds(double tol = 1e-9) const {
    return ent <= edge_sum + tol && edge_sum <= box_sum + tol;
  }
};

inline std::vector<double> exp_lambda_t(const ConfigTable& table, double lambda) {
  std::vector<double> x(table.rows.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(lambda * table.rows[i].t);
  return x;
}

inline TensorizationReport tensorization_check(const ConfigTable& table, double lambda) {
  if (lambda > 0) throw std::invalid_argument("tensorization_check: lambda <= 0 required");
  TensorizationReport rep;
  rep.lambda = lambda;
  std::vector<double> x = exp_lambda_t(table, lambda);
  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = table.rows[i].prob;
  rep.ent = entropy(x, p);
  for (std::size_t e = 0; e < table.sys->edges.size(); ++e)
    rep.edge_sum += expected_conditional_entropy(table, x, {e});
  for (const auto& box : covering_boxes(*table.sys))
    rep.box_sum += expected_conditional_entropy(table, x, box);
  return rep;
}

// Resampling bound for one box: conditionally on the weights outside S,
//   Ent_S e^{lambda T} <= lambda^2 E'_S[ e^{lambda T} (T_i - T)_+^2 ],
// where E'_S runs over the S-weights and their independent copies. The
// doubled S-space is enumerated exactly per complement group.
struct ResamplingReport {
  double lambda = 0.0;
  double lhs_mean = 0.0;  // E Ent_S e^{lambda T}
  double rhs_mean = 0.0;  // lambda^2 E E'_S[...]
  double min_margin = std::numeric_limits<double>::infinity();  // min over groups of rhs - lhs
  bool holds(double tol = 1e-9) const { return min_margin >= -tol; }
};

inline ResamplingReport blm_resampling_check(const ConfigTable& table, double lambda,
                                             const std::vector<std::size_t>& box) {
  if (lambda > 0) throw std::invalid_argument("blm_resampling_check: lambda <= 0 required");
  std::size_t box_configs = 1;
  for (std::size_t e : box) box_configs *= table.sys->support[e].size();
  if (table.rows.size() * box_configs > table.sys->config_cap)
    throw std::length_error("blm_resampling_check: doubled space exceeds configuration cap");

  struct Member {
    double q;  // conditional probability of this S-assignment
    double t;
  };
  std::unordered_map<std::size_t, std::vector<Member>> groups;
  std::unordered_map<std::size_t, double> group_prob;
  for (std::size_t id = 0; id < table.rows.size(); ++id) {
    std::size_t key = table.complement_key(id, box);
    groups[key].push_back({table.rows[id].prob, table.rows[id].t});
    group_prob[key] += table.rows[id].prob;
  }

  ResamplingReport rep;
  rep.lambda = lambda;
  for (auto& [key, members] : groups) {
    double pg = group_prob[key];
    if (pg <= 0) continue;
    for (auto& m : members) m.q /= pg;
    double ex = 0.0, exlogx = 0.0;
    for (const auto& m : members) {
      double x = std::exp(lambda * m.t);
      ex += m.q * x;
      exlogx += m.q * x * lambda * m.t;  // x log x = e^{lt} * l t
    }
    double lhs = exlogx - ex * std::log(ex);
    double rhs = 0.0;
    for (const auto& mj : members) {
      double xj = std::exp(lambda * mj.t);
      for (const auto& mk : members) {
        double diff = mk.t - mj.t;
        if (diff > 0) rhs += mj.q * mk.q * xj * diff * diff;
      }
    }
    rhs *= lambda * lambda;
    rep.lhs_mean += pg * lhs;
    rep.rhs_mean += pg * rhs;
    rep.min_margin = std::min(rep.min_margin, rhs - lhs);
  }
  return rep;
}

// Pathwise resampling facts on the doubled enumeration, for every
// (configuration, S-resample) pair:
//   - if some geodesic of the original configuration avoids S (in particular
//     whenever the geodesic is unique and no pivotal edge lies in S), its cost
//     is unchanged by the resample, so T_i <= T;
//   - (T_i - T)_+ <= sum over {u,v} in S of T_i(u,v), the S-restricted
//     passage times in the resampled configuration.
// With atoms in the law, distinct tied geodesics can each cross S while their
// intersection (the pivotal set) misses it, so the hypothesis is stated via
// an S-avoiding geodesic rather than via the pivotal set.
struct PathwiseResamplingReport {
  std::size_t pairs_checked = 0;
  std::size_t difference_violations = 0;
  std::size_t new_bound_violations = 0;
  bool holds() const { return difference_violations == 0 && new_bound_violations == 0; }
};

inline double restricted_time_in_system(const ExactSystem& sys, const std::vector<double>& weights,
                                        const std::vector<std::size_t>& box, std::size_t u,
                                        std::size_t v) {
  // Dijkstra over the subgraph spanned by the box edges only.
  std::vector<double> w2(weights.size(), kInf);
  for (std::size_t e : box) w2[e] = weights[e];
  return detail::system_distances(sys, w2, u)[v];
}

inline PathwiseResamplingReport pathwise_resampling_check(const ConfigTable& table,
                                                          const std::vector<std::size_t>& box,
                                                          double tol = 1e-12) {
  const ExactSystem& sys = *table.sys;
  PathwiseResamplingReport rep;
  std::size_t box_configs = 1;
  for (std::size_t e : box) box_configs *= sys.support[e].size();

  for (std::size_t id = 0; id < table.rows.size(); ++id) {
    double t = table.rows[id].t;
    // a geodesic avoids the box iff the best box-free path already costs t
    std::vector<double> w_avoid = table.weights_of(id);
    for (std::size_t e : box) w_avoid[e] = kInf;
    double t_avoid =
        detail::system_distances(sys, w_avoid, sys.site_index(sys.src))[sys.site_index(sys.dst)];
    bool geodesic_avoids_box = t_avoid <= t + tol;

    std::vector<std::size_t> digits(box.size(), 0);
    for (std::size_t k = 0; k < box_configs; ++k) {
      std::size_t rem = k;
      for (std::size_t i = 0; i < box.size(); ++i) {
        digits[i] = rem % sys.support[box[i]].size();
        rem /= sys.support[box[i]].size();
      }
      std::size_t rid = table.with_digits(id, box, digits);
      double ti = table.rows[rid].t;
      ++rep.pairs_checked;
      if (geodesic_avoids_box && ti > t + tol) ++rep.difference_violations;
      double bound = 0.0;
      std::vector<double> wr = table.weights_of(rid);
      for (std::size_t e : box) {
        std::size_t u = sys.site_index(sys.edges[e].u);
        std::size_t v = sys.site_index(sys.edges[e].v());
        bound += restricted_time_in_system(sys, wr, box, u, v);
      }
      if (std::max(ti - t, 0.0) > bound + tol) ++rep.new_bound_violations;
    }
  }
  return rep;
}

// Variational formula: E[XW] <= Ent X + E X log E e^W for any W, with
// equality at the witness Z = log(X / E X).
struct VariationalReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};

inline VariationalReport variational_check(const ConfigTable& table, const std::vector<double>& x,
                                           const std::vector<double>& w) {
  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = table.rows[i].prob;
  double exw = 0.0, ex = 0.0, eew = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    exw += p[i] * x[i] * w[i];
    ex += p[i] * x[i];
    eew += p[i] * std::exp(w[i]);
  }
  VariationalReport rep;
  rep.lhs = exw;
  rep.rhs = entropy(x, p) + ex * std::log(eew);
  return rep;
}

// Witness identity E[X log(X/EX)] = Ent X, checked directly.
inline double variational_witness_gap(const ConfigTable& table, const std::vector<double>& x) {
  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = table.rows[i].prob;
  double ex = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) ex += p[i] * x[i];
  double exz = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (x[i] > 0) exz += p[i] * x[i] * std::log(x[i] / ex);
  return std::abs(exz - entropy(x, p));
}

// Chebyshev association: T increasing, e^{lambda T} decreasing, so
// E[e^{lambda T} T] <= E e^{lambda T} E T.
struct AssociationReport {
  double lhs = 0.0, rhs = 0.0;
  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
};

inline AssociationReport association_check(const ConfigTable& table, double lambda) {
  if (lambda > 0) throw std::invalid_argument("association_check: lambda <= 0 required");
  double ext = 0.0, ex = 0.0, et = 0.0;
  for (const ConfigRow& r : table.rows) {
    double x = std::exp(lambda * r.t);
    ext += r.prob * x * r.t;
    ex += r.prob * x;
    et += r.prob * r.t;
  }
  return {ext, ex * et};
}

// Ratio c_hat(lambda) = Ent e^{lambda T} / (lambda^2 E[e^{lambda T} #Piv]).
struct PivotalEntropyReport {
  double lambda = 0.0;
  double ent = 0.0;
  double weighted_pivotal_mean = 0.0;  // E[e^{lambda T} #Piv]
  double ratio = 0.0;
  bool ratio_defined = false;
};

inline PivotalEntropyReport pivotal_entropy_check(const ConfigTable& table, double lambda) {
  if (lambda >= 0) throw std::invalid_argument("pivotal_entropy_check: lambda < 0 required");
  PivotalEntropyReport rep;
  rep.lambda = lambda;
  std::vector<double> x = exp_lambda_t(table, lambda);
  std::vector<double> p(table.rows.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = table.rows[i].prob;
  rep.ent = entropy(x, p);
  for (std::size_t i = 0; i < p.size(); ++i)
    rep.weighted_pivotal_mean += p[i] * x[i] * static_cast<double>(table.rows[i].pivotal_count);
  if (rep.weighted_pivotal_mean > 0) {
    rep.ratio = rep.ent / (lambda * lambda * rep.weighted_pivotal_mean);
    rep.ratio_defined = true;
  }
  return rep;
}

// Empirical exponential moment of phi = #Piv 1{cT < #Piv} with a companion
// tail table.
struct PhiMomentReport {
  double exp_moment = 1.0;  // E e^{alpha phi}
  stats::Interval exp_moment_ci;
  std::vector<std::pair<long long, double>> tail;  // (n, P(phi >= n))
};

inline PhiMomentReport phi_moment_estimate(const std::vector<std::pair<double, long long>>& samples,
                                           double c, double alpha) {
  if (c <= 0 || alpha <= 0) throw std::invalid_argument("phi_moment_estimate: c, alpha > 0");
  PhiMomentReport rep;
  stats::MeanVar mv;
  long long max_phi = 0;
  std::vector<long long> phis;
  phis.reserve(samples.size());
  for (const auto& [t, piv] : samples) {
    long long phi = (c * t < static_cast<double>(piv)) ? piv : 0;
    phis.push_back(phi);
    max_phi = std::max(max_phi, phi);
    mv.add(std::exp(alpha * static_cast<double>(phi)));
  }
  rep.exp_moment = mv.mean;
  double half = stats::kZ95 * mv.stderr_mean();
  rep.exp_moment_ci = {mv.mean - half, mv.mean + half};
  for (long long n = 1; n <= max_phi; ++n) {
    std::size_t count = 0;
    for (long long phi : phis)
      if (phi >= n) ++count;
    rep.tail.push_back({n, static_cast<double>(count) / samples.size()});
  }
  return rep;
}

// Plug-in Monte Carlo estimate of Ent e^{lambda T} with a bootstrap CI.
struct McEntropyEstimate {
  double value = 0.0;
  stats::Interval ci;
};

inline McEntropyEstimate mc_entropy(double lambda, const std::vector<double>& t_samples,
                                    std::uint64_t seed = 1, int bootstrap_replicates = 400) {
  if (lambda > 0) throw std::invalid_argument("mc_entropy: lambda <= 0 required");
  auto plugin = [lambda](const std::vector<double>& ts) {
    double ex = 0.0, exlogx = 0.0;
    for (double t : ts) {
      double x = std::exp(lambda * t);
      ex += x;
      exlogx += x * lambda * t;
    }
    ex /= static_cast<double>(ts.size());
    exlogx /= static_cast<double>(ts.size());
    if (ex <= 0) return 0.0;
    return exlogx - ex * std::log(ex);
  };
  McEntropyEstimate est;
  est.value = plugin(t_samples);
  est.ci = stats::bootstrap_ci(t_samples, plugin, bootstrap_replicates, seed);
  return est;
}

}  // namespace fpp
