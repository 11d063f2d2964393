#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/parallel.hpp"
#include "fpp/passage.hpp"
#include "fpp/stats.hpp"
#include "fpp/weights.hpp"

// Statistical layer: time-constant estimation via subadditivity, fluctuation
// and lower-tail fits, shape-deviation measurement, Kesten-event decay,
// box-concentration tails and moment analytics. Every Monte Carlo quantity
// carries a CI and reproduces bit-for-bit from (master seed, config).

namespace fpp {

struct McCommon {
  std::uint64_t master_seed = 1;
  int workers = 1;
  ExactPassageOptions passage;
};

inline std::uint64_t sample_seed(std::uint64_t master, const char* tag, std::uint64_t index) {
  return rng::mix(master, rng::hash_string(tag), index);
}

// ---------------------------------------------------------------------------
// Time constant: mu(x) = inf_n E tau(0, nx) / n.

struct TimeConstantEstimate {
  Site direction;
  std::vector<long long> n_grid;
  std::vector<double> mean_per_n;    // mean of tau(0, nx)/n
  std::vector<double> stderr_per_n;
  std::vector<double> mean_t;        // mean of tau(0, nx) itself
  double mu_upper = kInf;            // min over n of mean + z * stderr
  double mu_point = kInf;            // mean at the largest n
  double mu_lower = 0.0;             // mu_upper minus the CI width at the argmin
  std::size_t uncertified = 0;
};

template <class FieldMaker>
TimeConstantEstimate estimate_mu_with(const FieldMaker& make_field, const Site& x,
                                      const std::vector<long long>& n_grid, int samples_per_n,
                                      const McCommon& mc) {
  if (n_grid.empty()) throw std::invalid_argument("estimate_mu: empty n grid");
  TimeConstantEstimate est;
  est.direction = x;
  est.n_grid = n_grid;
  const int d = x.dim();

  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    long long n = n_grid[gi];
    Site target(std::vector<int>(d, 0));
    for (int a = 0; a < d; ++a) target.coords[a] = static_cast<int>(n * x[a]);

    auto one = [&](std::size_t i) -> std::pair<double, bool> {
      WeightField field = make_field(sample_seed(mc.master_seed, "mu", gi * 1000003ULL + i));
      ExactPassageResult r = exact_passage_time(field, origin(d), target, mc.passage);
      return {r.time, r.certified};
    };
    auto results = parallel_map<std::pair<double, bool>>(samples_per_n, mc.workers, one);

    stats::MeanVar mv;
    for (const auto& [t, certified] : results) {
      mv.add(t / static_cast<double>(n));
      if (!certified) ++est.uncertified;
    }
    est.mean_per_n.push_back(mv.mean);
    est.stderr_per_n.push_back(mv.stderr_mean());
    est.mean_t.push_back(mv.mean * static_cast<double>(n));
  }

  double best = kInf, best_width = 0.0;
  for (std::size_t i = 0; i < est.mean_per_n.size(); ++i) {
    double upper = est.mean_per_n[i] + stats::kZ95 * est.stderr_per_n[i];
    if (upper < best) {
      best = upper;
      best_width = 2 * stats::kZ95 * est.stderr_per_n[i];
    }
  }
  est.mu_upper = best;
  est.mu_lower = best - best_width;
  est.mu_point = est.mean_per_n.back();
  return est;
}

inline TimeConstantEstimate estimate_mu(const Distribution& dist, const Site& x,
                                        const std::vector<long long>& n_grid, int samples_per_n,
                                        const McCommon& mc) {
  auto maker = [&dist](std::uint64_t seed) { return WeightField(dist, seed); };
  return estimate_mu_with(maker, x, n_grid, samples_per_n, mc);
}

// ---------------------------------------------------------------------------
// Fluctuation fit: slope a in log(E T_n - n mu_hat) vs log n.

struct ExponentFit {
  bool degenerate = false;
  std::string note;
  stats::LinearFit fit;
  std::vector<double> log_n, log_gap;
  bool lower_bound_holds = true;  // mean T_n >= n * mu_lower at every n
};

inline ExponentFit nonrandom_fluctuation_fit(const TimeConstantEstimate& mu_est,
                                             double mu_subtract) {
  ExponentFit out;
  std::vector<double> w;
  for (std::size_t i = 0; i < mu_est.n_grid.size(); ++i) {
    double n = static_cast<double>(mu_est.n_grid[i]);
    if (mu_est.mean_t[i] < n * mu_est.mu_lower) out.lower_bound_holds = false;
    double gap = mu_est.mean_t[i] - n * mu_subtract;
    if (gap <= 0) continue;  // dropped, as for deterministic weights
    out.log_n.push_back(std::log(n));
    out.log_gap.push_back(std::log(gap));
    double se_t = mu_est.stderr_per_n[i] * n;  // stderr of mean T_n
    double se_log = se_t / gap;
    w.push_back(se_log > 0 ? 1.0 / (se_log * se_log) : 1.0);
  }
  if (out.log_n.size() < 4) {
    out.degenerate = true;
    out.note = "fewer than 4 positive gaps";
    return out;
  }
  out.fit = stats::weighted_least_squares(out.log_n, out.log_gap, w);
  return out;
}

// ---------------------------------------------------------------------------
// Lower tail: P(T - mean T <= -t sqrt(||x||_1)) with a Gaussian-form fit
// log p = const - c t^2.

struct TailFit {
  std::vector<double> t_grid;
  std::vector<double> tail_prob;
  std::vector<stats::Interval> tail_ci;
  bool fit_defined = false;
  bool all_zero = false;  // c_hat = infinity sentinel
  stats::LinearFit log_tail_vs_t2;  // slope is -c_hat
  double c_hat = std::numeric_limits<double>::infinity();
};

inline TailFit lower_tail_fit(const Distribution& dist, const Site& x, int samples,
                              const std::vector<double>& t_grid, const McCommon& mc) {
  if (samples < 1000) throw std::invalid_argument("lower_tail_fit: need at least 10^3 samples");
  const int d = x.dim();
  auto one = [&](std::size_t i) {
    WeightField field(dist, sample_seed(mc.master_seed, "lower-tail", i));
    return exact_passage_time(field, origin(d), x, mc.passage).time;
  };
  auto ts = parallel_map<double>(samples, mc.workers, one);
  stats::MeanVar mv;
  for (double t : ts) mv.add(t);
  double tbar = mv.mean;
  double root = std::sqrt(static_cast<double>(x.l1_norm()));

  TailFit out;
  out.t_grid = t_grid;
  std::vector<double> fx, fy, fw;
  bool any_positive = false;
  for (double t : t_grid) {
    std::uint64_t hits = 0;
    for (double T : ts)
      if (T - tbar <= -t * root) ++hits;
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    out.tail_prob.push_back(p);
    out.tail_ci.push_back(stats::binomial_ci(hits, samples));
    if (t > 0 && hits > 0) {
      any_positive = true;
      fx.push_back(t * t);
      fy.push_back(std::log(p));
      // delta-method variance of log p
      double var_logp = (1.0 - p) / (p * static_cast<double>(samples));
      fw.push_back(var_logp > 0 ? 1.0 / var_logp : 1.0);
    }
  }
  out.all_zero = !any_positive;
  if (fx.size() >= 4) {
    out.log_tail_vs_t2 = stats::weighted_least_squares(fx, fy, fw);
    out.fit_defined = true;
    out.c_hat = -out.log_tail_vs_t2.slope;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shape deviation: directional radii of B(t)/t against the estimated inverse
// time constant over a fan of L1-unit directions.

struct FanDirection {
  std::vector<int> primitive;  // integer direction
  std::vector<double> unit;    // primitive / ||primitive||_1
  double mu_hat = 1.0;         // estimated mu on the unit direction
};

// F evenly spread L1-unit rational directions in the closed positive cone of
// the first two axes, always including e1 and the diagonal.
inline std::vector<FanDirection> make_fan(int d, int count) {
  if (count < 2) throw std::invalid_argument("make_fan: need at least 2 directions");
  std::vector<FanDirection> fan;
  auto push = [&](int p, int q) {
    if (p == 0 && q == 0) return;
    int g = std::gcd(p, q);
    p /= g;
    q /= g;
    FanDirection dir;
    dir.primitive.assign(d, 0);
    dir.primitive[0] = p;
    dir.primitive[1] = q;
    dir.unit.assign(d, 0.0);
    double s = p + q;
    dir.unit[0] = p / s;
    dir.unit[1] = q / s;
    for (const auto& f : fan)
      if (f.primitive == dir.primitive) return;
    fan.push_back(dir);
  };
  push(1, 0);      // e1, always present
  push(1, 1);      // the diagonal, always present
  // interpolate between (1,0,...) and (0,1,...) in L1-normalized steps
  for (int j = 0; j < count; ++j) push(count - 1 - j, j);
  return fan;
}

// Largest k with round(k xi) in B(t), scaled by 1/t.
inline double directional_radius(const PassageField& pf, const std::vector<double>& unit,
                                 double t) {
  const int d = pf.window.dim();
  int kmax = pf.window.radius();
  for (int k = kmax; k >= 1; --k) {
    Site s(std::vector<int>(d, 0));
    for (int a = 0; a < d; ++a) s.coords[a] = static_cast<int>(std::llround(k * unit[a]));
    if (!pf.window.contains(s)) continue;
    if (pf.at(s) <= t) return static_cast<double>(k) / t;
  }
  return 0.0;
}

struct ShapeDeviation {
  double t = 0.0;
  double outer_excess = 0.0;   // sup over directions of (r_t mu_hat - 1)_+
  double inner_deficit = 0.0;  // sup over directions of (1 - r_t mu_hat)_+
  double outer_envelope = 0.0;  // t^{-1/2} (log t)^{1/2}, reference only
  double inner_envelope = 0.0;  // t^{-1/2} (log t)^4, reference only
  std::size_t uncertified = 0;
};

template <class FieldMaker>
std::vector<ShapeDeviation> shape_deviation_with(const FieldMaker& make_field,
                                                 const std::vector<FanDirection>& fan,
                                                 const std::vector<double>& t_grid, int fields,
                                                 const McCommon& mc) {
  std::vector<ShapeDeviation> out;
  double mu_min = kInf;
  for (const auto& f : fan) mu_min = std::min(mu_min, f.mu_hat);
  const int d = static_cast<int>(fan.front().unit.size());

  for (double t : t_grid) {
    int radius = static_cast<int>(std::ceil(t / mu_min * 1.6)) + 2;
    ShapeDeviation dev;
    dev.t = t;
    dev.outer_envelope = std::pow(t, -0.5) * std::sqrt(std::log(t));
    dev.inner_envelope = std::pow(t, -0.5) * std::pow(std::log(t), 4.0);

    auto one = [&](std::size_t i) -> std::tuple<double, double, bool> {
      auto field = make_field(sample_seed(mc.master_seed, "shape", static_cast<std::uint64_t>(t) * 1000003ULL + i));
      PassageField pf = dijkstra(field, origin(d), Window(origin(d), radius));
      bool certified = pf.boundary_min > t;
      double excess = 0.0, deficit = 0.0;
      for (const auto& dir : fan) {
        double r = directional_radius(pf, dir.unit, t);
        excess = std::max(excess, r * dir.mu_hat - 1.0);
        deficit = std::max(deficit, 1.0 - r * dir.mu_hat);
      }
      return {excess, deficit, certified};
    };
    auto results = parallel_map<std::tuple<double, double, bool>>(fields, mc.workers, one);
    stats::MeanVar exc, def;
    for (const auto& [e, dfc, certified] : results) {
      if (!certified) {
        ++dev.uncertified;
        continue;
      }
      exc.add(std::max(e, 0.0));
      def.add(std::max(dfc, 0.0));
    }
    dev.outer_excess = exc.mean;
    dev.inner_deficit = def.mean;
    out.push_back(dev);
  }
  return out;
}

inline std::vector<ShapeDeviation> shape_deviation(const Distribution& dist,
                                                   const std::vector<FanDirection>& fan,
                                                   const std::vector<double>& t_grid, int fields,
                                                   const McCommon& mc) {
  auto maker = [&dist](std::uint64_t seed) { return WeightField(dist, seed); };
  return shape_deviation_with(maker, fan, t_grid, fields, mc);
}

// ---------------------------------------------------------------------------
// Kesten event decay: A_m = { exists SAW of exactly m edges from 0 with
// passage time < a m }, probability estimated per m and fitted log-linearly.

struct KestenDecayFit {
  std::vector<long long> m_grid;
  std::vector<double> prob;
  std::vector<stats::Interval> prob_ci;
  bool fit_defined = false;
  stats::LinearFit log_prob_vs_m;
  double geodesic_fraction_below = 0.0;  // fraction of samples with a #pi > tau(pi)
};

inline KestenDecayFit kesten_decay_fit(const Distribution& dist, int d, double a,
                                       const std::vector<long long>& m_grid, int samples,
                                       const McCommon& mc) {
  if (a <= 0) throw std::invalid_argument("kesten_decay_fit: a > 0 required");
  KestenDecayFit out;
  out.m_grid = m_grid;
  std::vector<double> fx, fy, fw;
  for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
    int m = static_cast<int>(m_grid[gi]);
    Window win(origin(d), m);
    auto one = [&](std::size_t i) -> int {
      WeightField field(dist, sample_seed(mc.master_seed, "kesten", gi * 1000003ULL + i));
      SawResult r = min_saw_time(field, origin(d), m, win);
      return r.min_time < a * m ? 1 : 0;
    };
    auto hits_vec = parallel_map<int>(samples, mc.workers, one);
    std::uint64_t hits = 0;
    for (int h : hits_vec) hits += h;
    double p = static_cast<double>(hits) / samples;
    out.prob.push_back(p);
    out.prob_ci.push_back(stats::binomial_ci(hits, samples));
    if (hits > 0) {
      fx.push_back(static_cast<double>(m));
      fy.push_back(std::log(p));
      double var_logp = (1.0 - p) / (p * static_cast<double>(samples));
      fw.push_back(var_logp > 0 ? 1.0 / var_logp : 1.0);
    }
  }
  if (fx.size() >= 4) {
    // binomial sampling variances of log p are known exactly; the integer
    // thresholds a*m make small-m points systematically off-trend, so the
    // residual-scaled interval would answer linearity, not monotone decay
    out.log_prob_vs_m = stats::weighted_least_squares(fx, fy, fw, /*known_variance=*/true);
    out.fit_defined = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box concentration: descriptive tails of tau_m = tau(D_m(0), D_m(m xi)) at
// the scale sqrt(m) (log m)^4.

struct BoxConcentrationPoint {
  long long m = 0;
  double mean = 0.0;
  double tail_prob = 0.0;  // P(|tau_m - mean| >= sqrt(m) (log m)^4)
  stats::Interval tail_ci;
  std::size_t uncertified = 0;
};

inline std::vector<BoxConcentrationPoint> box_concentration_fit(
    const Distribution& dist, int d, const std::vector<long long>& m_grid, double c7, int samples,
    const McCommon& mc) {
  std::vector<BoxConcentrationPoint> out;
  for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
    int m = static_cast<int>(m_grid[gi]);
    MacroBox b0 = macro_box(origin(d), m, c7);
    Site far(std::vector<int>(d, 0));
    far.coords[0] = m;
    MacroBox b1 = macro_box(far, m, c7);
    Site center(std::vector<int>(d, 0));
    center.coords[0] = m / 2;
    int radius = m / 2 + b0.radius + std::max(8, m / 2);
    Window win(center, radius);

    auto one = [&](std::size_t i) {
      WeightField field(dist, sample_seed(mc.master_seed, "box", gi * 1000003ULL + i));
      return box_to_box_time(field, b0.sites(), b1.sites(), win);
    };
    auto taus = parallel_map<double>(samples, mc.workers, one);
    stats::MeanVar mv;
    for (double t : taus) mv.add(t);
    BoxConcentrationPoint pt;
    pt.m = m;
    pt.mean = mv.mean;
    double scale = std::sqrt(static_cast<double>(m)) * std::pow(std::log(static_cast<double>(m)), 4.0);
    std::uint64_t hits = 0;
    for (double t : taus)
      if (std::abs(t - mv.mean) >= scale) ++hits;
    pt.tail_prob = static_cast<double>(hits) / samples;
    pt.tail_ci = stats::binomial_ci(hits, samples);
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norm equivalence: C9 with C9^{-1} ||v||_1 <= mu(v) <= C9 ||v||_1, read off
// the fan estimates.

struct NormEquivalenceReport {
  double c9 = 1.0;
  bool any_degenerate = false;  // a direction whose mu CI includes 0
};

inline NormEquivalenceReport norm_equivalence_report(const std::vector<FanDirection>& fan,
                                                     const std::vector<double>& mu_ci_low) {
  if (fan.size() < 8)
    throw std::invalid_argument("norm_equivalence_report: need at least 8 directions");
  NormEquivalenceReport rep;
  for (std::size_t i = 0; i < fan.size(); ++i) {
    rep.c9 = std::max(rep.c9, fan[i].mu_hat);
    if (fan[i].mu_hat > 0) rep.c9 = std::max(rep.c9, 1.0 / fan[i].mu_hat);
    if (mu_ci_low[i] <= 0) rep.any_degenerate = true;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Z-moment analytics for the inner shape bound hypothesis.

struct ZMomentReport {
  int d = 2;
  double z_moment_order = std::numeric_limits<double>::infinity();  // sup finite moment of Z
  bool inner_hypothesis = true;   // E t_e^alpha < inf for some alpha > 1 + 1/d
  bool z_condition = true;        // E Z^{2d+2+delta} < inf for some delta > 0
  double delta_max = std::numeric_limits<double>::infinity();
};

inline ZMomentReport z_moment_report(const Distribution& dist, int d) {
  ZMomentReport rep;
  rep.d = d;
  double te = dist.tail_exponent();
  if (std::isinf(te)) return rep;  // light tail: everything holds
  rep.z_moment_order = 2.0 * d * te;
  rep.inner_hypothesis = te > 1.0 + 1.0 / d;
  rep.delta_max = rep.z_moment_order - (2.0 * d + 2.0);
  rep.z_condition = rep.delta_max > 0;
  if (!rep.z_condition) rep.delta_max = 0.0;
  return rep;
}

}  // namespace fpp
