#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/config.hpp"
#include "fpp/entropy.hpp"
#include "fpp/estimators.hpp"
#include "fpp/record.hpp"

// Named experiments over the library, producing ExperimentRecords. Exit
// codes: 0 success, 2 assumption-validation failure, 3 certification budget
// exhausted.

namespace fpp {

struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct RecordSink {
  const ExperimentConfig* cfg;
  std::string hash;
  std::string stamp = iso_timestamp();
  std::vector<ExperimentRecord> records;

  ExperimentRecord& add(const std::string& grid_key, double grid_value, const std::string& stat,
                        double value, stats::Interval ci = {}, bool certified = true) {
    ExperimentRecord r;
    r.experiment = cfg->name;
    r.config_hash = hash;
    r.d = cfg->d;
    r.dist = cfg->dist.to_string();
    r.seed = cfg->seed;
    r.grid_key = grid_key;
    r.grid_value = grid_value;
    r.stat = stat;
    r.value = value;
    r.ci = ci;
    r.certified = certified;
    r.timestamp = stamp;
    records.push_back(std::move(r));
    return records.back();
  }
};

inline Site direction_site(const ExperimentConfig& cfg) { return Site(cfg.direction); }

inline McCommon mc_of(const ExperimentConfig& cfg) {
  McCommon mc;
  mc.master_seed = cfg.seed;
  mc.workers = worker_count_from_env(cfg.workers);
  mc.passage.radius_cap = cfg.window_cap;
  return mc;
}

inline std::vector<double> default_t_grid() {
  return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
}

// ---- individual experiments ----

inline void run_tau_sample(const ExperimentConfig& cfg, RecordSink& sink) {
  McCommon mc = mc_of(cfg);
  Site x = direction_site(cfg);
  auto one = [&](std::size_t i) {
    WeightField field(cfg.dist, sample_seed(cfg.seed, "tau-sample", i));
    ExactPassageResult r = exact_passage_time(field, origin(cfg.d), x, mc.passage);
    return std::make_pair(r.time, r.certified);
  };
  auto results = parallel_map<std::pair<double, bool>>(cfg.samples, mc.workers, one);
  std::size_t uncert = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    sink.add("i", static_cast<double>(i), "tau", results[i].first, {}, results[i].second);
    if (!results[i].second) ++uncert;
  }
  if (uncert > 0) throw CertificationError("tau-sample: uncertified passage times");
}

inline void run_mu(const ExperimentConfig& cfg, RecordSink& sink, TimeConstantEstimate* out = nullptr) {
  if (cfg.n_grid.empty()) throw std::invalid_argument("mu: grids.n is required");
  McCommon mc = mc_of(cfg);
  TimeConstantEstimate est = estimate_mu(cfg.dist, direction_site(cfg), cfg.n_grid, cfg.samples, mc);
  for (std::size_t i = 0; i < est.n_grid.size(); ++i) {
    double se = est.stderr_per_n[i];
    sink.add("n", static_cast<double>(est.n_grid[i]), "mean_tau_over_n", est.mean_per_n[i],
             {est.mean_per_n[i] - stats::kZ95 * se, est.mean_per_n[i] + stats::kZ95 * se},
             est.uncertified == 0);
  }
  sink.add("n", static_cast<double>(est.n_grid.back()), "mu_upper", est.mu_upper, {},
           est.uncertified == 0);
  sink.add("n", static_cast<double>(est.n_grid.back()), "mu_point", est.mu_point, {},
           est.uncertified == 0);
  if (out) *out = est;
  if (est.uncertified > 0) throw CertificationError("mu: uncertified passage times");
}

inline void run_fluctuation(const ExperimentConfig& cfg, RecordSink& sink) {
  TimeConstantEstimate est;
  run_mu(cfg, sink, &est);
  ExponentFit fit = nonrandom_fluctuation_fit(est, est.mu_upper);
  for (std::size_t i = 0; i < fit.log_n.size(); ++i)
    sink.add("n", std::exp(fit.log_n[i]), "log_gap", fit.log_gap[i]);
  if (fit.degenerate) {
    auto& r = sink.add("n", 0.0, "fluctuation_exponent", 0.0);
    r.aux["degenerate"] = true;
    r.aux["note"] = fit.note;
  } else {
    auto& r = sink.add("n", 0.0, "fluctuation_exponent", fit.fit.slope, fit.fit.slope_ci);
    r.aux["r2"] = fit.fit.r2;
    r.aux["sublinear_95"] = fit.fit.slope_ci.hi < 1.0;
    r.aux["lower_bound_holds"] = fit.lower_bound_holds;
  }
}

inline void run_lower_tail(const ExperimentConfig& cfg, RecordSink& sink) {
  McCommon mc = mc_of(cfg);
  std::vector<double> grid = cfg.t_grid.empty() ? default_t_grid() : cfg.t_grid;
  TailFit fit = lower_tail_fit(cfg.dist, direction_site(cfg), cfg.samples, grid, mc);
  for (std::size_t i = 0; i < grid.size(); ++i)
    sink.add("t", grid[i], "tail_prob", fit.tail_prob[i], fit.tail_ci[i]);
  if (fit.fit_defined) {
    auto& r = sink.add("t", 0.0, "gaussian_rate", fit.c_hat,
                       {-fit.log_tail_vs_t2.slope_ci.hi, -fit.log_tail_vs_t2.slope_ci.lo});
    r.aux["r2"] = fit.log_tail_vs_t2.r2;
    r.aux["slope_negative_95"] = fit.log_tail_vs_t2.slope_ci.hi < 0.0;
  } else if (fit.all_zero) {
    auto& r = sink.add("t", 0.0, "gaussian_rate", 0.0);
    r.aux["all_zero_tail"] = true;
  }
}

inline void run_shape(const ExperimentConfig& cfg, RecordSink& sink) {
  McCommon mc = mc_of(cfg);
  std::vector<double> grid = cfg.t_grid.empty() ? std::vector<double>{10, 20, 40} : cfg.t_grid;
  std::vector<FanDirection> fan = make_fan(cfg.d, cfg.fan);
  // per-direction time constants on a short n grid
  for (auto& dir : fan) {
    if (cfg.dist.kind == DistKind::Constant) {
      dir.mu_hat = cfg.dist.a;  // mu is exactly c on L1-unit directions
      continue;
    }
    Site prim(dir.primitive);
    std::vector<long long> ngrid = {4, 8, 16};
    TimeConstantEstimate est = estimate_mu(cfg.dist, prim, ngrid, std::max(cfg.samples / 10, 50), mc);
    dir.mu_hat = est.mu_upper / static_cast<double>(prim.l1_norm());
  }
  for (const auto& dir : fan) {
    double angle = std::atan2(dir.unit[1], dir.unit[0]);
    auto& r = sink.add("direction", angle, "mu_hat", dir.mu_hat);
    r.aux["angle"] = angle;
  }
  auto devs = shape_deviation(cfg.dist, fan, grid, cfg.samples, mc);
  for (const auto& dev : devs) {
    auto& r1 = sink.add("t", dev.t, "outer_excess", dev.outer_excess, {}, dev.uncertified == 0);
    r1.aux["envelope"] = dev.outer_envelope;
    auto& r2 = sink.add("t", dev.t, "inner_deficit", dev.inner_deficit, {}, dev.uncertified == 0);
    r2.aux["envelope"] = dev.inner_envelope;
  }
}

inline ExactSystem entropy_system_of(const ExperimentConfig& cfg) {
  std::vector<double> values = {1.0, 2.0};
  std::vector<double> probs = {0.5, 0.5};
  if (cfg.dist.kind == DistKind::FiniteDiscrete) {
    values = cfg.dist.values;
    probs = cfg.dist.probs;
  }
  ExactSystem sys = make_box_system({2, 2}, values, probs);  // the 12-edge 3x3 system
  sys.lambda_grid = cfg.lambda_grid;
  return sys;
}

inline void run_entropy_exact(const ExperimentConfig& cfg, RecordSink& sink) {
  ExactSystem sys = entropy_system_of(cfg);
  ConfigTable table = enumerate(sys);
  auto boxes = covering_boxes(sys);
  rng::Stream wstream(rng::mix(cfg.seed, rng::hash_string("variational-w")));
  for (double lambda : sys.lambda_grid) {
    TensorizationReport tens = tensorization_check(table, lambda);
    auto& r1 = sink.add("lambda", lambda, "entropy", tens.ent);
    r1.aux["edge_sum"] = tens.edge_sum;
    r1.aux["box_sum"] = tens.box_sum;
    r1.aux["pass"] = tens.chain_holds();

    double worst_margin = kInf;
    std::size_t skipped = 0;
    for (const auto& box : boxes) {
      std::size_t box_configs = 1;
      for (std::size_t e : box) box_configs *= sys.support[e].size();
      if (table.rows.size() * box_configs > sys.config_cap) {
        ++skipped;  // doubled space over the cap; the cap is the error contract
        continue;
      }
      ResamplingReport rr = blm_resampling_check(table, lambda, box);
      worst_margin = std::min(worst_margin, rr.min_margin);
    }
    auto& r2 = sink.add("lambda", lambda, "resampling_margin", worst_margin);
    r2.aux["pass"] = worst_margin >= -1e-9;
    r2.aux["boxes_skipped_over_cap"] = skipped;

    AssociationReport assoc = association_check(table, lambda);
    auto& r3 = sink.add("lambda", lambda, "association_gap", assoc.rhs - assoc.lhs);
    r3.aux["pass"] = assoc.holds();

    if (lambda < 0) {
      PivotalEntropyReport piv = pivotal_entropy_check(table, lambda);
      auto& r4 = sink.add("lambda", lambda, "pivotal_ratio", piv.ratio);
      r4.aux["defined"] = piv.ratio_defined;
    }

    std::vector<double> x = exp_lambda_t(table, lambda);
    int passes = 0;
    const int trials = 50;
    for (int k = 0; k < trials; ++k) {
      std::vector<double> w(table.rows.size());
      for (auto& wi : w) wi = 2.0 * wstream.next_unit() - 1.0;
      if (variational_check(table, x, w).holds()) ++passes;
    }
    auto& r5 = sink.add("lambda", lambda, "variational_passes", passes);
    r5.aux["trials"] = trials;
    r5.aux["pass"] = passes == trials;
  }
}

inline void run_pivotal_stats(const ExperimentConfig& cfg, RecordSink& sink) {
  McCommon mc = mc_of(cfg);
  Site x = direction_site(cfg);
  bool has_zero_atom = cfg.dist.mass_at_zero() > 0;
  auto one = [&](std::size_t i) -> std::tuple<double, long long, bool> {
    WeightField field(cfg.dist, sample_seed(cfg.seed, "pivotal-stats", i));
    ExactPassageResult r = exact_passage_time(field, origin(cfg.d), x, mc.passage);
    double eps = geodesic_tolerance(r.time, cfg.dist.integer_valued());
    long long piv;
    if (has_zero_atom) {
      piv = static_cast<long long>(
          pivotal_edges_by_deletion(field, origin(cfg.d), x, r.window, r.time, eps).size());
    } else {
      GeodesicDag dag = geodesic_dag(field, r.forward, r.backward, r.time, eps);
      piv = dag.tie_collapse
                ? static_cast<long long>(pivotal_edges_by_deletion(field, origin(cfg.d), x,
                                                                   r.window, r.time, eps).size())
                : static_cast<long long>(dag.pivotal.size());
    }
    return {r.time, piv, r.certified};
  };
  auto results = parallel_map<std::tuple<double, long long, bool>>(cfg.samples, mc.workers, one);
  std::vector<std::pair<double, long long>> samples;
  std::size_t uncert = 0;
  for (const auto& [t, piv, certified] : results) {
    samples.push_back({t, piv});
    if (!certified) ++uncert;
  }
  double c = 1.0 / cfg.threshold_a;
  PhiMomentReport rep = phi_moment_estimate(samples, c, cfg.alpha_phi);
  auto& r = sink.add("i", 0.0, "phi_exp_moment", rep.exp_moment, rep.exp_moment_ci, uncert == 0);
  r.aux["c"] = c;
  r.aux["alpha"] = cfg.alpha_phi;
  for (const auto& [n, p] : rep.tail) sink.add("n", static_cast<double>(n), "phi_tail", p);
  if (uncert > 0) throw CertificationError("pivotal-stats: uncertified passage times");
}

inline void run_kesten(const ExperimentConfig& cfg, RecordSink& sink) {
  if (cfg.m_grid.empty()) throw std::invalid_argument("kesten: grids.m is required");
  McCommon mc = mc_of(cfg);
  KestenDecayFit fit = kesten_decay_fit(cfg.dist, cfg.d, cfg.threshold_a, cfg.m_grid, cfg.samples, mc);
  for (std::size_t i = 0; i < fit.m_grid.size(); ++i)
    sink.add("m", static_cast<double>(fit.m_grid[i]), "event_prob", fit.prob[i], fit.prob_ci[i]);
  if (fit.fit_defined) {
    auto& r = sink.add("m", 0.0, "decay_slope", fit.log_prob_vs_m.slope,
                       fit.log_prob_vs_m.slope_ci);
    r.aux["r2"] = fit.log_prob_vs_m.r2;
    r.aux["slope_negative_95"] = fit.log_prob_vs_m.slope_ci.hi < 0.0;
  }
}

inline void run_box_sandwich(const ExperimentConfig& cfg, RecordSink& sink) {
  if (cfg.m_grid.empty()) throw std::invalid_argument("box-sandwich: grids.m is required");
  McCommon mc = mc_of(cfg);
  for (std::size_t gi = 0; gi < cfg.m_grid.size(); ++gi) {
    int m = static_cast<int>(cfg.m_grid[gi]);
    MacroBox b0 = macro_box(origin(cfg.d), m, cfg.c7);
    Site v(std::vector<int>(cfg.d, 0));
    v.coords[0] = m;
    MacroBox b1 = macro_box(v, m, cfg.c7);
    Site center(std::vector<int>(cfg.d, 0));
    center.coords[0] = m / 2;
    Window win(center, m / 2 + b0.radius + std::max(8, m));

    auto one = [&](std::size_t i) -> std::pair<int, bool> {
      WeightField field(cfg.dist, sample_seed(cfg.seed, "box-sandwich", gi * 1000003ULL + i));
      double tau_m = box_to_box_time(field, b0.sites(), b1.sites(), win);
      PassageField pf = dijkstra(field, origin(cfg.d), win);
      double tau = pf.at(v);
      BoxDiameterResult j0 = box_diameter_time(field, b0, win);
      BoxDiameterResult j1 = box_diameter_time(field, b1, win);
      bool holds = tau_m <= tau + 1e-9 && tau <= tau_m + j0.value + j1.value + 1e-9;
      return {holds ? 1 : 0, j0.certified && j1.certified};
    };
    auto results = parallel_map<std::pair<int, bool>>(cfg.samples, mc.workers, one);
    std::uint64_t holds = 0, certified = 0;
    for (const auto& [h, c] : results) {
      holds += h;
      certified += c ? 1 : 0;
    }
    sink.add("m", static_cast<double>(m), "sandwich_holds_fraction",
             static_cast<double>(holds) / cfg.samples, {}, certified == results.size());
  }
}

inline void run_z_moments(const ExperimentConfig& cfg, RecordSink& sink) {
  ZMomentReport rep = z_moment_report(cfg.dist, cfg.d);
  MomentReport mom = validate_assumptions(cfg.dist, cfg.d);
  auto& r = sink.add("d", static_cast<double>(cfg.d), "z_moment_order", rep.z_moment_order);
  r.aux["inner_hypothesis"] = rep.inner_hypothesis;
  r.aux["z_condition"] = rep.z_condition;
  r.aux["delta_max"] = rep.delta_max;
  r.aux["a1_holds"] = mom.a1_holds;
  r.aux["a2_holds"] = mom.a2_holds;
}

}  // namespace detail

inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.force) {
    MomentReport mom = validate_assumptions(cfg.dist, cfg.d);
    if (!mom.a1_holds || !mom.a2_holds)
      throw AssumptionError(std::string("assumption validation failed: ") +
                            (!mom.a1_holds ? "(A1) " : "") + (!mom.a2_holds ? "(A2)" : "") +
                            " for " + cfg.dist.to_string() + " (use force = true to override)");
  }
  detail::RecordSink sink;
  sink.cfg = &cfg;
  sink.hash = config_hash(cfg);

  if (cfg.name == "tau-sample")
    detail::run_tau_sample(cfg, sink);
  else if (cfg.name == "mu")
    detail::run_mu(cfg, sink);
  else if (cfg.name == "fluctuation")
    detail::run_fluctuation(cfg, sink);
  else if (cfg.name == "lower-tail")
    detail::run_lower_tail(cfg, sink);
  else if (cfg.name == "shape")
    detail::run_shape(cfg, sink);
  else if (cfg.name == "entropy-exact")
    detail::run_entropy_exact(cfg, sink);
  else if (cfg.name == "pivotal-stats")
    detail::run_pivotal_stats(cfg, sink);
  else if (cfg.name == "kesten")
    detail::run_kesten(cfg, sink);
  else if (cfg.name == "box-sandwich")
    detail::run_box_sandwich(cfg, sink);
  else if (cfg.name == "z-moments")
    detail::run_z_moments(cfg, sink);
  else
    throw std::invalid_argument("unknown experiment '" + cfg.name + "'");
  return sink.records;
}

// CLI entry: returns the process exit code.
inline int run_to_file(const ExperimentConfig& cfg, std::string* error = nullptr) {
  try {
    std::vector<ExperimentRecord> records = run_experiment(cfg);
    write_jsonl_file(records, cfg.output);
    return 0;
  } catch (const AssumptionError& e) {
    if (error) *error = e.what();
    return 2;
  } catch (const CertificationError& e) {
    if (error) *error = e.what();
    return 3;
  }
}

}  // namespace fpp
