#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/rng.hpp"

// Edge-weight laws with analytic tail/moment metadata, assumption checks,
// and the deterministic seeded weight field over the infinite lattice.

namespace fpp {

enum class DistKind { Constant, AtomMixture, FiniteDiscrete, Uniform, Exponential, Pareto };

struct Distribution {
  DistKind kind = DistKind::Constant;
  // Constant: a. AtomMixture: 0 w.p. p0, a w.p. 1-p0. Uniform: [lo, hi].
  // Exponential: rate. Pareto: survival (x/scale)^(-alpha) for x >= scale.
  double a = 1.0;
  double p0 = 0.0;
  double lo = 0.0, hi = 1.0;
  double rate = 1.0;
  double alpha = 2.0, scale = 1.0;
  std::vector<double> values;  // FiniteDiscrete support (sorted, nonnegative)
  std::vector<double> probs;

  static Distribution constant(double c) {
    Distribution d;
    d.kind = DistKind::Constant;
    d.a = c;
    return d;
  }
  static Distribution atom_mixture(double p0, double a) {
    Distribution d;
    d.kind = DistKind::AtomMixture;
    d.p0 = p0;
    d.a = a;
    return d;
  }
  static Distribution finite_discrete(std::vector<double> values, std::vector<double> probs) {
    Distribution d;
    d.kind = DistKind::FiniteDiscrete;
    d.values = std::move(values);
    d.probs = std::move(probs);
    for (std::size_t i = 0; i < d.values.size(); ++i)
      if (d.values[i] == 0.0) d.p0 += d.probs[i];
    return d;
  }
  static Distribution uniform(double lo, double hi) {
    Distribution d;
    d.kind = DistKind::Uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
  }
  static Distribution exponential(double rate) {
    Distribution d;
    d.kind = DistKind::Exponential;
    d.rate = rate;
    return d;
  }
  static Distribution pareto(double alpha, double scale = 1.0) {
    Distribution d;
    d.kind = DistKind::Pareto;
    d.alpha = alpha;
    d.scale = scale;
    return d;
  }

  // Inverse CDF; the single sampling route used everywhere.
  double quantile(double u) const {
    switch (kind) {
      case DistKind::Constant:
        return a;
      case DistKind::AtomMixture:
        return u < p0 ? 0.0 : a;
      case DistKind::FiniteDiscrete: {
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          acc += probs[i];
          if (u < acc) return values[i];
        }
        return values.back();
      }
      case DistKind::Uniform:
        return lo + u * (hi - lo);
      case DistKind::Exponential:
        return -std::log1p(-u) / rate;
      case DistKind::Pareto:
        return scale * std::pow(1.0 - u, -1.0 / alpha);
    }
    return 0.0;
  }

  // P(t_e >= x).
  double survival(double x) const {
    if (x <= 0.0) return 1.0;
    switch (kind) {
      case DistKind::Constant:
        return x <= a ? 1.0 : 0.0;
      case DistKind::AtomMixture:
        return x <= a ? 1.0 - p0 : 0.0;
      case DistKind::FiniteDiscrete: {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
          if (values[i] >= x) s += probs[i];
        return s;
      }
      case DistKind::Uniform:
        if (x <= lo) return 1.0;
        if (x >= hi) return 0.0;
        return (hi - x) / (hi - lo);
      case DistKind::Exponential:
        return std::exp(-rate * x);
      case DistKind::Pareto:
        return x <= scale ? 1.0 : std::pow(x / scale, -alpha);
    }
    return 0.0;
  }

  double cdf(double x) const {
    // P(t_e <= x); differs from 1-survival only at atoms.
    switch (kind) {
      case DistKind::Constant:
        return x >= a ? 1.0 : 0.0;
      case DistKind::AtomMixture:
        if (x < 0) return 0.0;
        return x >= a ? 1.0 : p0;
      case DistKind::FiniteDiscrete: {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
          if (values[i] <= x) s += probs[i];
        return s;
      }
      default:
        return 1.0 - survival(x);
    }
  }

  double mass_at_zero() const { return p0; }

  // Tail exponent: weights heavier than any polynomial decay never appear in
  // the catalog, so this is alpha for pareto and +infinity otherwise.
  double tail_exponent() const {
    return kind == DistKind::Pareto ? alpha : std::numeric_limits<double>::infinity();
  }

  double max_support() const {
    switch (kind) {
      case DistKind::Constant:
        return a;
      case DistKind::AtomMixture:
        return a;
      case DistKind::FiniteDiscrete:
        return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
      case DistKind::Uniform:
        return hi;
      default:
        return std::numeric_limits<double>::infinity();
    }
  }

  bool integer_valued() const {
    switch (kind) {
      case DistKind::Constant:
        return a == std::floor(a);
      case DistKind::AtomMixture:
        return a == std::floor(a);
      case DistKind::FiniteDiscrete:
        for (double v : values)
          if (v != std::floor(v)) return false;
        return true;
      default:
        return false;
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case DistKind::Constant:
        os << "constant(" << a << ")";
        break;
      case DistKind::AtomMixture:
        os << "atom-mixture(p0=" << p0 << ",a=" << a << ")";
        break;
      case DistKind::FiniteDiscrete: {
        os << "finite-discrete(";
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (i) os << ";";
          os << values[i] << ":" << probs[i];
        }
        os << ")";
        break;
      }
      case DistKind::Uniform:
        os << "uniform(" << lo << "," << hi << ")";
        break;
      case DistKind::Exponential:
        os << "exponential(" << rate << ")";
        break;
      case DistKind::Pareto:
        os << "pareto(alpha=" << alpha << ",scale=" << scale << ")";
        break;
    }
    return os.str();
  }
};

inline double sample(const Distribution& dist, rng::Stream& stream) {
  return dist.quantile(stream.next_unit());
}

// P(min of k copies >= lambda) = survival(lambda)^k.
inline double min_of_copies_survival(const Distribution& dist, int k, double lambda) {
  if (k < 1) throw std::invalid_argument("min_of_copies_survival: k >= 1 required");
  if (lambda < 0) throw std::invalid_argument("min_of_copies_survival: lambda >= 0 required");
  return std::pow(dist.survival(lambda), k);
}

// E[(min of k copies)^beta] < infinity?  The minimum has tail exponent
// k * alpha for pareto-type laws; every other catalog kind is bounded or
// light-tailed and has all moments.
inline bool moment_finite(const Distribution& dist, int k, double beta) {
  if (beta <= 0) throw std::invalid_argument("moment_finite: beta > 0 required");
  double te = dist.tail_exponent();
  if (std::isinf(te)) return true;
  return beta < static_cast<double>(k) * te;
}

// Bond-percolation thresholds. d=2 is the exact classical value; higher d
// are numerical literature estimates.
struct PcValue {
  double value;
  std::string provenance;
};

inline PcValue pc_value(int d, std::optional<double> override_value = std::nullopt) {
  if (override_value) return {*override_value, "user"};
  switch (d) {
    case 2:
      return {0.5, "exact"};
    case 3:
      return {0.2488126, "numerical estimate"};
    case 4:
      return {0.1601314, "numerical estimate"};
    case 5:
      return {0.1181718, "numerical estimate"};
    case 6:
      return {0.0942019, "numerical estimate"};
    default:
      throw std::out_of_range("pc_value: no tabulated threshold for d=" + std::to_string(d) +
                              " (provide an override)");
  }
}

struct MomentReport {
  int d = 2;
  bool a1_holds = false;  // E Y^2 < inf, Y = min of d copies
  bool a2_holds = false;  // P(t_e = 0) < p_c(d)
  double tail_exponent = std::numeric_limits<double>::infinity();
  double y_moment_order = std::numeric_limits<double>::infinity();  // sup finite moment of Y
  double z_moment_order = std::numeric_limits<double>::infinity();  // sup finite moment of Z (min of 2d)
  double pc = 0.5;
  std::string pc_provenance;
};

inline MomentReport validate_assumptions(const Distribution& dist, int d,
                                         std::optional<double> pc_override = std::nullopt) {
  if (d < 2) throw std::invalid_argument("validate_assumptions: d >= 2 required");
  MomentReport r;
  r.d = d;
  r.tail_exponent = dist.tail_exponent();
  r.y_moment_order = std::isinf(r.tail_exponent) ? r.tail_exponent : d * r.tail_exponent;
  r.z_moment_order = std::isinf(r.tail_exponent) ? r.tail_exponent : 2 * d * r.tail_exponent;
  r.a1_holds = moment_finite(dist, d, 2.0);
  PcValue pc = pc_value(d, pc_override);
  r.pc = pc.value;
  r.pc_provenance = pc.provenance;
  r.a2_holds = dist.mass_at_zero() < pc.value;
  return r;
}

// Deterministic lazy weight field: the weight of a canonical edge is a pure
// function of (master seed, edge coordinates), so any window sees the same
// environment and windows can grow without re-sampling.
class WeightField {
 public:
  WeightField() = default;
  WeightField(Distribution dist, std::uint64_t master_seed)
      : dist_(std::move(dist)), seed_(master_seed) {}

  const Distribution& distribution() const { return dist_; }
  std::uint64_t seed() const { return seed_; }

  double operator()(const Edge& e) const {
    return dist_.quantile(rng::to_unit(rng::mix(seed_, e.hash())));
  }

 private:
  Distribution dist_;
  std::uint64_t seed_ = 0;
};

// Weight field with a finite set of edges replaced (used for resampling the
// local boxes S_i); the base field is untouched.
class OverlayField {
 public:
  OverlayField(const WeightField& base, std::map<Edge, double> replaced)
      : base_(&base), replaced_(std::move(replaced)) {}

  double operator()(const Edge& e) const {
    auto it = replaced_.find(e);
    return it != replaced_.end() ? it->second : (*base_)(e);
  }

  const std::map<Edge, double>& replaced() const { return replaced_; }

 private:
  const WeightField* base_;
  std::map<Edge, double> replaced_;
};

// Fresh i.i.d. draws on the edges of a local box, everything else untouched.
inline OverlayField resample_region(const WeightField& field, const LocalBox& box,
                                    rng::Stream& stream) {
  std::map<Edge, double> repl;
  for (const Edge& e : box.edges) repl[e] = sample(field.distribution(), stream);
  return OverlayField(field, std::move(repl));
}

}  // namespace fpp
