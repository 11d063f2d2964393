#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fpp/rng.hpp"

// Small statistics toolbox: running moments, binomial confidence intervals,
// inverse-variance weighted least squares on log scales, bootstrap.

namespace fpp::stats {

struct MeanVar {
  // Welford accumulation with compensated mean updates.
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

inline double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Two-sided critical values. t table for small samples, z otherwise.
inline double t_critical_95(int df) {
  static const double table[] = {0,     12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                 2.306, 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
                                 2.120, 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069,
                                 2.064, 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) throw std::invalid_argument("t_critical_95: df >= 1 required");
  if (df <= 30) return table[df];
  return 1.96;
}

constexpr double kZ95 = 1.959963984540054;
constexpr double kZ3Sigma = 3.0;

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
};

// Wilson score interval for a binomial proportion.
inline Interval binomial_ci(std::uint64_t successes, std::uint64_t trials, double z = kZ95) {
  if (trials == 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  double hi = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

// Weighted ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  Interval slope_ci;
  double r2 = 0.0;
  int points = 0;
};

// With known_variance the weights are taken as exact inverse variances
// (w = 1/sigma^2), so the slope error is 1/sqrt(Sxx) with a normal interval;
// otherwise the error is scaled by the residual variance with a t interval.
inline LinearFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                        const std::vector<double>& w,
                                        bool known_variance = false) {
  if (x.size() != y.size() || x.size() != w.size())
    throw std::invalid_argument("weighted_least_squares: size mismatch");
  if (x.size() < 4) throw std::invalid_argument("weighted_least_squares: need at least 4 points");
  const int n = static_cast<int>(x.size());
  double sw = 0, swx = 0, swy = 0;
  for (int i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  double xbar = swx / sw, ybar = swy / sw;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx <= 0) throw std::invalid_argument("weighted_least_squares: degenerate regressor");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < n; ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += w[i] * r * r;
    double dy = y[i] - ybar;
    ss_tot += w[i] * dy * dy;
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  int df = n - 2;
  double crit;
  if (known_variance) {
    fit.slope_stderr = std::sqrt(1.0 / sxx);
    crit = kZ95;
  } else {
    double sigma2 = df > 0 ? ss_res / static_cast<double>(df) : 0.0;
    fit.slope_stderr = std::sqrt(sigma2 / sxx);
    crit = t_critical_95(df);
  }
  fit.slope_ci = {fit.slope - crit * fit.slope_stderr, fit.slope + crit * fit.slope_stderr};
  return fit;
}

// Percentile bootstrap for a statistic of a univariate sample.
template <class Stat>
Interval bootstrap_ci(const std::vector<double>& sample, Stat&& stat, int replicates,
                      std::uint64_t seed) {
  std::vector<double> reps;
  reps.reserve(replicates);
  std::vector<double> resampled(sample.size());
  for (int r = 0; r < replicates; ++r) {
    rng::Stream stream(rng::mix(seed, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < sample.size(); ++i) {
      std::size_t j = static_cast<std::size_t>(stream.next_unit() * sample.size());
      if (j >= sample.size()) j = sample.size() - 1;
      resampled[i] = sample[j];
    }
    reps.push_back(stat(resampled));
  }
  std::sort(reps.begin(), reps.end());
  auto pick = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(q * (reps.size() - 1));
    return reps[idx];
  };
  return {pick(0.025), pick(0.975)};
}

}  // namespace fpp::stats
