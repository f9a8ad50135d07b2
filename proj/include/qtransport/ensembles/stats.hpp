#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qtransport::ensembles {

/// Monte Carlo estimate.
struct SampleStats {
  double mean = 0;
  double standard_error = 0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string estimator_name;
};

inline void to_json(nlohmann::json& j, const SampleStats& s) {
  j = {{"mean", s.mean}, {"se", s.standard_error}, {"n", s.n_samples}, {"seed", s.seed}, {"estimator", s.estimator_name}};
}

/// Running central moments up to the fourth, mergeable (Pebay 2008).
class Moments {
 public:
  void add(double x) {
    Moments one;
    one.n_ = 1;
    one.mean_ = x;
    merge(one);
  }

  void merge(const Moments& b) {
    if (b.n_ == 0) return;
    if (n_ == 0) {
      *this = b;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(b.n_), n = na + nb;
    const double d = b.mean_ - mean_, d2 = d * d;
    const double m4 = m4_ + b.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6 * d2 * (na * na * b.m2_ + nb * nb * m2_) / (n * n) + 4 * d * (na * b.m3_ - nb * m3_) / n;
    const double m3 = m3_ + b.m3_ + d2 * d * na * nb * (na - nb) / (n * n) + 3 * d * (na * b.m2_ - nb * m2_) / n;
    m2_ += b.m2_ + d2 * na * nb / n;
    mean_ += d * nb / n;
    m3_ = m3;
    m4_ = m4;
    n_ += b.n_;
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const { return std::sqrt(variance() / static_cast<double>(n_)); }
  /// Standard error of variance() from the fourth central moment.
  double variance_standard_error() const {
    const double n = static_cast<double>(n_);
    const double mu4 = m4_ / n, s2 = m2_ / n;
    return std::sqrt(std::max(0.0, (mu4 - s2 * s2 * (n - 3) / (n - 1)) / n));
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0, m2_ = 0, m3_ = 0, m4_ = 0;
};

inline SampleStats mean_stats(const Moments& m, std::uint64_t seed, std::string name) {
  if (m.count() < 2) throw std::invalid_argument("SampleStats: at least two samples are required");
  return {m.mean(), m.standard_error(), m.count(), seed, std::move(name)};
}

inline SampleStats variance_stats(const Moments& m, std::uint64_t seed, std::string name) {
  if (m.count() < 2) throw std::invalid_argument("SampleStats: at least two samples are required");
  return {m.variance(), m.variance_standard_error(), m.count(), seed, std::move(name)};
}

/// One-sample Kolmogorov-Smirnov test against the uniform law on [0, 1].
struct KsResult {
  double statistic = 0;
  /// Asymptotic critical value at the 1% level.
  double critical_1pct = 0;
  bool passes = false;
};

inline KsResult ks_uniform(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("ks_uniform: no data");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std::clamp(x[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.critical_1pct = 1.6276 / std::sqrt(n);
  r.passes = d < r.critical_1pct;
  return r;
}

}  // namespace qtransport::ensembles
