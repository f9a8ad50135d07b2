#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qtransport/ensembles/random.hpp"
#include "qtransport/ensembles/stats.hpp"
#include "qtransport/errors.hpp"
#include "qtransport/symfun/partition.hpp"
#include "qtransport/symfun/schur.hpp"

namespace qtransport::ensembles {

using Eigen::MatrixXcd;
using Eigen::VectorXd;
using symfun::Partition;

/// M x M matrix of independent complex normals with E|z|^2 = 1.
inline MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, SampleStream& rng) {
  MatrixXcd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  return g;
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// R's diagonal moved into Q.
inline MatrixXcd haar_unitary(int m, SampleStream& rng) {
  if (m <= 0) throw ConfigError("m", "must be positive");
  const MatrixXcd g = complex_gaussian(m, m, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(m, m);
  const MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < m; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0 ? d / a : 1.0;
  }
  return q;
}

/// Scattering matrix with blocks S = [[r, t'], [t, r']], r of size n1 x n1.
struct ScatteringSample {
  MatrixXcd s;
  int n1 = 0;
  int n2 = 0;

  MatrixXcd t() const { return s.block(n1, 0, n2, n1); }
  double unitarity_defect() const {
    return (s.adjoint() * s - MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
  }
  /// Eigenvalues of t^dagger t, ascending.
  VectorXd transmission_eigenvalues() const {
    const MatrixXcd tt = t().adjoint() * t();
    return Eigen::SelfAdjointEigenSolver<MatrixXcd>(tt, Eigen::EigenvaluesOnly).eigenvalues();
  }
};

inline void check_channels(int n1, int n2) {
  if (n1 < 1) throw ConfigError("n1", "must be positive");
  if (n2 < 1) throw ConfigError("n2", "must be positive");
}

/// The sample with the given index of the stream identified by seed.
inline ScatteringSample cue_sample(int n1, int n2, std::uint64_t seed, std::uint64_t index) {
  check_channels(n1, n2);
  SampleStream rng(seed, index);
  return {haar_unitary(n1 + n2, rng), n1, n2};
}

inline std::vector<ScatteringSample> sample_cue(int n1, int n2, std::uint64_t seed, std::size_t count) {
  std::vector<ScatteringSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(cue_sample(n1, n2, seed, i));
  return out;
}

/// Q = tauD (Gamma_1)^{-1} with Gamma_1 = Y Y^dagger / M, Y an M x 2M
/// Gaussian matrix: Gamma = Gamma_1 / tauD is complex Wishart with 2M
/// degrees of freedom and covariance 1/(M tauD).
inline MatrixXcd q_sample(int m, double tau_d, std::uint64_t seed, std::uint64_t index) {
  if (m < 1) throw ConfigError("m", "must be positive");
  if (!(tau_d > 0)) throw ConfigError("tau-d", "must be positive");
  SampleStream rng(seed, index);
  const MatrixXcd y = complex_gaussian(m, 2 * m, rng);
  const MatrixXcd gamma1 = y * y.adjoint() / static_cast<double>(m);
  return gamma1.inverse() * tau_d;
}

inline std::vector<MatrixXcd> sample_Q(int m, double tau_d, std::uint64_t seed, std::size_t count) {
  std::vector<MatrixXcd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(q_sample(m, tau_d, seed, i));
  return out;
}

/// Eigenvalues of Q for one sample, computed from Gamma_1 for stability.
inline VectorXd q_eigenvalues(int m, double tau_d, std::uint64_t seed, std::uint64_t index) {
  SampleStream rng(seed, index);
  const MatrixXcd y = complex_gaussian(m, 2 * m, rng);
  const MatrixXcd gamma1 = y * y.adjoint() / static_cast<double>(m);
  VectorXd g = Eigen::SelfAdjointEigenSolver<MatrixXcd>(gamma1, Eigen::EigenvaluesOnly).eigenvalues();
  return g.cwiseInverse() * tau_d;
}

/// Named transport statistics.
enum class NamedStatistic { Conductance, ConductanceVariance, ShotNoise };

struct SchurBasis {
  Partition lambda;
};
struct PowerSumBasis {
  Partition mu;
};
using MomentBasis = std::variant<SchurBasis, PowerSumBasis, NamedStatistic>;

enum class Variant { Ideal, Barrier };

struct SamplingOptions {
  std::uint64_t seed = 0;
  std::size_t count = 100000;
  int threads = 1;
  /// When set, receives the per-sample values in sample order.
  std::vector<double>* raw = nullptr;
};

inline double linear_statistic(const MomentBasis& basis, const VectorXd& ev) {
  const std::vector<double> x(ev.data(), ev.data() + ev.size());
  if (const auto* s = std::get_if<SchurBasis>(&basis)) return symfun::schur_eval(s->lambda, x);
  if (const auto* p = std::get_if<PowerSumBasis>(&basis)) {
    double prod = 1;
    for (int k : p->mu.parts()) {
      double tr = 0;
      for (double v : x) tr += std::pow(v, k);
      prod *= tr;
    }
    return prod;
  }
  double tr = 0, tr2 = 0;
  for (double v : x) {
    tr += v;
    tr2 += v * v;
  }
  switch (std::get<NamedStatistic>(basis)) {
    case NamedStatistic::Conductance:
    case NamedStatistic::ConductanceVariance: return tr;
    case NamedStatistic::ShotNoise: return tr - tr2;
  }
  return 0;
}

inline std::string basis_name(const MomentBasis& basis) {
  if (const auto* s = std::get_if<SchurBasis>(&basis)) return "schur" + s->lambda.to_string();
  if (const auto* p = std::get_if<PowerSumBasis>(&basis)) return "powersum" + p->mu.to_string();
  switch (std::get<NamedStatistic>(basis)) {
    case NamedStatistic::Conductance: return "conductance";
    case NamedStatistic::ConductanceVariance: return "conductance-variance";
    case NamedStatistic::ShotNoise: return "shot-noise";
  }
  return "";
}

namespace detail {

/// Runs f(index) over all samples in contiguous per-worker blocks and merges
/// the per-worker moments in worker order.
inline Moments run_samples(const SamplingOptions& opt, const std::function<double(std::uint64_t)>& f) {
  if (opt.count < 2) throw ConfigError("samples", "at least two samples are required");
  const std::size_t threads = static_cast<std::size_t>(std::max(1, opt.threads));
  std::vector<Moments> parts(threads);
  if (opt.raw) opt.raw->assign(opt.count, 0.0);
  auto work = [&](std::size_t w) {
    const std::size_t begin = opt.count * w / threads, end = opt.count * (w + 1) / threads;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = f(i);
      parts[w].add(v);
      if (opt.raw) (*opt.raw)[i] = v;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/// Monte Carlo estimate of a transmission moment in the ideal ensemble.
inline SampleStats estimate_T_moment(const MomentBasis& basis, int n1, int n2, const SamplingOptions& opt,
                                     Variant variant = Variant::Ideal) {
  if (variant == Variant::Barrier)
    throw UnsupportedError("no sampler is defined for barrier-coupled scattering matrices");
  check_channels(n1, n2);
  const Moments m = detail::run_samples(opt, [&](std::uint64_t i) {
    return linear_statistic(basis, cue_sample(n1, n2, opt.seed, i).transmission_eigenvalues());
  });
  const std::string name = "cue:" + basis_name(basis);
  if (std::holds_alternative<NamedStatistic>(basis) && std::get<NamedStatistic>(basis) == NamedStatistic::ConductanceVariance)
    return variance_stats(m, opt.seed, name);
  return mean_stats(m, opt.seed, name);
}

/// Monte Carlo estimate of a time-delay moment in the inverse Laguerre
/// ensemble.
inline SampleStats estimate_Q_moment(const MomentBasis& basis, int m, double tau_d, const SamplingOptions& opt) {
  if (std::holds_alternative<NamedStatistic>(basis))
    throw ConfigError("moment", "named statistics refer to transmission");
  if (m < 1) throw ConfigError("m", "must be positive");
  if (!(tau_d > 0)) throw ConfigError("tau-d", "must be positive");
  const Moments mom = detail::run_samples(opt, [&](std::uint64_t i) {
    return linear_statistic(basis, q_eigenvalues(m, tau_d, opt.seed, i));
  });
  return mean_stats(mom, opt.seed, "inverse-laguerre:" + basis_name(basis));
}

}  // namespace qtransport::ensembles
