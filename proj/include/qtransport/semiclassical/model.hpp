#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qtransport/algebra/rational_function.hpp"
#include "qtransport/errors.hpp"
#include "qtransport/semiclassical/mseries.hpp"
#include "qtransport/semiclassical/wick.hpp"
#include "qtransport/symfun/partition.hpp"

namespace qtransport::semiclassical {

using symfun::Partition;

/// One family of interaction vertices Tr (Z Z^dagger)^q, q >= q_min, each
/// weighted by M^m_power * coefficient(q).  The 1/q of the exponent is part
/// of the coefficient.
struct VertexFamily {
  std::string name;
  int q_min = 2;
  int m_power = 1;
  std::function<RationalFunction(int)> coefficient;

  /// Order in 1/M that one such vertex costs.
  int cost(int q) const { return q - m_power; }
};

/// Declarative description of a Gaussian matrix-model expansion.
///
/// The external part is prod_k (Z C_k)_{X_k, Y_k} (D_k Z^dagger)_{Y_sigma(k), X_k}
/// with sigma of cycle type mu, where C_k and D_k are optional geometric
/// series sum_j (c Z^dagger Z)^j.
struct WickModel {
  std::string name;
  /// Identifies the model for caching; must change whenever any weight does.
  std::string fingerprint;
  Partition mu;
  LabelClass x_class = LabelClass::Lead1;
  LabelClass y_class = LabelClass::Lead2;
  /// Each contraction contributes propagator / M.
  RationalFunction propagator = RationalFunction(1);
  std::vector<VertexFamily> vertices;
  std::optional<RationalFunction> z_chain;
  std::optional<RationalFunction> w_chain;
  /// Power of M of the leading term.
  int reference_power = 0;
  /// Physical moment = normalization * expansion.
  RationalFunction normalization = RationalFunction(1);

  /// Total weight of a vertex of valence 2q, including M and the 1/q.
  RationalFunction vertex_weight(int q) const {
    RationalFunction w;
    const RationalFunction m = algebra::rvar(Symbol::M);
    for (const auto& f : vertices) {
      if (q < f.q_min) continue;
      RationalFunction mp(1);
      for (int k = 0; k < std::abs(f.m_power); ++k) mp *= m;
      w += f.coefficient(q) * (f.m_power >= 0 ? mp : mp.reciprocal());
    }
    return w;
  }

  int channel_nodes() const {
    const int n = mu.weight();
    return (x_class == LabelClass::Channel ? n : 0) + (y_class == LabelClass::Channel ? n : 0);
  }
  /// Total 1/M cost available to vertices and chain steps at order K.
  int budget(int k) const { return k + channel_nodes() - mu.weight() - reference_power; }
};

namespace detail {

inline RationalFunction rf(long num, long den = 1) { return RationalFunction(mpq_class(num, den)); }
inline RationalFunction power(const RationalFunction& x, int k) {
  RationalFunction r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
inline void require_nonempty(const Partition& mu) {
  if (mu.empty()) throw ConfigError("moment", "trace structure must be a nonempty partition");
}

}  // namespace detail

/// <prod_i Tr T^{mu_i}> without barriers: vertices -M/q, propagator 1/M.
inline WickModel model_ideal_transmission(const Partition& mu) {
  detail::require_nonempty(mu);
  WickModel w;
  w.name = "ideal-transmission";
  w.fingerprint = "ideal-transmission" + mu.to_string();
  w.mu = mu;
  w.vertices = {{"interaction", 2, 1, [](int q) { return detail::rf(-1, q); }}};
  w.reference_power = -mu.weight();
  return w;
}

/// Channel sums used by the energy-dependent model.
enum class EnergyLabels {
  Leads,     ///< t(E+) t^dagger(E-) with lead-1 and lead-2 sums
  Channels,  ///< S(E+) S^dagger(E-) summed over all channels, as in C_n
};

/// Energy-dependent correlator: propagator 1/(M(1 - i eps)), vertices
/// -M(1 - i q eps)/q.
inline WickModel model_energy(const Partition& mu, EnergyLabels labels = EnergyLabels::Leads) {
  detail::require_nonempty(mu);
  const RationalFunction eps = algebra::rvar(Symbol::Eps), i(GaussianRational::i());
  WickModel w;
  w.name = "energy";
  w.fingerprint = std::string("energy-") + (labels == EnergyLabels::Leads ? "leads" : "channels") + mu.to_string();
  w.mu = mu;
  if (labels == EnergyLabels::Channels) {
    w.x_class = w.y_class = LabelClass::Channel;
    w.reference_power = mu.length();
  } else {
    w.reference_power = -mu.weight();
  }
  w.propagator = (RationalFunction(1) - i * eps).reciprocal();
  w.vertices = {{"interaction", 2, 1, [eps, i](int q) { return (RationalFunction(1) - i * RationalFunction(q) * eps) * detail::rf(-1, q); }}};
  return w;
}

/// Which leads carry a tunnel barrier.
struct Barriers {
  bool lead1 = true;
  bool lead2 = false;
};

/// Transmission with a barrier of reflection probability R in lead 1:
/// vertices (-M + N1 R^q)/q and external legs Z (1 - R Z^dagger Z)^{-1}.
inline WickModel model_barrier_transmission(const Partition& mu, Barriers barriers = {}) {
  detail::require_nonempty(mu);
  if (barriers.lead2)
    throw UnsupportedError("barriers in both leads cannot be treated systematically; only lead 1 is supported");
  if (!barriers.lead1) return model_ideal_transmission(mu);
  const RationalFunction r = algebra::rvar(Symbol::R), n1 = algebra::rvar(Symbol::N1);
  WickModel w = model_ideal_transmission(mu);
  w.name = "barrier-transmission";
  w.fingerprint = "barrier-transmission" + mu.to_string();
  w.vertices.push_back({"reflection", 1, 0, [r, n1](int q) { return n1 * detail::power(r, q) * detail::rf(1, q); }});
  w.z_chain = r;
  return w;
}

/// Time delay with end points.  Ideal: vertices -M/q, propagator 1/M,
/// external legs (Z (1 - Z^dagger Z)^{-1})_{i_k,k} Z^dagger_{k+1,i_k}.
/// With a barrier: vertices -M(1 - R^q)/q, propagator 1/(M(1 - R)), and
/// both legs dressed, the Z^dagger side with a factor R per step.
inline WickModel model_time_delay(const Partition& mu, bool barrier = false) {
  detail::require_nonempty(mu);
  const RationalFunction r = algebra::rvar(Symbol::R), m = algebra::rvar(Symbol::M), tau = algebra::rvar(Symbol::TauD);
  WickModel w;
  w.mu = mu;
  w.x_class = LabelClass::Channel;
  w.y_class = LabelClass::Endpoint;
  w.reference_power = mu.length() - mu.weight();
  w.z_chain = RationalFunction(1);
  if (!barrier) {
    w.name = "time-delay";
    w.fingerprint = "time-delay" + mu.to_string();
    w.vertices = {{"interaction", 2, 1, [](int q) { return detail::rf(-1, q); }}};
    w.normalization = detail::power(m * tau, mu.weight());
  } else {
    w.name = "barrier-time-delay";
    w.fingerprint = "barrier-time-delay" + mu.to_string();
    w.propagator = (RationalFunction(1) - r).reciprocal();
    w.vertices = {{"interaction", 2, 1, [r](int q) { return (detail::power(r, q) - RationalFunction(1)) * detail::rf(1, q); }}};
    w.w_chain = r;
    w.normalization = detail::power((RationalFunction(1) - r) * m * tau, mu.weight());
  }
  return w;
}

}  // namespace qtransport::semiclassical
