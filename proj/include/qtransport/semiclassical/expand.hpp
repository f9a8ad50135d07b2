#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtransport/semiclassical/model.hpp"
#include "qtransport/semiclassical/mseries.hpp"
#include "qtransport/symfun/partition.hpp"

namespace qtransport::semiclassical {

/// A vertex multiset together with the number of geometric-series steps on
/// each external leg.
struct Configuration {
  /// (family index, q), sorted.
  std::vector<std::pair<int, int>> vertices;
  std::vector<int> z_steps;
  std::vector<int> w_steps;
  int cost = 0;
};

/// All configurations whose total 1/M cost fits the budget of order K.
inline std::vector<Configuration> configurations(const WickModel& model, int k) {
  if (k < 0) throw ConfigError("order", "must be nonnegative");
  const int budget = model.budget(k);
  const int n = model.mu.weight();
  std::vector<std::pair<int, int>> types;
  for (std::size_t f = 0; f < model.vertices.size(); ++f) {
    const auto& fam = model.vertices[f];
    for (int q = fam.q_min; fam.cost(q) <= budget; ++q) {
      if (fam.cost(q) < 1) throw std::logic_error("VertexFamily: vertices must cost at least one order");
      types.emplace_back(static_cast<int>(f), q);
    }
  }
  auto cost_of = [&](const std::pair<int, int>& t) { return model.vertices[static_cast<std::size_t>(t.first)].cost(t.second); };

  std::vector<std::pair<std::vector<std::pair<int, int>>, int>> multisets;
  std::vector<std::pair<int, int>> cur;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == types.size()) {
      multisets.emplace_back(cur, used);
      return;
    }
    rec(i + 1, used);
    const int c = cost_of(types[i]);
    int added = 0;
    while (used + c <= budget) {
      cur.push_back(types[i]);
      used += c;
      ++added;
      rec(i + 1, used);
    }
    cur.resize(cur.size() - static_cast<std::size_t>(added));
  };
  if (budget >= 0) rec(0, 0);

  const int slots = (model.z_chain ? n : 0) + (model.w_chain ? n : 0);
  std::vector<Configuration> out;
  for (auto& [vs, used] : multisets) {
    const int rem = budget - used;
    std::vector<int> steps(static_cast<std::size_t>(slots), 0);
    std::function<void(int, int)> place = [&](int slot, int left) {
      if (slot == slots) {
        Configuration c;
        c.vertices = vs;
        c.cost = budget - left;
        auto it = steps.begin();
        c.z_steps.assign(static_cast<std::size_t>(n), 0);
        c.w_steps.assign(static_cast<std::size_t>(n), 0);
        if (model.z_chain) {
          std::copy(it, it + n, c.z_steps.begin());
          it += n;
        }
        if (model.w_chain) std::copy(it, it + n, c.w_steps.begin());
        out.push_back(std::move(c));
        return;
      }
      for (int a = 0; a <= left; ++a) {
        steps[static_cast<std::size_t>(slot)] = a;
        place(slot + 1, left - a);
      }
    };
    place(0, rem);
  }
  return out;
}

/// Permutation sending k to the next element of its cycle, cycles taken
/// consecutively with lengths mu_1, mu_2, ...
inline std::vector<int> cycle_permutation(const Partition& mu) {
  std::vector<int> sigma;
  int base = 0;
  for (int part : mu.parts()) {
    for (int t = 0; t < part; ++t) sigma.push_back(base + (t + 1) % part);
    base += part;
  }
  return sigma;
}

/// Wick graph of one configuration with the bookkeeping needed for weights
/// and for vertex symmetries.
/// The configuration with the given vertex valences (q values, sorted) and
/// total number of chain steps, if the list contains one.
inline std::optional<Configuration> find_configuration(const std::vector<Configuration>& cs, const std::vector<int>& qs,
                                                       int chain_steps = 0) {
  for (const auto& c : cs) {
    if (c.vertices.size() != qs.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < qs.size(); ++i) same = same && c.vertices[i].second == qs[i];
    int steps = 0;
    for (int s : c.z_steps) steps += s;
    for (int s : c.w_steps) steps += s;
    if (same && steps == chain_steps) return c;
  }
  return std::nullopt;
}

struct BuiltConfiguration {
  WickGraph graph;
  std::vector<int> vertex_q;
  std::vector<int> vertex_type;
  std::vector<std::array<int, 2>> vertex_first;
  RationalFunction coefficient;
  int base_m_power = 0;
};

inline BuiltConfiguration build(const WickModel& model, const Configuration& c) {
  BuiltConfiguration b;
  const int n = model.mu.weight();
  const auto sigma = cycle_permutation(model.mu);
  std::vector<int> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = b.graph.node({model.x_class, k});
  for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = b.graph.node({model.y_class, k});
  RationalFunction coef(1);
  for (int k = 0; k < n; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    b.graph.add_z_chain(x[ks], y[ks], c.z_steps[ks]);
    b.graph.add_w_chain(y[static_cast<std::size_t>(sigma[ks])], x[ks], c.w_steps[ks]);
    if (c.z_steps[ks]) coef *= detail::power(*model.z_chain, c.z_steps[ks]);
    if (c.w_steps[ks]) coef *= detail::power(*model.w_chain, c.w_steps[ks]);
  }
  int type = -1;
  int run = 0;
  mpz_class symmetry = 1;
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    const auto [f, q] = c.vertices[v];
    if (v == 0 || c.vertices[v] != c.vertices[v - 1]) {
      ++type;
      run = 0;
    }
    symmetry *= ++run;
    const auto& fam = model.vertices[static_cast<std::size_t>(f)];
    b.vertex_first.push_back(b.graph.add_vertex(q));
    b.vertex_q.push_back(q);
    b.vertex_type.push_back(type);
    coef *= fam.coefficient(q);
    b.base_m_power += fam.m_power;
  }
  const int legs = static_cast<int>(b.graph.z.size());
  b.base_m_power -= legs;
  coef *= detail::power(model.propagator, legs);
  b.coefficient = coef * RationalFunction(mpq_class(1, symmetry));
  return b;
}

struct ExpandOptions {
  int threads = 1;
  /// Keep free index loops with the fugacity N instead of discarding them.
  bool keep_loops = false;
  /// Taylor truncation of the coefficients in R.
  std::optional<int> r_order;
  bool use_cache = true;
  /// Largest number of Z occurrences in a single configuration.
  int max_legs = 24;
  EnumerationLimits limits;
};

namespace detail {

inline constexpr int kCacheVersion = 1;

class SeriesCache {
 public:
  static SeriesCache& instance() {
    static SeriesCache c;
    return c;
  }

  std::optional<MSeries> get(const std::string& key) {
    std::lock_guard lock(mu_);
    load();
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const MSeries& s) {
    std::lock_guard lock(mu_);
    load();
    entries_.insert_or_assign(key, s);
    save();
  }

  void clear() {
    std::lock_guard lock(mu_);
    entries_.clear();
    loaded_dir_.reset();
  }

 private:
  static std::optional<std::filesystem::path> file() {
    const char* dir = std::getenv("QTRANSPORT_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return std::filesystem::path(dir) / ("semiclassical-v" + std::to_string(kCacheVersion) + ".json");
  }

  void load() {
    const auto path = file();
    const std::string dir = path ? path->string() : std::string();
    if (loaded_dir_ && *loaded_dir_ == dir) return;
    loaded_dir_ = dir;
    if (!path || !std::filesystem::exists(*path)) return;
    try {
      std::ifstream in(*path);
      const auto j = nlohmann::json::parse(in);
      if (j.at("version").get<int>() != kCacheVersion) return;
      for (const auto& [k, v] : j.at("entries").items()) entries_.insert_or_assign(k, v.get<MSeries>());
    } catch (const std::exception&) {
      // unreadable cache files are ignored
    }
  }

  void save() const {
    const auto path = file();
    if (!path) return;
    nlohmann::json j = {{"version", kCacheVersion}, {"entries", nlohmann::json::object()}};
    for (const auto& [k, v] : entries_) j["entries"][k] = v;
    std::error_code ec;
    std::filesystem::create_directories(path->parent_path(), ec);
    const auto tmp = path->string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << j.dump(1);
    }
    std::filesystem::rename(tmp, *path, ec);
  }

  std::mutex mu_;
  std::map<std::string, MSeries> entries_;
  std::optional<std::string> loaded_dir_;
};

}  // namespace detail

inline void clear_series_cache() { detail::SeriesCache::instance().clear(); }

/// Expands the model through K orders beyond its leading power.  The result
/// covers M^{ref-K} .. M^{ref}.
inline MSeries expand(const WickModel& model, int k, const ExpandOptions& opt = {}) {
  const int ref = model.reference_power;
  const std::string key = model.fingerprint + "|K=" + std::to_string(k) + (opt.keep_loops ? "|loops" : "");
  auto finish = [&](MSeries s) { return opt.r_order ? s.truncate_r(*opt.r_order) : s; };
  if (opt.use_cache)
    if (auto hit = detail::SeriesCache::instance().get(key)) return finish(*hit);

  const auto configs = configurations(model, k);
  std::vector<BuiltConfiguration> built;
  built.reserve(configs.size());
  for (const auto& c : configs) {
    built.push_back(build(model, c));
    if (static_cast<int>(built.back().graph.z.size()) > opt.max_legs)
      throw ResourceError("configuration with " + std::to_string(built.back().graph.z.size()) +
                              " contractions exceeds the enumeration limit at order",
                          k);
  }

  std::vector<std::map<int, Polynomial>> partial(built.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> steps{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < built.size(); i = next++) {
        const auto& b = built[i];
        for (const auto& [f, count] : count_faces(b.graph, opt.keep_loops, steps, opt.limits)) {
          algebra::Exponents e{};
          e[algebra::idx(Symbol::N1)] = static_cast<std::uint16_t>(f.n1);
          e[algebra::idx(Symbol::N2)] = static_cast<std::uint16_t>(f.n2);
          e[algebra::idx(Symbol::N)] = static_cast<std::uint16_t>(f.n);
          partial[i][b.base_m_power + f.m] += Polynomial::monomial(e, GaussianRational(mpq_class(mpz_class(static_cast<long>(count)))));
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = built.size();
    }
  };
  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const ResourceError& e) {
      throw ResourceError(e.what(), k);
    }
  }

  std::map<int, RationalFunction> all;
  for (std::size_t i = 0; i < built.size(); ++i)
    for (const auto& [p, poly] : partial[i])
      if (!poly.is_zero()) all[p] += built[i].coefficient * RationalFunction(poly);
  MSeries out(ref - k, ref);
  for (const auto& [p, c] : all) {
    if (p > ref && !c.is_zero())
      throw std::logic_error("expand: " + model.name + " produced a term above its leading power M^" + std::to_string(ref));
    out.add_term(p, c);
  }
  if (opt.use_cache) detail::SeriesCache::instance().put(key, out);
  return finish(out);
}

/// One surviving Wick pairing of a configuration.
struct PairingDiagram {
  std::vector<int> vertex_q;
  std::vector<int> pairing;
  FaceCount faces;
  int vertex_count = 0;
  int edge_count = 0;
  int m_power = 0;
  /// Full weight including the power of M.
  RationalFunction weight;
};

inline RationalFunction m_power_rf(int p) {
  RationalFunction r = detail::power(algebra::rvar(Symbol::M), std::abs(p));
  return p >= 0 ? r : r.reciprocal();
}

inline std::vector<PairingDiagram> enumerate_diagrams(const WickModel& model, const Configuration& c, bool keep_loops = false) {
  const auto b = build(model, c);
  std::vector<PairingDiagram> out;
  std::atomic<std::uint64_t> steps{0};
  for_each_pairing(
      b.graph, keep_loops,
      [&](const std::vector<int>& perm, const FaceCount& f) {
        PairingDiagram d;
        d.vertex_q = b.vertex_q;
        d.pairing = perm;
        d.faces = f;
        d.vertex_count = static_cast<int>(b.vertex_q.size());
        d.edge_count = static_cast<int>(perm.size());
        d.m_power = b.base_m_power + f.m;
        d.weight = b.coefficient * m_power_rf(d.m_power) *
                   RationalFunction(pow(algebra::var(Symbol::N1), static_cast<unsigned>(f.n1)) *
                                    pow(algebra::var(Symbol::N2), static_cast<unsigned>(f.n2)) *
                                    pow(algebra::var(Symbol::N), static_cast<unsigned>(f.n)));
        out.push_back(std::move(d));
      },
      steps);
  return out;
}

/// Pairings identified up to rotating a vertex and permuting equal vertices.
struct DiagramClass {
  std::vector<int> canonical;
  std::size_t size = 0;
  FaceCount faces;
  int m_power = 0;
  RationalFunction value;
};

inline std::vector<DiagramClass> diagram_classes(const WickModel& model, const Configuration& c, bool keep_loops = false) {
  const auto b = build(model, c);
  const std::size_t legs = b.graph.z.size();
  // Group of relabelings as (Z map, W map) pairs.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> group;
  {
    std::vector<int> id(legs);
    std::iota(id.begin(), id.end(), 0);
    group.emplace_back(id, id);
  }
  std::map<int, std::vector<int>> by_type;
  for (std::size_t v = 0; v < b.vertex_type.size(); ++v) by_type[b.vertex_type[v]].push_back(static_cast<int>(v));
  for (const auto& [t, vs] : by_type) {
    const int q = b.vertex_q[static_cast<std::size_t>(vs.front())];
    std::vector<std::pair<std::vector<int>, std::vector<int>>> next;
    std::vector<int> order(vs.size());
    std::iota(order.begin(), order.end(), 0);
    do {
      std::vector<int> rot(vs.size(), 0);
      while (true) {
        for (const auto& [gz, gw] : group) {
          auto nz = gz, nw = gw;
          for (std::size_t a = 0; a < vs.size(); ++a) {
            const auto from = b.vertex_first[static_cast<std::size_t>(vs[a])];
            const auto to = b.vertex_first[static_cast<std::size_t>(vs[static_cast<std::size_t>(order[a])])];
            for (int kq = 0; kq < q; ++kq) {
              const int shifted = (kq + rot[a]) % q;
              nz[static_cast<std::size_t>(from[0] + kq)] = gz[static_cast<std::size_t>(to[0] + shifted)];
              nw[static_cast<std::size_t>(from[1] + kq)] = gw[static_cast<std::size_t>(to[1] + shifted)];
            }
          }
          next.emplace_back(std::move(nz), std::move(nw));
        }
        std::size_t a = 0;
        while (a < rot.size() && ++rot[a] == q) rot[a++] = 0;
        if (a == rot.size()) break;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    group = std::move(next);
  }

  std::map<std::vector<int>, DiagramClass> classes;
  for (const auto& d : enumerate_diagrams(model, c, keep_loops)) {
    std::vector<int> best;
    for (const auto& [gz, gw] : group) {
      std::vector<int> img(legs);
      for (std::size_t i = 0; i < legs; ++i)
        img[static_cast<std::size_t>(gz[i])] = gw[static_cast<std::size_t>(d.pairing[i])];
      if (best.empty() || img < best) best = std::move(img);
    }
    auto& cls = classes[best];
    if (cls.size == 0) {
      cls.canonical = best;
      cls.faces = d.faces;
      cls.m_power = d.m_power;
    }
    ++cls.size;
    cls.value += d.weight;
  }
  std::vector<DiagramClass> out;
  for (auto& [k, v] : classes) out.push_back(std::move(v));
  return out;
}

/// (1/M) <Tr Q^m> / tauD^m from the energy-dependent correlators C_n, by
/// differentiating m times in eps at eps = 0.
inline MSeries time_delay_from_energy(int m, int k, const ExpandOptions& opt = {}) {
  if (m < 1) throw ConfigError("moment", "power must be positive");
  MSeries total(-k, 0);
  for (int n = 1; n <= m; ++n) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(n));
    const MSeries cn = expand(model_energy(Partition{n}, EnergyLabels::Channels), k, opt).shifted(-1);
    total += cn * RationalFunction(mpq_class((m - n) % 2 == 0 ? c : mpz_class(-c)));
  }
  GaussianRational scale{mpq_class(symfun::factorial(m))};
  for (int j = 0; j < m; ++j) scale = scale * GaussianRational::i();
  const RationalFunction inv = RationalFunction(scale).reciprocal();
  return total.map_coefficients([&](const RationalFunction& c) {
    RationalFunction d = c;
    for (int j = 0; j < m; ++j) d = d.derivative(Symbol::Eps);
    return d.substitute(Symbol::Eps, GaussianRational(0)) * inv;
  });
}

}  // namespace qtransport::semiclassical
