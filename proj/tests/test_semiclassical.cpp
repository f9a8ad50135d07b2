#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include <Eigen/Dense>

#include "qtransport/algebra/parse.hpp"
#include "qtransport/ensembles/random.hpp"
#include "qtransport/exact/exact_rmt.hpp"
#include "qtransport/semiclassical/expand.hpp"

using namespace qtransport;
using namespace qtransport::semiclassical;
using algebra::RationalFunction;
using algebra::Symbol;
using symfun::Partition;

namespace {

RationalFunction P(const char* s) { return algebra::parse_rational_function(s); }

ExpandOptions fresh() {
  ExpandOptions o;
  o.use_cache = false;
  return o;
}

/// Value of a pure Gaussian average from the engine: sum of N^faces / M^edges.
RationalFunction gaussian_average(const WickGraph& g) {
  std::atomic<std::uint64_t> steps{0};
  RationalFunction total;
  const RationalFunction n = algebra::rvar(Symbol::N), m = algebra::rvar(Symbol::M);
  for (const auto& [f, count] : count_faces(g, true, steps))
    total += RationalFunction(static_cast<long>(count)) * algebra::pow(n, f.n);
  return total / algebra::pow(m, static_cast<int>(g.z.size()));
}

double at(const RationalFunction& f, int n, int m) {
  return f.substitute(Symbol::N, RationalFunction(static_cast<long>(n)))
      .substitute(Symbol::M, RationalFunction(static_cast<long>(m)))
      .constant_value()
      .to_complex()
      .real();
}

Configuration find_config(const std::vector<Configuration>& cs, std::vector<int> qs, int z_steps = 0) {
  for (const auto& c : cs) {
    if (c.vertices.size() != qs.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < qs.size(); ++i) same = same && c.vertices[i].second == qs[i];
    int zs = 0;
    for (int s : c.z_steps) zs += s;
    for (int s : c.w_steps) zs += s;
    if (same && zs == z_steps) return c;
  }
  throw std::runtime_error("configuration not found");
}

}  // namespace

TEST(Wick, PairingCounts) {
  EXPECT_EQ(wick_pairings(1, 1).size(), 1u);
  EXPECT_EQ(wick_pairings(3, 3).size(), 6u);
  EXPECT_EQ(wick_pairings(4, 4).size(), 24u);
  EXPECT_TRUE(wick_pairings(2, 3).empty());
  EXPECT_TRUE(wick_pairings(3, 2).empty());
}

TEST(Wick, Covariance) {
  // <Z_ab Zdag_cd> = delta_ad delta_bc / M: with a, b, c, d all distinct
  // end points nothing survives; with a = d and b = c one pairing does.
  WickGraph g;
  const int a = g.node({LabelClass::Endpoint, 0}), b = g.node({LabelClass::Endpoint, 1});
  const int c = g.node({LabelClass::Endpoint, 2}), d = g.node({LabelClass::Endpoint, 3});
  g.z.push_back({a, b});
  g.w.push_back({c, d});
  std::atomic<std::uint64_t> steps{0};
  EXPECT_TRUE(count_faces(g, false, steps).empty());
  WickGraph h;
  const int x = h.node({LabelClass::Endpoint, 0}), y = h.node({LabelClass::Endpoint, 1});
  h.z.push_back({x, y});
  h.w.push_back({y, x});
  const auto f = count_faces(h, false, steps);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.begin()->second, 1);
}

TEST(Wick, OddCountsVanish) {
  WickGraph g;
  g.add_vertex(1);
  g.z.push_back({g.node(), g.node()});
  std::atomic<std::uint64_t> steps{0};
  EXPECT_TRUE(count_faces(g, true, steps).empty());
}

TEST(Wick, GaussianTracesAgainstSampling) {
  // Brute force: Z is N x N with independent complex entries of variance 1/M.
  const int m = 3, samples = 40000;
  WickGraph one;
  one.add_vertex(1);
  WickGraph two;
  two.add_vertex(1);
  two.add_vertex(1);
  WickGraph quartic;
  quartic.add_vertex(2);
  const RationalFunction e1 = gaussian_average(one), e2 = gaussian_average(two), e4 = gaussian_average(quartic);
  EXPECT_EQ(e1, P("N^2/M"));
  EXPECT_EQ(e2, P("(N^4 + N^2)/M^2"));
  EXPECT_EQ(e4, P("2*N^3/M^2"));
  for (int n = 1; n <= 4; ++n) {
    double s1 = 0, s2 = 0, s4 = 0, v1 = 0;
    for (int k = 0; k < samples; ++k) {
      ensembles::SampleStream rng(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
      Eigen::MatrixXcd z(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = rng.complex_normal() / std::sqrt(static_cast<double>(m));
      const Eigen::MatrixXcd zz = z * z.adjoint();
      const double t = zz.trace().real();
      s1 += t;
      v1 += t * t;
      s2 += t * t;
      s4 += (zz * zz).trace().real();
    }
    s1 /= samples;
    s2 /= samples;
    s4 /= samples;
    const double se1 = std::sqrt((v1 / samples - s1 * s1) / samples);
    EXPECT_NEAR(s1, at(e1, n, m), 5 * se1) << n;
    EXPECT_NEAR(s2 / at(e2, n, m), 1.0, 0.05) << n;
    EXPECT_NEAR(s4 / at(e4, n, m), 1.0, 0.05) << n;
  }
}

TEST(Models, VertexWeights) {
  const auto ideal = model_ideal_transmission(Partition{1});
  EXPECT_EQ(ideal.vertex_weight(2), P("-M/2"));
  EXPECT_EQ(ideal.vertex_weight(3), P("-M/3"));
  const auto barrier = model_barrier_transmission(Partition{1});
  EXPECT_EQ(RationalFunction(2) * barrier.vertex_weight(2), P("-M + N1*R^2"));
  EXPECT_EQ(RationalFunction(3) * barrier.vertex_weight(3), P("-M + N1*R^3"));
  const auto energy = model_energy(Partition{1});
  EXPECT_EQ(RationalFunction(2) * energy.vertex_weight(2), P("-M*(1 - 2*I*eps)"));
  EXPECT_EQ(energy.propagator, P("1/(1 - I*eps)"));
  const auto td = model_time_delay(Partition{1}, true);
  EXPECT_EQ(RationalFunction(2) * td.vertex_weight(2), P("-M*(1 - R^2)"));
  EXPECT_THROW(model_barrier_transmission(Partition{1}, Barriers{true, true}), UnsupportedError);
  EXPECT_THROW(model_ideal_transmission(Partition{}), ConfigError);
}

TEST(Expand, ConductanceLeadingOrderHasNoVertices) {
  const auto model = model_ideal_transmission(Partition{1});
  const auto configs = configurations(model, 0);
  ASSERT_EQ(configs.size(), 1u);
  EXPECT_TRUE(configs[0].vertices.empty());
  const auto s = expand(model, 0, fresh());
  EXPECT_EQ(s.coefficients().size(), 1u);
  EXPECT_EQ(s.coefficient(-1), P("N1*N2"));
}

TEST(Expand, ConductanceCorrectionsCancel) {
  const auto s = expand(model_ideal_transmission(Partition{1}), 3, fresh());
  EXPECT_EQ(s.lowest(), -4);
  EXPECT_EQ(s.coefficient(-1), P("N1*N2"));
  for (int p = -2; p >= -4; --p) EXPECT_TRUE(s.coefficient(p).is_zero()) << p;
  EXPECT_TRUE(compare_series(s, exact::trace_moment_T(1).value).agree);
}

TEST(Expand, TransmissionMomentsMatchExact) {
  const auto o = fresh();
  const auto t2 = expand(model_ideal_transmission(Partition{2}), 3, o);
  EXPECT_TRUE(compare_series(t2, exact::trace_moment_T(2).value).agree);
  const auto t11 = expand(model_ideal_transmission(Partition{1, 1}), 3, o);
  const auto ex11 = exact::schur_moment_T(Partition{2}) + exact::schur_moment_T(Partition{1, 1});
  EXPECT_TRUE(compare_series(t11, ex11).agree);
  const auto t3 = expand(model_ideal_transmission(Partition{3}), 2, o);
  EXPECT_TRUE(compare_series(t3, exact::trace_moment_T(3).value).agree);
}

TEST(Expand, MPowerIsVerticesMinusEdges) {
  const auto model = model_ideal_transmission(Partition{2});
  for (const auto& c : configurations(model, 2))
    for (const auto& d : enumerate_diagrams(model, c)) {
      ASSERT_EQ(d.m_power, d.vertex_count - d.edge_count);
      ASSERT_GE(d.faces.n, 0);
    }
}

TEST(Expand, LoopFugacityThenZeroEqualsFilter) {
  for (const auto& mu : {Partition{1}, Partition{2}, Partition{1, 1}}) {
    auto with = fresh();
    with.keep_loops = true;
    const auto loops = expand(model_ideal_transmission(mu), 2, with);
    const auto filtered = expand(model_ideal_transmission(mu), 2, fresh());
    EXPECT_EQ(loops.substitute(Symbol::N, RationalFunction(0)), filtered) << mu.to_string();
  }
  auto with = fresh();
  with.keep_loops = true;
  const auto loops = expand(model_ideal_transmission(Partition{1}), 2, with);
  bool has_n = false;
  for (const auto& [p, c] : loops.coefficients()) has_n = has_n || c.depends_on(Symbol::N);
  EXPECT_TRUE(has_n);
}

TEST(Expand, DegenerateParametersReduceToIdeal) {
  for (const auto& mu : {Partition{1}, Partition{2}, Partition{1, 1}}) {
    const auto ideal = expand(model_ideal_transmission(mu), 2, fresh());
    const auto barrier = expand(model_barrier_transmission(mu), 2, fresh());
    EXPECT_EQ(barrier.substitute(Symbol::R, RationalFunction(0)), ideal) << mu.to_string();
    const auto energy = expand(model_energy(mu), 2, fresh());
    EXPECT_EQ(energy.substitute(Symbol::Eps, RationalFunction(0)), ideal) << mu.to_string();
    EXPECT_FALSE(energy.is_real());
    EXPECT_TRUE(barrier.is_real());
  }
}

TEST(Expand, BarrierLeadingTermsResumGeometrically) {
  // The terms of highest total degree in N1, N2 at each order are those of
  // N1 N2 / (M - N1 R) = sum_k N1^{k+1} N2 R^k / M^{k+1}.
  const int order = 3;
  const auto s = expand(model_barrier_transmission(Partition{1}), order, fresh());
  const RationalFunction n = algebra::rvar(Symbol::N);
  for (int k = 0; k <= order; ++k) {
    const RationalFunction c = s.coefficient(-1 - k)
                                   .substitute(Symbol::N1, n * algebra::rvar(Symbol::N1))
                                   .substitute(Symbol::N2, n * algebra::rvar(Symbol::N2));
    const RationalFunction lead = algebra::pow(n, k + 2) * algebra::pow(algebra::rvar(Symbol::N1), k + 1) *
                                  algebra::rvar(Symbol::N2) * algebra::pow(algebra::rvar(Symbol::R), k);
    EXPECT_EQ(c.degree(Symbol::N), k + 2) << k;
    EXPECT_LT((c - lead).degree(Symbol::N), k + 2) << k;
  }
}

TEST(Expand, EnergyCorrelatorLeadingTerm) {
  const auto c1 = expand(model_energy(Partition{1}, EnergyLabels::Channels), 1, fresh()).shifted(-1);
  EXPECT_EQ(c1.coefficient(0), P("1/(1 - I*eps)"));
}

TEST(Expand, TimeDelayFromEnergyDerivatives) {
  const auto o = fresh();
  const auto first = time_delay_from_energy(1, 2, o);
  EXPECT_TRUE(compare_series(first, RationalFunction(1)).agree);
  const auto second = time_delay_from_energy(2, 2, o);
  const RationalFunction m = algebra::rvar(Symbol::M), tau = algebra::rvar(Symbol::TauD);
  EXPECT_TRUE(compare_series(second, exact::trace_moment_Q(2).value / (m * tau * tau)).agree);
  EXPECT_TRUE(second.is_real());
}

TEST(Expand, TimeDelayMatchesExact) {
  const auto o = fresh();
  const auto m1 = model_time_delay(Partition{1});
  const auto s1 = expand(m1, 3, o);
  EXPECT_TRUE(compare_series(s1, exact::schur_moment_Q(Partition{1}) / m1.normalization).agree);
  EXPECT_EQ(s1.coefficients().size(), 1u);
  const auto m2 = model_time_delay(Partition{2});
  EXPECT_TRUE(compare_series(expand(m2, 3, o), exact::trace_moment_Q(2).value / m2.normalization).agree);
  const auto m11 = model_time_delay(Partition{1, 1});
  const auto ex11 = exact::schur_moment_Q(Partition{2}) + exact::schur_moment_Q(Partition{1, 1});
  EXPECT_TRUE(compare_series(expand(m11, 3, o), ex11 / m11.normalization).agree);
}

TEST(Expand, BarrierTimeDelay) {
  const auto o = fresh();
  const RationalFunction one(1), r = algebra::rvar(Symbol::R);
  const auto mean = expand(model_time_delay(Partition{1}, true), 3, o);
  EXPECT_TRUE(compare_series(mean * (one - r), one).agree);
  const auto sq = expand(model_time_delay(Partition{1, 1}, true), 2, o);
  EXPECT_TRUE(sq.is_real());
  const auto closed = exact::tau_w2_barrier(std::nullopt);
  EXPECT_TRUE(closed.dropped_exponential_term);
  EXPECT_TRUE(compare_series(sq * ((one - r) * (one - r)), closed.value).agree);
  // Expanded to second order in R as well.
  const auto truncated = (sq * ((one - r) * (one - r))).truncate_r(2);
  const auto exact_r = MSeries::from_rational_function(closed.value, -2, 0).truncate_r(2);
  EXPECT_EQ(truncated, exact_r);
}

TEST(Diagrams, ConductanceSquaredHasNoFullyPairedClass) {
  // V' = 4 ribbon vertices and E = 7 edges force an odd face count, so the
  // N1^2 N2^2 / M^5 class lives in Tr T^2 rather than (Tr T)^2.
  const auto target = P("N1^2*N2^2/M^5");
  const auto squared = model_ideal_transmission(Partition{1, 1});
  const auto c11 = find_config(configurations(squared, 3), {2, 3});
  int n1_class = 0, n2_class = 0;
  for (const auto& cl : diagram_classes(squared, c11)) {
    EXPECT_NE(cl.value, target);
    EXPECT_EQ(cl.size, 6u);
    if (cl.value == P("N1*N2^2/M^5")) ++n2_class;
    if (cl.value == P("N1^2*N2/M^5")) ++n1_class;
  }
  EXPECT_EQ(n1_class, 28);
  EXPECT_EQ(n2_class, 28);
  const auto trace2 = model_ideal_transmission(Partition{2});
  int found = 0;
  for (const auto& cl : diagram_classes(trace2, find_config(configurations(trace2, 3), {2, 3})))
    if (cl.value == target) ++found;
  EXPECT_EQ(found, 28);
}

TEST(Diagrams, SingleEncounterTimeDelay) {
  // One channel, three contractions and one encounter: the rule value -1/M
  // appears with one free index loop, which the N -> 0 rule removes.
  const auto model = model_time_delay(Partition{1});
  const auto c = find_config(configurations(model, 1), {2});
  int found = 0;
  for (const auto& cl : diagram_classes(model, c, true)) {
    if (cl.value != P("-N/M")) continue;
    ++found;
    EXPECT_EQ(cl.faces.m, 1);
    EXPECT_EQ(cl.faces.n, 1);
    EXPECT_EQ(cl.value.substitute(Symbol::N, RationalFunction(1)), P("-1/M"));
  }
  EXPECT_EQ(found, 2);
  EXPECT_TRUE(diagram_classes(model, c).empty());
}

TEST(MSeriesOps, ComparisonDetectsPerturbation) {
  auto s = expand(model_ideal_transmission(Partition{2}), 2, fresh());
  const auto exact = exact::trace_moment_T(2).value;
  EXPECT_TRUE(compare_series(s, exact).agree);
  s.add_term(-3, P("N1"));
  const auto cmp = compare_series(s, exact);
  EXPECT_FALSE(cmp.agree);
  ASSERT_TRUE(cmp.first_mismatch.has_value());
  EXPECT_EQ(*cmp.first_mismatch, -3);
  EXPECT_THROW(compare_series(s, P("M")), std::domain_error);
}

TEST(MSeriesOps, ArithmeticAndWindows) {
  MSeries a(-3, 0), b(-3, 0);
  a.add_term(0, P("1"));
  a.add_term(-1, P("N1"));
  b.add_term(-1, P("-N1"));
  b.add_term(-5, P("7"));
  EXPECT_EQ((a + b).coefficients().size(), 1u);
  const auto sq = a * a;
  EXPECT_EQ(sq.coefficient(-1), P("2*N1"));
  EXPECT_EQ(sq.coefficient(-2), P("N1^2"));
  EXPECT_EQ(a.negate_m().coefficient(-1), P("-N1"));
  EXPECT_THROW(a.add_term(0, P("M")), std::invalid_argument);
  const auto shifted = a.shifted(2);
  EXPECT_EQ(shifted.highest(), 2);
  EXPECT_EQ(shifted.coefficient(1), P("N1"));
  const auto poly = a.times_polynomial_in_m(algebra::var(Symbol::M) + algebra::Polynomial(1));
  EXPECT_EQ(poly.highest(), 1);
  EXPECT_EQ(poly.coefficient(0), P("1 + N1"));
}

TEST(MSeriesOps, JsonRoundTrip) {
  const auto s = expand(model_barrier_transmission(Partition{1}), 2, fresh());
  const nlohmann::json j = s;
  EXPECT_EQ(j.at("terms").at(0).at("m_power"), -1);
  EXPECT_EQ(j.get<MSeries>(), s);
}

TEST(Budget, ResourceErrors) {
  auto o = fresh();
  o.limits.max_steps = 1000;
  try {
    expand(model_ideal_transmission(Partition{2}), 4, o);
    FAIL() << "expected a resource error";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.attempted_bound(), 4);
  }
  auto legs = fresh();
  legs.max_legs = 4;
  EXPECT_THROW(expand(model_ideal_transmission(Partition{1}), 3, legs), ResourceError);
}

TEST(Cache, PersistsAcrossClears) {
  const auto dir = std::filesystem::temp_directory_path() / "qtransport-cache-test";
  std::filesystem::remove_all(dir);
  ::setenv("QTRANSPORT_CACHE_DIR", dir.c_str(), 1);
  clear_series_cache();
  const auto first = expand(model_ideal_transmission(Partition{2}), 2);
  EXPECT_TRUE(std::filesystem::exists(dir / "semiclassical-v1.json"));
  clear_series_cache();
  const auto second = expand(model_ideal_transmission(Partition{2}), 2);
  EXPECT_EQ(first, second);
  ::unsetenv("QTRANSPORT_CACHE_DIR");
  clear_series_cache();
  std::filesystem::remove_all(dir);
}

TEST(Threads, ParallelExpansionIsIdentical) {
  auto par = fresh();
  par.threads = 3;
  EXPECT_EQ(expand(model_ideal_transmission(Partition{1, 1}), 2, par), expand(model_ideal_transmission(Partition{1, 1}), 2, fresh()));
}
