#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtransport/algebra/laurent.hpp"
#include "qtransport/algebra/parse.hpp"
#include "qtransport/exact/exact_rmt.hpp"

using namespace qtransport;
using namespace qtransport::exact;
using algebra::Polynomial;
using algebra::RationalFunction;
using algebra::Symbol;
using symfun::Partition;

namespace {

RationalFunction P(const char* s) { return algebra::parse_rational_function(s); }
double to_double(const RationalFunction& f) { return f.constant_value().to_complex().real(); }
double to_double(const mpq_class& q) { return q.get_d(); }

}  // namespace

TEST(Jacobi, Density) {
  const std::vector<double> one = {0.37};
  EXPECT_DOUBLE_EQ(jacobi_density(one, 1, 1, 2), 1.0);
  EXPECT_DOUBLE_EQ(jacobi_density(one, 1, 3, 2), 0.37 * 0.37);
  const std::vector<double> same = {0.4, 0.4};
  EXPECT_EQ(jacobi_density(same, 2, 2, 2), 0.0);
  const std::vector<double> bad = {1.2};
  EXPECT_THROW(jacobi_density(bad, 1, 1, 2), std::domain_error);
  EXPECT_THROW(jacobi_density(one, 1, 1, 3), std::invalid_argument);
}

TEST(Selberg, ExactValues) {
  EXPECT_EQ(selberg_value(1, 1, 1, 1), 1);
  EXPECT_EQ(selberg_value(2, 1, 1, 1), mpq_class(1, 6));
  // Beta function for N1 = 1.
  EXPECT_EQ(selberg_value(1, 3, 2, 5), mpq_class(1, 12));
  EXPECT_THROW(selberg_value(1, 0, 1, 1), std::domain_error);
  EXPECT_THROW(selberg_value(1, mpq_class(1, 3), 1, 1), std::domain_error);
}

TEST(Selberg, AgreesWithQuadrature) {
  struct Case { int n; mpq_class a, b, c; };
  const std::vector<Case> cases = {{1, 3, 2, 1}, {1, mpq_class(1, 2), 1, 0}, {2, 1, 1, 1}, {2, 2, 3, 1}, {2, 1, 2, 2}};
  for (const auto& cs : cases) {
    const double a = cs.a.get_d(), b = cs.b.get_d(), c = cs.c.get_d();
    const double numeric = oracle::integrate_unit_cube(cs.n, 80, [&](const std::vector<double>& t) {
      double v = 1.0;
      for (double x : t) v *= std::pow(x, a - 1) * std::pow(1 - x, b - 1);
      if (t.size() == 2) v *= std::pow(std::abs(t[0] - t[1]), 2 * c);
      return v;
    });
    const double exact = to_double(selberg_value(cs.n, cs.a, cs.b, cs.c));
    // Half-integer exponents leave endpoint singularities, so loosen there.
    const double tol = cs.a.get_den() == 1 ? 1e-10 : 1e-2;
    EXPECT_NEAR(numeric / exact, 1.0, tol) << cs.n << " " << a << " " << b << " " << c;
  }
}

TEST(SchurMomentT, Examples) {
  EXPECT_EQ(apply_channel_constraint(schur_moment_T(Partition{1})), P("N1*N2/(N1+N2)"));
  EXPECT_EQ(schur_moment_T(Partition{1}), P("N1*N2/M"));
  EXPECT_EQ(schur_moment_T(Partition{1, 1}, Channels::numeric(1, 4)), RationalFunction(0));
  EXPECT_EQ(schur_moment_T(Partition{2}, Channels::numeric(1, 1)), RationalFunction(mpq_class(1, 3)));
}

TEST(SchurMomentT, SymmetricInLeads) {
  for (int n = 1; n <= 4; ++n)
    for (const auto& l : symfun::partitions_of(n)) {
      RationalFunction f = schur_moment_T(l);
      RationalFunction swapped = f.substitute(Symbol::N1, algebra::rvar(Symbol::N)).substitute(Symbol::N2, algebra::rvar(Symbol::N1)).substitute(Symbol::N, algebra::rvar(Symbol::N2));
      EXPECT_EQ(f, swapped);
    }
}

TEST(SchurMomentT, VanishesBeyondRank) {
  for (int n = 2; n <= 4; ++n)
    for (const auto& l : symfun::partitions_of(n))
      for (int n1 = 1; n1 < l.length(); ++n1) EXPECT_TRUE(schur_moment_T(l, Channels::numeric(n1, 3)).is_zero());
}

TEST(SchurMomentT, UniformDensityOracle) {
  // N1 = N2 = 1: the eigenvalue is uniform on (0,1), so <T^n> = 1/(n+1).
  for (int n = 1; n <= 5; ++n)
    EXPECT_EQ(schur_moment_T(Partition{n}, Channels::numeric(1, 1)), RationalFunction(mpq_class(1, n + 1)));
}

TEST(SchurMomentT, AgreesWithJacobiQuadrature) {
  // N1 = 2, N2 = 3: integrate s_lambda against the normalized Jacobi density.
  const int n1 = 2, n2 = 3;
  auto weight = [&](const std::vector<double>& t) { return jacobi_density(t, n1, n2, 2); };
  const double z = oracle::integrate_unit_cube(2, 40, weight);
  for (int n = 1; n <= 3; ++n)
    for (const auto& l : symfun::partitions_of(n)) {
      const double num = oracle::integrate_unit_cube(2, 40, [&](const std::vector<double>& t) { return weight(t) * symfun::schur_eval(l, t); });
      EXPECT_NEAR(num / z, to_double(schur_moment_T(l, Channels::numeric(n1, n2))), 1e-10) << l.to_string();
    }
}

TEST(TraceMomentT, RoutesAgree) {
  EXPECT_EQ(trace_moment_T(1).value, P("N1*N2/M"));
  EXPECT_EQ(trace_moment_T(2, Channels::numeric(1, 1)).value, RationalFunction(mpq_class(1, 3)));
  EXPECT_EQ(trace_moment_T(2).value, schur_moment_T(Partition{2}) - schur_moment_T(Partition{1, 1}));
  for (int n = 1; n <= 5; ++n) {
    auto r = trace_moment_T(n);
    EXPECT_TRUE(r.routes_agree) << n;
  }
}

TEST(ConductanceVariance, ClosedFormAndCharacters) {
  auto v = conductance_variance();
  EXPECT_EQ(v.closed_form, P("N1^2*N2^2/(M^2*(M^2-1))"));
  // Independent symbols: the character route carries (M-N1)(M-N2) in place of N1 N2.
  EXPECT_EQ(v.character_route, P("N1*N2*(M-N1)*(M-N2)/(M^2*(M^2-1))"));
  EXPECT_NE(v.character_route, v.closed_form);
  EXPECT_EQ(apply_channel_constraint(v.character_route), apply_channel_constraint(v.closed_form));
  auto c = conductance_variance(Channels::numeric(1, 1));
  EXPECT_EQ(c.closed_form, RationalFunction(mpq_class(1, 12)));
  EXPECT_EQ(c.character_route, c.closed_form);
  EXPECT_EQ(conductance_variance(Channels::numeric(5, 5)).closed_form, RationalFunction(mpq_class(625, 9900)));
}

TEST(InverseLaguerre, Density) {
  const std::vector<double> q = {2.0};
  EXPECT_NEAR(inverse_laguerre_density(q, 1, 1.0), std::exp(-0.5) / 2.0, 1e-15);
  const std::vector<double> same = {1.0, 1.0};
  EXPECT_EQ(inverse_laguerre_density(same, 2, 1.0), 0.0);
  const std::vector<double> bad = {-1.0};
  EXPECT_THROW(inverse_laguerre_density(bad, 1, 1.0), std::domain_error);
  // M = 1 maximizer sits at q = tau_D.
  const double tau = 1.7;
  const std::vector<double> at = {tau}, lo = {tau * 0.99}, hi = {tau * 1.01};
  EXPECT_GT(inverse_laguerre_density(at, 1, tau), inverse_laguerre_density(lo, 1, tau));
  EXPECT_GT(inverse_laguerre_density(at, 1, tau), inverse_laguerre_density(hi, 1, tau));
}

TEST(LaguerreNormalization, ExactAndQuadrature) {
  EXPECT_EQ(laguerre_normalization(1, 1), 1);
  EXPECT_EQ(laguerre_normalization(1, 2), mpq_class(1, 4));
  EXPECT_EQ(laguerre_normalization(2, 1), mpq_class(3, 32));
  for (int m = 1; m <= 2; ++m)
    for (const mpq_class tau : {mpq_class(1), mpq_class(3, 2)}) {
      const double t = tau.get_d();
      const double numeric = oracle::integrate_positive_orthant(m, 120, [&](const std::vector<double>& g) {
        double v = 1.0, tr = 0.0;
        for (double x : g) {
          v *= std::pow(x, m);
          tr += x;
        }
        if (g.size() == 2) v *= (g[0] - g[1]) * (g[0] - g[1]);
        return v * std::exp(-m * t * tr);
      });
      EXPECT_NEAR(numeric / to_double(laguerre_normalization(m, tau)), 1.0, 1e-8);
    }
}

TEST(SchurMomentQ, Examples) {
  EXPECT_EQ(schur_moment_Q(Partition{1}), P("M*tauD"));
  EXPECT_EQ(schur_moment_Q(Partition{2}), P("M^2*tauD^2*(M+1)/(2*(M-1))"));
  EXPECT_EQ(schur_moment_Q(Partition{1, 1}), P("M^2*tauD^2*(M-1)/(2*(M+1))"));
  EXPECT_EQ(schur_moment_Q(Partition{2}, Polynomial(4), RationalFunction(1)), RationalFunction(mpq_class(40, 3)));
  EXPECT_THROW(schur_moment_Q(Partition{2}, Polynomial(1), RationalFunction(1)), std::domain_error);
}

TEST(SchurMomentQ, AgreesWithInverseLaguerreQuadrature) {
  // M = 2, tau_D = 1: integrate over Gamma = Q^{-1} with the normalization weight.
  const int m = 2;
  auto weight = [&](const std::vector<double>& g) { return (g[0] - g[1]) * (g[0] - g[1]) * std::pow(g[0] * g[1], m) * std::exp(-m * (g[0] + g[1])); };
  const double z = oracle::integrate_positive_orthant(2, 120, weight);
  for (const auto& l : symfun::partitions_of(2)) {
    const double num = oracle::integrate_positive_orthant(2, 120, [&](const std::vector<double>& g) {
      return weight(g) * symfun::schur_eval(l, std::vector<double>{1.0 / g[0], 1.0 / g[1]});
    });
    // s_(2)(Q) has an infinite mean at M = 2 ([M]_(2) = 0 is excluded); only (1,1) is finite.
    if (l == Partition{1, 1}) EXPECT_NEAR(num / z, to_double(schur_moment_Q(l, Polynomial(m), RationalFunction(1))), 1e-6);
  }
}

TEST(TraceMomentQ, CharacterRouteAndPrintedSum) {
  EXPECT_EQ(trace_moment_Q(1).value, P("M*tauD"));
  auto two = trace_moment_Q(2);
  EXPECT_EQ(two.value, P("2*M^3*tauD^2/(M^2-1)"));
  EXPECT_FALSE(two.routes_agree);
  EXPECT_EQ(*two.ratio, RationalFunction(2));
  for (int n = 1; n <= 5; ++n) {
    auto r = trace_moment_Q(n);
    ASSERT_TRUE(r.ratio.has_value());
    EXPECT_EQ(*r.ratio, RationalFunction(symfun::factorial(n))) << n;
  }
  // <(Tr Q)^2> from s_(2) + s_(1,1).
  RationalFunction sq = schur_moment_Q(Partition{2}) + schur_moment_Q(Partition{1, 1});
  EXPECT_EQ(sq, P("M^2*tauD^2*(M^2+1)/(M^2-1)"));
}

TEST(Barrier, TauW2) {
  auto at_zero = tau_w2_barrier(std::nullopt, RationalFunction(0));
  EXPECT_EQ(at_zero.value, P("1 + 2/(M^2-1)"));
  EXPECT_EQ(tau_w2_barrier(3, RationalFunction(mpq_class(1, 2))).value, RationalFunction(mpq_class(31, 16)));
  auto sym = tau_w2_barrier(std::nullopt);
  EXPECT_TRUE(sym.dropped_exponential_term);
  EXPECT_EQ(sym.value, P("1 + 2/((1-R)^2*(M^2-1))"));
  EXPECT_THROW(tau_w2_barrier(3, RationalFunction(1)), std::domain_error);
  // Numeric M at R = 0 agrees with the trace-moment route.
  for (int m = 2; m <= 5; ++m) {
    RationalFunction from_q = (schur_moment_Q(Partition{2}, Polynomial(m), RationalFunction(1)) +
                               schur_moment_Q(Partition{1, 1}, Polynomial(m), RationalFunction(1))) /
                              RationalFunction(static_cast<long>(m * m));
    EXPECT_EQ(tau_w2_barrier(m, RationalFunction(0)).value, from_q);
  }
}

TEST(Barrier, MeanDelayIdentity) {
  auto rep = barrier_mean_delay_identity(20);
  EXPECT_TRUE(rep.identity_holds);
  EXPECT_EQ(rep.residual_order, 20);
  auto zero = barrier_mean_delay_identity(1, RationalFunction(0));
  EXPECT_EQ(zero.truncated, algebra::rvar(Symbol::TauD));
  // Numeric partial sums at R = 1/2.
  double sum = 0.0, r = 0.5;
  for (int k = 1; k <= 80; ++k) sum += k * std::pow(r, k - 1);
  EXPECT_NEAR((1 - r) * sum * (1 - r), 1.0, 1e-12);
}
