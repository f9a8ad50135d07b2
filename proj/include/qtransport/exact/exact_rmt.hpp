#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qtransport/algebra/rational_function.hpp"
#include "qtransport/symfun/characters.hpp"
#include "qtransport/symfun/schur.hpp"

namespace qtransport::exact {

using algebra::GaussianRational;
using algebra::Polynomial;
using algebra::RationalFunction;
using algebra::Symbol;
using symfun::Partition;

/// Channel numbers of the two leads and the total M.  Each entry is either
/// a number or a polynomial in the formal symbols; by default all three are
/// independent symbols.
struct Channels {
  Polynomial n1 = algebra::var(Symbol::N1);
  Polynomial n2 = algebra::var(Symbol::N2);
  Polynomial m = algebra::var(Symbol::M);

  static Channels symbolic() { return {}; }
  /// Symbolic N1, N2 with M = N1 + N2 imposed.
  static Channels constrained() {
    Channels c;
    c.m = c.n1 + c.n2;
    return c;
  }
  static Channels numeric(long n1, long n2) { return {Polynomial(n1), Polynomial(n2), Polynomial(n1 + n2)}; }
};

/// Imposes M = N1 + N2.
inline RationalFunction apply_channel_constraint(const RationalFunction& f) {
  return f.substitute(Symbol::M, RationalFunction(algebra::var(Symbol::N1) + algebra::var(Symbol::N2)));
}

/// Evaluates a function of the symbols M, N1, N2 at the given channels.
inline RationalFunction at_channels(const RationalFunction& f, const Channels& ch) {
  // Substitute through fresh copies so that e.g. M -> N1 + N2 is not rewritten again.
  RationalFunction r = f.substitute(Symbol::M, RationalFunction(ch.m.substitute(Symbol::N1, algebra::var(Symbol::N)).substitute(Symbol::N2, algebra::var(Symbol::Eps))));
  r = r.substitute(Symbol::N1, RationalFunction(ch.n1)).substitute(Symbol::N2, RationalFunction(ch.n2));
  r = r.substitute(Symbol::N, RationalFunction(ch.n1)).substitute(Symbol::Eps, RationalFunction(ch.n2));
  return r;
}

// ---------------------------------------------------------------------------
// Transmission eigenvalues (Jacobi ensemble)

/// Unnormalized joint density |Delta(T)|^beta prod T_i^{(beta/2)(N2-N1+1)-1}.
inline double jacobi_density(std::span<const double> t, int n1, int n2, int beta) {
  if (beta != 1 && beta != 2 && beta != 4) throw std::invalid_argument("jacobi_density: beta must be 1, 2 or 4");
  if (static_cast<int>(t.size()) != n1) throw std::invalid_argument("jacobi_density: expected N1 eigenvalues");
  if (n2 < n1) throw std::invalid_argument("jacobi_density: requires N2 >= N1");
  for (double v : t)
    if (!(v > 0.0 && v < 1.0)) throw std::domain_error("jacobi_density: eigenvalues must lie in (0,1)");
  double vandermonde = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) vandermonde *= std::abs(t[j] - t[i]);
  const double exponent = 0.5 * beta * (n2 - n1 + 1) - 1.0;
  double weight = std::pow(vandermonde, beta);
  for (double v : t) weight *= std::pow(v, exponent);
  return weight;
}

namespace detail {

/// Gamma at a positive integer or half-integer, as rational * pi^(half_pi/2).
struct GammaValue {
  mpq_class rational{1};
  int half_pi = 0;
};

inline GammaValue gamma_exact(const mpq_class& x) {
  if (sgn(x) <= 0) throw std::domain_error("Gamma argument " + x.get_str() + " is not positive");
  mpq_class twice = 2 * x;
  twice.canonicalize();
  if (twice.get_den() != 1) throw std::domain_error("Gamma argument " + x.get_str() + " does not reduce to factorials");
  if (x.get_den() == 1) {
    return {mpq_class(symfun::factorial(x.get_num().get_si() - 1)), 0};
  }
  // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
  long k = (twice.get_num().get_si() - 1) / 2;
  mpz_class four_k;
  mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
  mpq_class v(symfun::factorial(2 * k), four_k * symfun::factorial(k));
  v.canonicalize();
  return {v, 1};
}

}  // namespace detail

/// Selberg integral over (0,1)^n1 of |Delta|^{2c} prod t^{a-1}(1-t)^{b-1},
/// exact when every Gamma factor reduces to factorials and the powers of pi
/// cancel.
inline mpq_class selberg_value(int n1, const mpq_class& a, const mpq_class& b, const mpq_class& c) {
  if (n1 < 1) throw std::domain_error("selberg_value: N1 must be positive");
  if (sgn(a) <= 0 || sgn(b) <= 0 || sgn(c) < 0) throw std::domain_error("selberg_value: requires a > 0, b > 0, c >= 0");
  mpq_class value = 1;
  int half_pi = 0;
  auto mul = [&](const mpq_class& x, int sign) {
    auto g = detail::gamma_exact(x);
    if (sign > 0) {
      value *= g.rational;
      half_pi += g.half_pi;
    } else {
      value /= g.rational;
      half_pi -= g.half_pi;
    }
  };
  for (int j = 0; j < n1; ++j) {
    mpq_class jc = c * j;
    mul(1 + c + jc, +1);
    mul(a + jc, +1);
    mul(b + jc, +1);
    mul(1 + c, -1);
    mul(a + b + c * (n1 + j - 1), -1);
  }
  if (half_pi != 0) throw std::domain_error("selberg_value: result is not rational for these parameters");
  value.canonicalize();
  return value;
}

/// <s_lambda(T)> = s_lambda(1_N1) s_lambda(1_N2) / s_lambda(1_M).
inline RationalFunction schur_moment_T(const Partition& lambda, const Channels& ch = Channels::symbolic()) {
  Polynomial den = symfun::schur_at_identity(lambda, ch.m);
  if (den.is_zero())
    throw std::domain_error("schur_moment_T: s_" + lambda.to_string() + "(1_M) vanishes for M = " + ch.m.to_string());
  return RationalFunction(symfun::schur_at_identity(lambda, ch.n1) * symfun::schur_at_identity(lambda, ch.n2), den);
}

/// The same ratio with the extra 1/n! of the printed display, kept for
/// reporting; it differs from schur_moment_T by exactly n!.
inline RationalFunction schur_moment_T_printed(const Partition& lambda, const Channels& ch = Channels::symbolic()) {
  return schur_moment_T(lambda, ch) / RationalFunction(mpq_class(symfun::factorial(lambda.weight())));
}

/// Two exact routes to the same moment and whether they coincide.
struct TwoRouteResult {
  RationalFunction value;         ///< character expansion over Schur moments
  RationalFunction printed_form;  ///< closed alternating sum
  bool routes_agree = false;
  /// value / printed_form when both are nonzero.
  std::optional<RationalFunction> ratio;
};

namespace detail {

inline Polynomial rising(const Polynomial& x, int n) {
  Polynomial r(1);
  for (int k = 0; k < n; ++k) r *= x + Polynomial(static_cast<long>(k));
  return r;
}
inline Polynomial falling(const Polynomial& x, int n) {
  Polynomial r(1);
  for (int k = 0; k < n; ++k) r *= x - Polynomial(static_cast<long>(k));
  return r;
}
inline mpz_class binomial(long n, long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

inline TwoRouteResult finish(RationalFunction character_route, RationalFunction printed) {
  TwoRouteResult out{std::move(character_route), std::move(printed), false, std::nullopt};
  out.routes_agree = out.value == out.printed_form;
  if (!out.value.is_zero() && !out.printed_form.is_zero()) out.ratio = out.value / out.printed_form;
  return out;
}

}  // namespace detail

/// <Tr T^n> by the character route, cross-checked against the alternating
/// sum over p of binomial-weighted raising-factorial ratios.
inline TwoRouteResult trace_moment_T(int n, const Channels& ch = Channels::symbolic()) {
  if (n < 1) throw std::invalid_argument("trace_moment_T: n must be >= 1");
  const Polynomial n1 = algebra::var(Symbol::N1), n2 = algebra::var(Symbol::N2), m = algebra::var(Symbol::M);
  RationalFunction via_characters;
  const Partition cycle({n});
  for (const Partition& lambda : symfun::partitions_of(n)) {
    long long chi = symfun::character(lambda, cycle);
    if (chi != 0) via_characters += RationalFunction(static_cast<long>(chi)) * schur_moment_T(lambda);
  }
  RationalFunction printed;
  const mpq_class inv_fact(1, symfun::factorial(n));
  for (int p = 0; p < n; ++p) {
    mpq_class c = inv_fact * detail::binomial(n - 1, p) * (p % 2 == 0 ? 1 : -1);
    Polynomial shift(static_cast<long>(p));
    Polynomial num = detail::rising(n1 - shift, n) * detail::rising(n2 - shift, n);
    num.scale(GaussianRational(c));
    printed += RationalFunction(num, detail::rising(m - shift, n));
  }
  return detail::finish(at_channels(via_characters, ch), at_channels(printed, ch));
}

struct VarianceResult {
  RationalFunction closed_form;      ///< N1^2 N2^2 / (M^2 (M^2 - 1))
  RationalFunction character_route;  ///< <s_(2)> + <s_(1,1)> - <s_(1)>^2
};

/// Conductance variance by both routes.  With independent symbols the two
/// differ; they agree once M = N1 + N2 is imposed.
inline VarianceResult conductance_variance(const Channels& ch = Channels::symbolic()) {
  const RationalFunction n1(ch.n1), n2(ch.n2), m(ch.m);
  RationalFunction closed = n1 * n1 * n2 * n2 / (m * m * (m * m - RationalFunction(1)));
  RationalFunction mean = schur_moment_T(Partition{1}, ch);
  RationalFunction second = schur_moment_T(Partition{2}, ch) + schur_moment_T(Partition{1, 1}, ch);
  return {closed, second - mean * mean};
}

// ---------------------------------------------------------------------------
// Time-delay eigenvalues (inverse Laguerre ensemble)

/// Unnormalized |Delta(Q)|^2 det(Q)^{-(3M-2)} exp(-M tau_D Tr Q^{-1}).
inline double inverse_laguerre_density(std::span<const double> q, int m, double tau_d) {
  if (static_cast<int>(q.size()) != m) throw std::invalid_argument("inverse_laguerre_density: expected M eigenvalues");
  if (!(tau_d > 0)) throw std::domain_error("inverse_laguerre_density: tau_D must be positive");
  double log_det = 0.0, trace_inv = 0.0, vandermonde = 1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0)) throw std::domain_error("inverse_laguerre_density: eigenvalues must be positive");
    log_det += std::log(q[i]);
    trace_inv += 1.0 / q[i];
    for (std::size_t j = i + 1; j < q.size(); ++j) vandermonde *= q[j] - q[i];
  }
  return vandermonde * vandermonde * std::exp(-(3.0 * m - 2.0) * log_det - m * tau_d * trace_inv);
}

/// Integral of |Delta(G)|^2 det(G)^M exp(-M tau_D Tr G) over positive G:
/// (M tau_D)^{-2M^2} prod_{i=1}^M i! (M+i-1)!.
inline mpq_class laguerre_normalization(int m, const mpq_class& tau_d) {
  if (m < 1) throw std::domain_error("laguerre_normalization: M must be >= 1");
  if (sgn(tau_d) <= 0) throw std::domain_error("laguerre_normalization: tau_D must be positive");
  mpq_class prod = 1;
  for (int i = 1; i <= m; ++i) prod *= mpq_class(symfun::factorial(i) * symfun::factorial(m + i - 1));
  mpq_class base = m * tau_d;
  mpq_class scale = 1;
  for (int k = 0; k < 2 * m * m; ++k) scale *= base;
  mpq_class r = prod / scale;
  r.canonicalize();
  return r;
}

/// <s_lambda(Q)> = (M tau_D)^{|lambda|} (d_lambda/|lambda|!) [M]^(lambda) / [M]_(lambda).
inline RationalFunction schur_moment_Q(const Partition& lambda, const Polynomial& m = algebra::var(Symbol::M),
                                       const RationalFunction& tau_d = algebra::rvar(Symbol::TauD)) {
  Polynomial den = symfun::falling_factorial_gen(lambda, m);
  if (den.is_zero())
    throw std::domain_error("schur_moment_Q: [M]_(lambda) vanishes for lambda = " + lambda.to_string() + ", M = " + m.to_string());
  mpq_class c(symfun::dim_sym(lambda), symfun::factorial(lambda.weight()));
  c.canonicalize();
  Polynomial num = symfun::raising_factorial_gen(lambda, m);
  num.scale(GaussianRational(c));
  return algebra::pow(RationalFunction(m) * tau_d, lambda.weight()) * RationalFunction(num, den);
}

/// <Tr Q^n> by the character route; `printed_form` evaluates the closed
/// alternating sum with its double 1/n! exactly as printed, and `ratio`
/// exposes the discrepancy factor between the two.
inline TwoRouteResult trace_moment_Q(int n, const Polynomial& m = algebra::var(Symbol::M),
                                     const RationalFunction& tau_d = algebra::rvar(Symbol::TauD)) {
  if (n < 1) throw std::invalid_argument("trace_moment_Q: n must be >= 1");
  const Polynomial ms = algebra::var(Symbol::M);
  RationalFunction via_characters;
  const Partition cycle({n});
  for (const Partition& lambda : symfun::partitions_of(n)) {
    long long chi = symfun::character(lambda, cycle);
    if (chi != 0) via_characters += RationalFunction(static_cast<long>(chi)) * schur_moment_Q(lambda, ms, tau_d);
  }
  RationalFunction sum;
  const mpq_class inv_fact(1, symfun::factorial(n));
  for (int p = 0; p < n; ++p) {
    mpq_class c = inv_fact * detail::binomial(n - 1, p) * (p % 2 == 0 ? 1 : -1);
    Polynomial shift(static_cast<long>(p));
    Polynomial num = detail::rising(ms - shift, n);
    num.scale(GaussianRational(c));
    sum += RationalFunction(num, detail::falling(ms + shift, n));
  }
  RationalFunction printed = algebra::pow(RationalFunction(ms) * tau_d, n) * RationalFunction(inv_fact) * sum;
  auto eval = [&](const RationalFunction& f) { return f.substitute(Symbol::M, RationalFunction(m)); };
  return detail::finish(eval(via_characters), eval(printed));
}

// ---------------------------------------------------------------------------
// Tunnel barrier results

struct TauW2Result {
  RationalFunction value;  ///< <tau_W^2> / tau_D^2
  bool dropped_exponential_term = false;  ///< R^{M+1} omitted (symbolic M)
};

/// <tau_W^2>/tau_D^2 = 1 + 2(1 - R^{M+1}) / ((1-R)^2 (M^2-1)).  With numeric
/// M the full formula is returned; with symbolic M the R^{M+1} term cannot be
/// represented and is dropped (flagged in the result).
inline TauW2Result tau_w2_barrier(std::optional<int> m, const RationalFunction& r = algebra::rvar(Symbol::R)) {
  if (r == RationalFunction(1)) throw std::domain_error("tau_w2_barrier: R = 1 is a pole");
  const RationalFunction one(1);
  if (m) {
    if (*m <= 1) throw std::domain_error("tau_w2_barrier: requires M >= 2");
    RationalFunction mm(static_cast<long>(*m));
    return {one + RationalFunction(2) * (one - algebra::pow(r, *m + 1)) / ((one - r) * (one - r) * (mm * mm - one)), false};
  }
  RationalFunction mm = algebra::rvar(Symbol::M);
  return {one + RationalFunction(2) / ((one - r) * (one - r) * (mm * mm - one)), true};
}

struct MeanDelayIdentityReport {
  RationalFunction closed_form;  ///< (1-R)^2 tau_D sum_k k R^{k-1}, resummed
  RationalFunction truncated;    ///< the same sum cut after `terms` terms
  RationalFunction residual;     ///< tau_D minus the truncated sum
  int residual_order = 0;        ///< lowest power of R in the residual
  bool identity_holds = false;   ///< closed form equals tau_D
};

/// Prompt-reflection telescoping: (1-R)(tau_D + 2 tau_D R + 3 tau_D R^2 + ...)(1-R) = tau_D.
inline MeanDelayIdentityReport barrier_mean_delay_identity(int terms, const RationalFunction& r = algebra::rvar(Symbol::R)) {
  if (terms < 1) throw std::invalid_argument("barrier_mean_delay_identity: need at least one term");
  const RationalFunction one(1), tau = algebra::rvar(Symbol::TauD);
  const RationalFunction gate = (one - r) * (one - r);
  RationalFunction series;
  RationalFunction rp = one;
  for (int k = 1; k <= terms; ++k) {
    series += RationalFunction(static_cast<long>(k)) * tau * rp;
    rp *= r;
  }
  MeanDelayIdentityReport rep;
  // sum_k k R^{k-1} = 1/(1-R)^2 for |R| < 1
  rep.closed_form = gate * tau / ((one - r) * (one - r));
  rep.truncated = gate * series;
  rep.residual = tau - rep.truncated;
  rep.identity_holds = rep.closed_form == tau;
  if (rep.residual.is_zero() || !rep.residual.is_polynomial()) {
    rep.residual_order = rep.residual.is_zero() ? terms : 0;
  } else {
    rep.residual_order = rep.residual.numerator().low_degree(Symbol::R);
  }
  return rep;
}

}  // namespace qtransport::exact
