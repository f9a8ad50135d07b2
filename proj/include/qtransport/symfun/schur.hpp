#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "qtransport/algebra/rational_function.hpp"
#include "qtransport/symfun/partition.hpp"

namespace qtransport::symfun {

using algebra::Polynomial;
using algebra::RationalFunction;

/// [x]^(lambda) = prod_i (x - i + 1)^(lambda_i), with (y)^(m) the raising factorial.
inline Polynomial raising_factorial_gen(const Partition& lambda, const Polynomial& x) {
  Polynomial r(1);
  for (int i = 1; i <= lambda.length(); ++i)
    for (int k = 0; k < lambda.part(i); ++k) r *= x + Polynomial(static_cast<long>(k - i + 1));
  return r;
}

/// [x]_(lambda) = prod_i (x + i - 1)_(lambda_i), with (y)_(m) the falling factorial.
inline Polynomial falling_factorial_gen(const Partition& lambda, const Polynomial& x) {
  Polynomial r(1);
  for (int i = 1; i <= lambda.length(); ++i)
    for (int k = 0; k < lambda.part(i); ++k) r *= x + Polynomial(static_cast<long>(i - 1 - k));
  return r;
}

/// s_lambda evaluated at the d x d identity: (d_lambda / n!) [d]^(lambda).
/// `d` may be a number or a polynomial in the formal symbols.
inline Polynomial schur_at_identity(const Partition& lambda, const Polynomial& d) {
  mpq_class c(dim_sym(lambda), factorial(lambda.weight()));
  c.canonicalize();
  Polynomial r = raising_factorial_gen(lambda, d);
  r.scale(algebra::GaussianRational(c));
  return r;
}

namespace detail {

template <typename T>
T determinant(std::vector<T> a, std::size_t n) {
  T det = T(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == T(0)) return T(0);
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      det = -det;
    }
    det *= a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      T f = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

}  // namespace detail

/// Complete homogeneous symmetric polynomials h_0..h_max at the given points,
/// from power sums via Newton's identities k h_k = sum_i p_i h_{k-i}.
template <typename T>
std::vector<T> complete_homogeneous(std::span<const T> x, int max_degree) {
  std::vector<T> p(static_cast<std::size_t>(max_degree) + 1, T(0));
  for (const T& v : x) {
    T pw = T(1);
    for (int k = 1; k <= max_degree; ++k) {
      pw *= v;
      p[static_cast<std::size_t>(k)] += pw;
    }
  }
  std::vector<T> h(static_cast<std::size_t>(max_degree) + 1, T(0));
  h[0] = T(1);
  for (int k = 1; k <= max_degree; ++k) {
    T acc = T(0);
    for (int i = 1; i <= k; ++i) acc += p[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(k - i)];
    h[static_cast<std::size_t>(k)] = acc / static_cast<double>(k);
  }
  return h;
}

/// Numeric Schur polynomial via the Jacobi-Trudi determinant
/// s_lambda = det[h_{lambda_i - i + j}], which stays well defined at
/// coincident points.
template <typename T>
T schur_eval(const Partition& lambda, std::span<const T> x) {
  const int l = lambda.length();
  if (l == 0) return T(1);
  if (static_cast<std::size_t>(l) > x.size()) return T(0);
  const int top = lambda.part(1) + l - 1;
  auto h = complete_homogeneous<T>(x, top);
  auto hk = [&](int k) { return k < 0 ? T(0) : h[static_cast<std::size_t>(k)]; };
  std::vector<T> m(static_cast<std::size_t>(l * l));
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) m[static_cast<std::size_t>(i * l + j)] = hk(lambda.part(i + 1) - (i + 1) + (j + 1));
  return detail::determinant(std::move(m), static_cast<std::size_t>(l));
}

inline double schur_eval(const Partition& lambda, const std::vector<double>& x) {
  return schur_eval<double>(lambda, std::span<const double>(x));
}

}  // namespace qtransport::symfun
