#pragma once

// Independent reference computations used only by the tests.  Nothing here
// calls into the library routines it is meant to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

/// Number of standard Young tableaux of the given shape, by filling cells
/// with 1..n one at a time in every admissible order.
inline long count_syt(std::vector<int> shape) {
  long total = 0;
  std::vector<int> filled(shape.size(), 0);
  int remaining = std::accumulate(shape.begin(), shape.end(), 0);
  std::function<void()> rec = [&] {
    if (remaining == 0) {
      ++total;
      return;
    }
    for (std::size_t r = 0; r < shape.size(); ++r) {
      if (filled[r] >= shape[r]) continue;
      if (r > 0 && filled[r - 1] <= filled[r]) continue;
      ++filled[r];
      --remaining;
      rec();
      --filled[r];
      ++remaining;
    }
  };
  rec();
  return total;
}

/// Integer polynomial in n variables, keyed by exponent vector.
using IntPoly = std::map<std::vector<int>, long long>;

inline IntPoly multiply(const IntPoly& a, const IntPoly& b) {
  IntPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

/// Frobenius formula: chi^lambda(mu) is the coefficient of x^{lambda + delta}
/// in a_delta(x) * p_mu(x), with n = |lambda| variables.
inline long long frobenius_character(const std::vector<int>& lambda, const std::vector<int>& mu) {
  const int n = std::accumulate(mu.begin(), mu.end(), 0);
  // Vandermonde a_delta = prod_{i<j} (x_i - x_j).
  IntPoly a{{std::vector<int>(static_cast<std::size_t>(n), 0), 1}};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<int> ei(static_cast<std::size_t>(n), 0), ej(static_cast<std::size_t>(n), 0);
      ei[static_cast<std::size_t>(i)] = 1;
      ej[static_cast<std::size_t>(j)] = 1;
      a = multiply(a, IntPoly{{ei, 1}, {ej, -1}});
    }
  for (int part : mu) {
    IntPoly p;
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(i)] = part;
      p[e] += 1;
    }
    a = multiply(a, p);
  }
  std::vector<int> target(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) target[static_cast<std::size_t>(i)] = (i < static_cast<int>(lambda.size()) ? lambda[static_cast<std::size_t>(i)] : 0) + n - 1 - i;
  auto it = a.find(target);
  return it == a.end() ? 0 : it->second;
}

/// Schur polynomial as a ratio of alternants, valid for distinct points.
inline double bialternant_schur(const std::vector<int>& lambda, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (lambda.size() > n) return 0.0;
  auto det = [n](std::vector<double> m) {
    double d = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(m[r * n + c]) > std::abs(m[p * n + c])) p = r;
      if (m[p * n + c] == 0.0) return 0.0;
      if (p != c) {
        for (std::size_t k = 0; k < n; ++k) std::swap(m[p * n + k], m[c * n + k]);
        d = -d;
      }
      d *= m[c * n + c];
      for (std::size_t r = c + 1; r < n; ++r) {
        double f = m[r * n + c] / m[c * n + c];
        for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
      }
    }
    return d;
  };
  std::vector<double> num(n * n), den(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const int l = j < lambda.size() ? lambda[j] : 0;
      num[i * n + j] = std::pow(x[i], l + static_cast<int>(n - 1 - j));
      den[i * n + j] = std::pow(x[i], static_cast<int>(n - 1 - j));
    }
  return det(num) / det(den);
}

/// Gauss-Legendre nodes and weights on (0, 1).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Tensor-product quadrature of f over (0,1)^dim.
inline double integrate_unit_cube(int dim, int nodes, const std::function<double(const std::vector<double>&)>& f) {
  auto [x, w] = gauss_legendre(nodes);
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> pt(static_cast<std::size_t>(dim));
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int d = 0; d < dim; ++d) {
      pt[static_cast<std::size_t>(d)] = x[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
      weight *= w[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
    }
    total += weight * f(pt);
    int d = 0;
    while (d < dim && ++idx[static_cast<std::size_t>(d)] == nodes) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == dim) break;
  }
  return total;
}

/// Quadrature over (0, inf)^dim through the map x = s / (1 - s).
inline double integrate_positive_orthant(int dim, int nodes, const std::function<double(const std::vector<double>&)>& f) {
  return integrate_unit_cube(dim, nodes, [&](const std::vector<double>& s) {
    std::vector<double> x(s.size());
    double jac = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      x[i] = s[i] / (1.0 - s[i]);
      jac /= (1.0 - s[i]) * (1.0 - s[i]);
    }
    return f(x) * jac;
  });
}

}  // namespace oracle
