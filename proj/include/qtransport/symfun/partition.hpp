#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace qtransport::symfun {

/// Integer partition: a non-increasing sequence of positive parts.
/// Immutable; ordered lexicographically by parts.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw std::invalid_argument("Partition: parts must be positive, got " + to_string());
      if (i > 0 && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("Partition: parts must be non-increasing, got " + to_string());
    }
  }
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  int weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  int length() const { return static_cast<int>(parts_.size()); }
  bool empty() const { return parts_.empty(); }
  /// 1-based part access; zero beyond the length.
  int part(int i) const { return i >= 1 && i <= length() ? parts_[static_cast<std::size_t>(i - 1)] : 0; }

  Partition conjugate() const {
    std::vector<int> c;
    if (!parts_.empty()) {
      c.assign(static_cast<std::size_t>(parts_.front()), 0);
      for (int p : parts_)
        for (int j = 0; j < p; ++j) ++c[static_cast<std::size_t>(j)];
    }
    return Partition(std::move(c));
  }
  bool is_self_conjugate() const { return conjugate() == *this; }

  /// Multiplicity of part size k.
  int multiplicity(int k) const { return static_cast<int>(std::count(parts_.begin(), parts_.end(), k)); }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
    return s + "]";
  }

 private:
  std::vector<int> parts_;
};

inline void to_json(nlohmann::json& j, const Partition& p) { j = p.parts(); }
inline void from_json(const nlohmann::json& j, Partition& p) {
  if (!j.is_array()) throw std::invalid_argument("partition must be a JSON array of integers");
  std::vector<int> parts;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw std::invalid_argument("partition must be a JSON array of integers");
    parts.push_back(v.get<int>());
  }
  p = Partition(std::move(parts));
}

/// Parses "[2,1]".  The empty array gives the empty partition.
inline Partition parse_partition(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("partition '" + text + "' is not a JSON array");
  }
  return j.get<Partition>();
}

/// All partitions of n, in decreasing lexicographic order ((n) first).
inline std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  if (n < 0) return out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int remaining, int max_part) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

inline mpz_class factorial(long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

/// Order of the centralizer of a permutation of cycle type mu:
/// prod_k k^{m_k} m_k!.
inline mpz_class z_mu(const Partition& mu) {
  mpz_class z = 1;
  for (int k = 1; k <= (mu.empty() ? 0 : mu.part(1)); ++k) {
    int m = mu.multiplicity(k);
    if (m == 0) continue;
    mpz_class kp;
    mpz_ui_pow_ui(kp.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(m));
    z *= kp * factorial(m);
  }
  return z;
}

/// Dimension of the symmetric-group irreducible representation indexed by
/// lambda, from the product formula over rows.
inline mpz_class dim_sym(const Partition& lambda) {
  const int l = lambda.length();
  mpq_class d(factorial(lambda.weight()));
  for (int i = 1; i <= l; ++i) {
    d /= mpq_class(factorial(lambda.part(i) - i + l));
    for (int j = i + 1; j <= l; ++j) d *= lambda.part(i) - lambda.part(j) + j - i;
  }
  d.canonicalize();
  return d.get_num();
}

}  // namespace qtransport::symfun
