#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtransport/symfun/partition.hpp"

namespace qtransport::symfun {

namespace detail {

/// Memo for Murnaghan-Nakayama keyed on (lambda, mu); shared by all threads.
class CharacterMemo {
 public:
  static CharacterMemo& instance() {
    static CharacterMemo memo;
    return memo;
  }
  bool find(const Partition& lambda, const Partition& mu, long long& value) const {
    std::shared_lock lock(mutex_);
    auto it = values_.find({lambda, mu});
    if (it == values_.end()) return false;
    value = it->second;
    return true;
  }
  void store(const Partition& lambda, const Partition& mu, long long value) {
    std::unique_lock lock(mutex_);
    values_.emplace(std::make_pair(lambda, mu), value);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::pair<Partition, Partition>, long long> values_;
};

inline long long murnaghan_nakayama(const Partition& lambda, const Partition& mu) {
  if (mu.empty()) return lambda.empty() ? 1 : 0;
  long long cached = 0;
  if (CharacterMemo::instance().find(lambda, mu, cached)) return cached;

  const int r = mu.part(1);
  const Partition rest(std::vector<int>(mu.parts().begin() + 1, mu.parts().end()));
  const int l = lambda.length();
  std::vector<int> beta(static_cast<std::size_t>(l));
  for (int i = 1; i <= l; ++i) beta[static_cast<std::size_t>(i - 1)] = lambda.part(i) + l - i;

  long long total = 0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const int target = beta[k] - r;
    if (target < 0 || std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    // Rim-hook height: beta numbers strictly between target and beta[k].
    int height = 0;
    for (int b : beta)
      if (b > target && b < beta[k]) ++height;
    std::vector<int> next = beta;
    next[k] = target;
    std::sort(next.begin(), next.end(), std::greater<>());
    std::vector<int> parts;
    for (int i = 0; i < l; ++i) {
      int p = next[static_cast<std::size_t>(i)] - (l - 1 - i);
      if (p > 0) parts.push_back(p);
    }
    const long long sub = murnaghan_nakayama(Partition(std::move(parts)), rest);
    total += (height % 2 == 0) ? sub : -sub;
  }
  CharacterMemo::instance().store(lambda, mu, total);
  return total;
}

}  // namespace detail

/// Irreducible character chi^lambda evaluated on the class of cycle type mu.
inline long long character(const Partition& lambda, const Partition& mu) {
  if (lambda.weight() != mu.weight())
    throw std::invalid_argument("character: weight mismatch between " + lambda.to_string() + " and " + mu.to_string());
  return detail::murnaghan_nakayama(lambda, mu);
}

/// Full character table of S_n with rows and columns in partitions_of(n) order.
class CharacterTable {
 public:
  explicit CharacterTable(int n) : n_(n), partitions_(partitions_of(n)) {
    const std::size_t p = partitions_.size();
    values_.assign(p * p, 0);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) values_[a * p + b] = character(partitions_[a], partitions_[b]);
  }

  int weight() const { return n_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  long long operator()(std::size_t lambda, std::size_t mu) const { return values_[lambda * partitions_.size() + mu]; }
  long long at(const Partition& lambda, const Partition& mu) const { return (*this)(index_of(lambda), index_of(mu)); }

  std::size_t index_of(const Partition& p) const {
    auto it = std::find(partitions_.begin(), partitions_.end(), p);
    if (it == partitions_.end()) throw std::invalid_argument("CharacterTable: " + p.to_string() + " is not a partition of " + std::to_string(n_));
    return static_cast<std::size_t>(it - partitions_.begin());
  }

 private:
  int n_;
  std::vector<Partition> partitions_;
  std::vector<long long> values_;
};

/// p_mu = sum_lambda chi^lambda(mu) s_lambda; zero coefficients omitted.
inline std::map<Partition, long long> powersum_to_schur(const Partition& mu) {
  std::map<Partition, long long> out;
  for (const Partition& lambda : partitions_of(mu.weight())) {
    long long c = character(lambda, mu);
    if (c != 0) out.emplace(lambda, c);
  }
  return out;
}

/// s_lambda = sum_mu chi^lambda(mu) / z_mu p_mu.
inline std::map<Partition, mpq_class> schur_to_powersum(const Partition& lambda) {
  std::map<Partition, mpq_class> out;
  for (const Partition& mu : partitions_of(lambda.weight())) {
    long long c = character(lambda, mu);
    if (c == 0) continue;
    mpq_class q(mpz_class(static_cast<long>(c)), z_mu(mu));
    q.canonicalize();
    out.emplace(mu, q);
  }
  return out;
}

}  // namespace qtransport::symfun
