#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "qtransport/errors.hpp"

namespace qtransport::semiclassical {

/// What a closed index cycle sums over.
enum class LabelClass : std::uint8_t {
  Internal,  ///< free index: contributes the loop fugacity N
  Lead1,     ///< channels of lead 1: N1
  Lead2,     ///< channels of lead 2: N2
  Channel,   ///< all channels: M
  Endpoint,  ///< fixed end point: 1; distinct end points may not meet
};

struct Label {
  LabelClass cls = LabelClass::Internal;
  int id = 0;
  friend bool operator==(const Label&, const Label&) = default;
};

/// Index nodes plus the Z and Z^dagger occurrences of a Gaussian average.
/// Z(row, col) and W(row, col) stand for Z_{row,col} and (Z^dagger)_{row,col}.
struct WickGraph {
  std::vector<Label> labels;
  std::vector<std::array<int, 2>> z;
  std::vector<std::array<int, 2>> w;

  int node(Label l = {}) {
    labels.push_back(l);
    return static_cast<int>(labels.size()) - 1;
  }
  /// Tr (Z Z^dagger)^q; returns the indices of its first Z and W occurrence.
  std::array<int, 2> add_vertex(int q) {
    std::array<int, 2> first{static_cast<int>(z.size()), static_cast<int>(w.size())};
    std::vector<int> a(static_cast<std::size_t>(q)), b(static_cast<std::size_t>(q));
    for (auto& x : a) x = node();
    for (auto& x : b) x = node();
    for (int k = 0; k < q; ++k) {
      z.push_back({a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)]});
      w.push_back({b[static_cast<std::size_t>(k)], a[static_cast<std::size_t>((k + 1) % q)]});
    }
    return first;
  }
  /// (Z (Z^dagger Z)^steps)_{row,col}
  void add_z_chain(int row, int col, int steps) {
    int cur = row;
    for (int s = 0; s < steps; ++s) {
      const int x = node(), y = node();
      z.push_back({cur, x});
      w.push_back({x, y});
      cur = y;
    }
    z.push_back({cur, col});
  }
  /// ((Z^dagger Z)^steps Z^dagger)_{row,col}
  void add_w_chain(int row, int col, int steps) {
    int cur = row;
    for (int s = 0; s < steps; ++s) {
      const int y = node(), x = node();
      w.push_back({cur, y});
      z.push_back({y, x});
      cur = x;
    }
    w.push_back({cur, col});
  }
};

/// Exponents of N1, N2, M and N collected from the closed cycles of a pairing.
struct FaceCount {
  int n1 = 0;
  int n2 = 0;
  int m = 0;
  int n = 0;
  friend auto operator<=>(const FaceCount&, const FaceCount&) = default;
};

namespace detail {

/// Union-find over index nodes with undo, tracking the label of each class
/// and the faces closed so far.
class CycleTracker {
 public:
  explicit CycleTracker(const std::vector<Label>& labels)
      : parent_(labels.size()), size_(labels.size(), 1), label_(labels) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) const {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }

  /// Joins a and b.  Returns false if the result is forbidden: a free loop
  /// closes while loops are filtered, or two distinct end points meet.
  bool join(int a, int b, bool keep_loops) {
    int ra = find(a), rb = find(b);
    if (ra == rb) {
      const Label& l = label_[static_cast<std::size_t>(ra)];
      history_.push_back({-1, 0, 0, {}, faces_});
      switch (l.cls) {
        case LabelClass::Internal:
          if (!keep_loops) return false;
          ++faces_.n;
          break;
        case LabelClass::Lead1: ++faces_.n1; break;
        case LabelClass::Lead2: ++faces_.n2; break;
        case LabelClass::Channel: ++faces_.m; break;
        case LabelClass::Endpoint: break;
      }
      return true;
    }
    if (size_[static_cast<std::size_t>(ra)] < size_[static_cast<std::size_t>(rb)]) std::swap(ra, rb);
    const Label la = label_[static_cast<std::size_t>(ra)], lb = label_[static_cast<std::size_t>(rb)];
    history_.push_back({rb, ra, size_[static_cast<std::size_t>(ra)], la, faces_});
    parent_[static_cast<std::size_t>(rb)] = ra;
    size_[static_cast<std::size_t>(ra)] += size_[static_cast<std::size_t>(rb)];
    if (la.cls == LabelClass::Internal) {
      label_[static_cast<std::size_t>(ra)] = lb;
    } else if (lb.cls != LabelClass::Internal) {
      if (la.cls != lb.cls) throw std::logic_error("WickGraph: incompatible channel classes joined");
      if (la.cls == LabelClass::Endpoint && la.id != lb.id) return false;
    }
    return true;
  }

  void undo() {
    const Step s = history_.back();
    history_.pop_back();
    faces_ = s.faces;
    if (s.child < 0) return;
    parent_[static_cast<std::size_t>(s.child)] = s.child;
    size_[static_cast<std::size_t>(s.root)] = s.root_size;
    label_[static_cast<std::size_t>(s.root)] = s.root_label;
  }

  const FaceCount& faces() const { return faces_; }

 private:
  struct Step {
    int child;
    int root;
    int root_size;
    Label root_label;
    FaceCount faces;
  };
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<Label> label_;
  std::vector<Step> history_;
  FaceCount faces_;
};

}  // namespace detail

/// Limits on a single enumeration.
struct EnumerationLimits {
  std::uint64_t max_steps = 20'000'000'000ULL;
};

/// Depth-first walk over all bijections Z -> W, pruned as soon as a
/// forbidden cycle appears.  `visit(perm, faces)` is called for every
/// surviving pairing.  `steps` accumulates the number of partial pairings
/// tried, for budget enforcement across calls.
template <class Visit>
void for_each_pairing(const WickGraph& g, bool keep_loops, Visit&& visit, std::atomic<std::uint64_t>& steps,
                      const EnumerationLimits& limits = {}) {
  const std::size_t n = g.z.size();
  if (n != g.w.size()) return;
  detail::CycleTracker tracker(g.labels);
  std::vector<int> perm(n, -1);
  std::vector<char> used(n, 0);
  std::uint64_t local = 0;
  auto flush = [&] {
    if (steps.fetch_add(local) + local > limits.max_steps)
      throw ResourceError("Wick enumeration exceeded its step budget", static_cast<long>(limits.max_steps));
    local = 0;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      visit(static_cast<const std::vector<int>&>(perm), tracker.faces());
      return;
    }
    const auto [m, j] = g.z[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      if (++local >= (1u << 20)) flush();
      const auto [q, r] = g.w[k];
      if (tracker.join(m, r, keep_loops)) {
        if (tracker.join(j, q, keep_loops)) {
          used[k] = 1;
          perm[i] = static_cast<int>(k);
          rec(i + 1);
          used[k] = 0;
        }
        tracker.undo();
      }
      tracker.undo();
    }
  };
  rec(0);
  flush();
}

/// Tally of surviving pairings by their face exponents.
inline std::map<FaceCount, std::int64_t> count_faces(const WickGraph& g, bool keep_loops,
                                                     std::atomic<std::uint64_t>& steps,
                                                     const EnumerationLimits& limits = {}) {
  std::map<FaceCount, std::int64_t> out;
  for_each_pairing(g, keep_loops, [&](const std::vector<int>&, const FaceCount& f) { ++out[f]; }, steps, limits);
  return out;
}

/// All bijections between z_count Z's and w_count Z^dagger's; empty when
/// the counts differ, since the Gaussian average then vanishes.
inline std::vector<std::vector<int>> wick_pairings(int z_count, int w_count) {
  std::vector<std::vector<int>> out;
  if (z_count != w_count || z_count < 0) return out;
  std::vector<int> p(static_cast<std::size_t>(z_count));
  std::iota(p.begin(), p.end(), 0);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace qtransport::semiclassical
