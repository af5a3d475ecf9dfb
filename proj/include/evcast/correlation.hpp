#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "evcast/types.hpp"

namespace evcast {

/// Event symbols contributed by one step: the empty symbol when nothing is
/// flagged, otherwise every non-empty subset of the active set with at most
/// k_max events.
std::vector<EventSymbol> symbols_for_step(const EventVector& ev, int k_max);

/// Upper bound on distinct symbols: sum_{i=0}^{k_max} C(n, i).
std::uint64_t node_budget(int n, int k_max);

struct ForestParams {
  int m = 1;      // maximum context order
  int l = 1;      // prediction horizon
  int k_max = 1;  // maximum events per symbol
};

/// Node of a frequency tree: an event symbol plus the number of times the
/// root..node symbol tuple occurred as a contiguous subsequence ending at
/// any step seen so far. prev/stamp realize the one-step-lagged count
/// needed by path probabilities.
struct PatternNode {
  EventSymbol symbol;
  std::uint64_t count = 0;
  std::uint64_t prev = 0;
  std::int64_t stamp = -1;  // step of the last increment
  std::map<EventSymbol, std::unique_ptr<PatternNode>> children;

  /// N_v^{t-1}: count as of the end of the previous step.
  std::uint64_t count_before(std::int64_t t) const {
    return stamp == t ? prev : count;
  }
};

/// Collection of frequency trees keyed by root symbol (variable-order
/// Markov model). One tree per root; sequences of length up to m+l are
/// counted, so tree height is at most m+l-1.
class PatternForest {
 public:
  PatternForest(int n, ForestParams params);

  int stream_count() const { return n_; }
  const ForestParams& params() const { return params_; }
  std::int64_t steps() const { return t_; }

  /// Incorporate the event vector for the next step (ev.t must equal
  /// steps()). Every symbol tuple over the last m+l steps ending at this
  /// step has its node count incremented.
  void update(const EventVector& ev);

  /// N_r^t / t for a root symbol; 0 when the tree does not exist.
  /// Undefined (throws) before the first step.
  double prior_probability(const EventSymbol& root) const;

  /// N_v^t / N_u^{t-1} for a stored path of length >= 2; 0 when the final
  /// node is absent; clamped to [0,1].
  double path_probability(std::span<const EventSymbol> path) const;

  const PatternNode* find(std::span<const EventSymbol> path) const;
  std::size_t tree_count() const { return trees_.size(); }
  const std::map<EventSymbol, std::unique_ptr<PatternNode>>& trees() const {
    return trees_;
  }

  /// Symbol sets of the most recent steps, oldest first (at most m+l).
  const std::deque<std::vector<EventSymbol>>& window() const { return window_; }
  /// The suffix of the window used for prediction contexts (last m steps).
  std::vector<std::vector<EventSymbol>> context_window() const;

  /// Visit every node as (path-from-root, node), depth-first in symbol
  /// order. Deterministic.
  void for_each_node(
      const std::function<void(std::span<const EventSymbol>, const PatternNode&)>& fn)
      const;

  /// Line-oriented snapshot: depth, path symbols joined by '>', count,
  /// prev_count; tab-separated, one node per line.
  void dump(std::ostream& out, const NameTable& names) const;

 private:
  int n_;
  ForestParams params_;
  std::int64_t t_ = 0;
  std::map<EventSymbol, std::unique_ptr<PatternNode>> trees_;
  std::deque<std::vector<EventSymbol>> window_;  // last m+l steps' symbols
};

}  // namespace evcast
