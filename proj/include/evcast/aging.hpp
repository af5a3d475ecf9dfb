#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "evcast/ptl.hpp"
#include "evcast/types.hpp"

namespace evcast {

enum class AgingKind { none, linear, exponential };

AgingKind aging_kind_from_string(const std::string& s);
std::string to_string(AgingKind kind);

/// Time-based forgetting weights. The recency index i counts steps back
/// from the current step, i = 1 for the current step.
struct AgingPolicy {
  AgingKind kind = AgingKind::none;
  double k = 0.0;     // decay parameter; linear requires k in [0,1]
  int n_window = 0;   // linear span n; 0 = default to the pool's memory window

  void validate() const;
};

/// -(2k/(n-1))*(i-1) + k + 1, for 1 <= i <= n_window.
double linear_weight(int i, const AgingPolicy& policy);

/// exp(-k*i).
double exponential_weight(int i, const AgingPolicy& policy);

/// Dispatch on kind; kind none is the constant weight 1.
double aging_weight(int i, const AgingPolicy& policy);

struct Extraction {
  std::int64_t extracted_at = 0;
  double p = 0.0;
  friend bool operator==(const Extraction&, const Extraction&) = default;
};

struct PoolEntry {
  std::vector<Extraction> extractions;  // within (t - mem, t], oldest first
  double merged_p = 0.0;
};

/// Weighted merge of one rule's extraction history:
/// sum(w_i * p_i) / sum(w_i) over the extraction steps only, with
/// i = (t - extracted_at) + 1.
double merge_probability(std::span<const Extraction> extractions,
                         const AgingPolicy& policy, std::int64_t t);

/// Rule extractions of the last delta_mem steps, keyed by rule identity,
/// each carrying its aging-weighted merged probability.
class RulePool {
 public:
  RulePool(int delta_mem, AgingPolicy policy);

  int memory_window() const { return delta_mem_; }
  const AgingPolicy& policy() const { return policy_; }

  /// Record this step's extracted rules, expire extractions older than the
  /// memory window, drop emptied entries, refresh merged probabilities.
  /// t must be non-decreasing across calls.
  void update(std::span<const ProbTemporalRule> new_rules, std::int64_t t);

  const std::map<RuleKey, PoolEntry>& entries() const { return entries_; }
  std::int64_t current_step() const { return t_; }

  /// Merged probability of one rule identity at the current step, or -1
  /// when absent.
  double merged_probability(const RuleKey& key) const;

  /// Snapshot: the rule JSON record plus merged_p and extraction_count,
  /// one entry per line.
  void dump(std::ostream& out, const NameTable& names) const;

 private:
  int delta_mem_;
  AgingPolicy policy_;
  std::map<RuleKey, PoolEntry> entries_;
  std::int64_t t_ = -1;
};

}  // namespace evcast
