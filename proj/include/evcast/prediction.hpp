#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "evcast/correlation.hpp"
#include "evcast/ptl.hpp"
#include "evcast/types.hpp"

namespace evcast {

/// A candidate future event set: symbol expected at the given horizon with
/// probability p, supported by the matched context suffix.
struct Prediction {
  int horizon = 1;
  EventSymbol symbol;
  double p = 0.0;
  std::vector<EventSymbol> context;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Every stored forest path matching one symbol per step over some suffix
/// of the window (window = symbol sets of the last <= m steps, oldest
/// first). Deterministic order: shorter suffixes first, then symbol order.
std::vector<std::vector<EventSymbol>> match_suffixes(
    const PatternForest& forest, std::span<const std::vector<EventSymbol>> window);

/// Candidate predictions: walk children of each matched context up to l
/// levels, multiply per-edge path probabilities, keep p >= p_thr. One
/// prediction per (horizon, symbol): longest context wins, ties broken by
/// higher p.
std::vector<Prediction> predict(const PatternForest& forest,
                                std::span<const std::vector<EventSymbol>> window,
                                int m, int l, double p_thr);

/// Convenience: predict from the forest's own recent window.
std::vector<Prediction> predict(const PatternForest& forest, double p_thr);

/// Re-represent predictions as probabilistic temporal rules extracted at
/// step t (context symbols become body conjuncts at offsets -(len-1)..0).
std::vector<ProbTemporalRule> emit_rules(std::span<const Prediction> preds,
                                         std::int64_t t);

/// One rule per line as a JSON record with fields
/// body:[{offset,events}], head:{events}, horizon, p, extracted_at.
std::string rule_to_json(const ProbTemporalRule& rule, const NameTable& names);
ProbTemporalRule rule_from_json(const std::string& line, const NameTable& names);

}  // namespace evcast
