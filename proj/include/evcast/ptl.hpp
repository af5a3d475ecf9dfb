#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evcast/types.hpp"

namespace evcast {

struct Prediction;  // prediction.hpp

/// One body conjunct: a symbol required at a relative step offset
/// (non-positive, 0 = the step the rule fires from).
struct BodyAtom {
  int offset = 0;
  EventSymbol symbol;
  friend auto operator<=>(const BodyAtom&, const BodyAtom&) = default;
};

/// A -> B : [t, p] — if the body holds now, the head holds after t steps
/// with probability p.
struct ProbTemporalRule {
  std::vector<BodyAtom> body;  // offsets strictly increasing, last = 0
  EventSymbol head;
  int horizon = 1;
  double p = 0.0;
  std::int64_t extracted_at = 0;
};

/// Rule identity: body, head and horizon; p and extraction step are not
/// part of it (repeated extractions of the same dependency merge).
struct RuleKey {
  std::vector<BodyAtom> body;
  EventSymbol head;
  int horizon = 1;
  friend auto operator<=>(const RuleKey&, const RuleKey&) = default;
};

RuleKey rule_key(const ProbTemporalRule& rule);

/// Grammar:
///   rule   := body "->" symbol ":" "[" int "," prob "]"
///   body   := atom ("&" atom)*
///   atom   := symbol ("@" int)?
///   symbol := name | "{" "}" | "{" name ("," name)* "}"
/// Offsets may be omitted (consecutive offsets ending at 0 are assigned);
/// if given, they must be non-positive, strictly increasing and end at 0.
ProbTemporalRule parse_rule(std::string_view text, const NameTable& names);

/// Canonical text form; parse(format(r)) == r.
std::string format_rule(const ProbTemporalRule& rule, const NameTable& names);

/// A symbol must not be active for limit or more consecutive steps
/// ("BLK(X) : < limit").
struct BlkConstraint {
  EventSymbol symbol;
  int limit = 1;
};

/// A symbol's total activity count must fall within [min_occ, max_occ].
/// window = 0 checks the full history, otherwise only the last window steps.
struct OccConstraint {
  EventSymbol symbol;
  int min_occ = 0;
  int max_occ = 0;
  int window = 0;
};

using Constraint = std::variant<BlkConstraint, OccConstraint>;

bool check_blk(std::span<const EventVector> history, const BlkConstraint& c);
bool check_occ(std::span<const EventVector> history, const OccConstraint& c);
bool check_constraint(std::span<const EventVector> history, const Constraint& c);

/// Constraint file: one per line,
///   BLK(<events>) < <int>
///   OCC(<events>) [<int>,<int>]
/// with events comma-separated stream names.
std::vector<Constraint> parse_constraints(std::istream& in, const NameTable& names);
std::vector<Constraint> parse_constraints(const std::filesystem::path& path,
                                          const NameTable& names);

/// Drop every prediction whose hypothetical realization (its symbol active
/// at its horizon, intermediate steps inactive) would breach a run or
/// occurrence ceiling against the observed history. Lower occurrence
/// bounds never prune: they cannot be falsified mid-stream.
std::vector<Prediction> prune_predictions(std::vector<Prediction> preds,
                                          std::span<const Constraint> constraints,
                                          std::span<const EventVector> history);

}  // namespace evcast
