#include "evcast/aging.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "evcast/prediction.hpp"

namespace evcast {

AgingKind aging_kind_from_string(const std::string& s) {
  if (s == "none") return AgingKind::none;
  if (s == "linear") return AgingKind::linear;
  if (s == "exponential" || s == "exp") return AgingKind::exponential;
  throw std::invalid_argument("unknown aging kind: " + s);
}

std::string to_string(AgingKind kind) {
  switch (kind) {
    case AgingKind::none: return "none";
    case AgingKind::linear: return "linear";
    case AgingKind::exponential: return "exponential";
  }
  throw std::logic_error("bad AgingKind");
}

void AgingPolicy::validate() const {
  if (k < 0) throw std::invalid_argument("aging: k must be non-negative");
  if (kind == AgingKind::linear) {
    if (k > 1) throw std::invalid_argument("linear aging: k must lie in [0,1]");
    if (n_window != 0 && n_window < 2)
      throw std::invalid_argument("linear aging: n_window must be >= 2");
  }
}

double linear_weight(int i, const AgingPolicy& policy) {
  if (policy.kind != AgingKind::linear)
    throw std::invalid_argument("linear_weight: policy kind is not linear");
  if (policy.n_window < 2)
    throw std::invalid_argument("linear_weight: n_window must be >= 2");
  if (i < 1 || i > policy.n_window)
    throw std::out_of_range("linear_weight: index " + std::to_string(i) +
                            " outside [1," + std::to_string(policy.n_window) + "]");
  return -(2.0 * policy.k / (policy.n_window - 1)) * (i - 1) + policy.k + 1.0;
}

double exponential_weight(int i, const AgingPolicy& policy) {
  if (policy.kind != AgingKind::exponential)
    throw std::invalid_argument("exponential_weight: policy kind is not exponential");
  if (i < 1) throw std::out_of_range("exponential_weight: index must be >= 1");
  return std::exp(-policy.k * i);
}

double aging_weight(int i, const AgingPolicy& policy) {
  switch (policy.kind) {
    case AgingKind::none: return 1.0;
    case AgingKind::linear: return linear_weight(i, policy);
    case AgingKind::exponential: return exponential_weight(i, policy);
  }
  throw std::logic_error("bad AgingKind");
}

double merge_probability(std::span<const Extraction> extractions,
                         const AgingPolicy& policy, std::int64_t t) {
  if (extractions.empty())
    throw std::invalid_argument("merge_probability: no extractions");
  double num = 0.0, den = 0.0;
  for (const Extraction& e : extractions) {
    if (e.extracted_at > t)
      throw std::invalid_argument("merge_probability: extraction in the future");
    const int i = static_cast<int>(t - e.extracted_at) + 1;
    const double w = aging_weight(i, policy);
    num += w * e.p;
    den += w;
  }
  if (den == 0.0) throw std::runtime_error("merge_probability: zero weight sum");
  return num / den;
}

RulePool::RulePool(int delta_mem, AgingPolicy policy)
    : delta_mem_(delta_mem), policy_(policy) {
  if (delta_mem < 1) throw std::invalid_argument("pool: delta_mem must be >= 1");
  policy_.validate();
  if (policy_.kind == AgingKind::linear) {
    if (policy_.n_window == 0) policy_.n_window = std::max(2, delta_mem_);
    if (policy_.n_window < delta_mem_)
      throw std::invalid_argument(
          "pool: linear aging n_window must cover the memory window");
  }
}

void RulePool::update(std::span<const ProbTemporalRule> new_rules, std::int64_t t) {
  if (t < t_) throw std::invalid_argument("pool: time must be non-decreasing");
  t_ = t;
  for (const ProbTemporalRule& rule : new_rules)
    entries_[rule_key(rule)].extractions.push_back(Extraction{t, rule.p});

  const std::int64_t oldest = t_ - delta_mem_;  // keep extracted_at > oldest
  for (auto it = entries_.begin(); it != entries_.end();) {
    auto& exts = it->second.extractions;
    std::erase_if(exts, [&](const Extraction& e) { return e.extracted_at <= oldest; });
    if (exts.empty()) {
      it = entries_.erase(it);
    } else {
      it->second.merged_p = merge_probability(exts, policy_, t_);
      ++it;
    }
  }
}

double RulePool::merged_probability(const RuleKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? -1.0 : it->second.merged_p;
}

void RulePool::dump(std::ostream& out, const NameTable& names) const {
  for (const auto& [key, entry] : entries_) {
    const Extraction& last = entry.extractions.back();
    ProbTemporalRule rule{key.body, key.head, key.horizon, last.p, last.extracted_at};
    std::string record = rule_to_json(rule, names);
    // splice the pool fields into the rule record
    record.pop_back();  // trailing '}'
    record += ",\"merged_p\":" + format_double(entry.merged_p) +
              ",\"extraction_count\":" + std::to_string(entry.extractions.size()) + "}";
    out << record << '\n';
  }
}

}  // namespace evcast
