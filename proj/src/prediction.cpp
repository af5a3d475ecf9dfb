#include "evcast/prediction.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace evcast {

std::vector<std::vector<EventSymbol>> match_suffixes(
    const PatternForest& forest, std::span<const std::vector<EventSymbol>> window) {
  std::vector<std::vector<EventSymbol>> matches;
  const std::size_t w = window.size();
  for (std::size_t len = 1; len <= w; ++len) {
    // one symbol per step over the suffix of length len
    std::vector<EventSymbol> path(len);
    auto choose = [&](auto&& self, std::size_t depth) -> void {
      if (depth == len) {
        const PatternNode* node = forest.find(path);
        if (node && node->count > 0) matches.push_back(path);
        return;
      }
      for (const EventSymbol& sym : window[w - len + depth]) {
        path[depth] = sym;
        self(self, depth + 1);
      }
    };
    choose(choose, 0);
  }
  return matches;
}

namespace {

struct Candidate {
  double p;
  std::vector<EventSymbol> context;
};

}  // namespace

std::vector<Prediction> predict(const PatternForest& forest,
                                std::span<const std::vector<EventSymbol>> window,
                                int m, int l, double p_thr) {
  if (p_thr < 0.0 || p_thr > 1.0)
    throw std::invalid_argument("p_thr must lie in [0,1]");
  std::span<const std::vector<EventSymbol>> ctx_window =
      window.size() > static_cast<std::size_t>(m)
          ? window.subspan(window.size() - static_cast<std::size_t>(m))
          : window;

  // best candidate per (horizon, symbol): longest context, ties by higher p
  std::map<std::pair<int, EventSymbol>, Candidate> best;
  for (auto& context : match_suffixes(forest, ctx_window)) {
    const PatternNode* node = forest.find(context);
    std::vector<EventSymbol> path = context;
    auto walk = [&](auto&& self, const PatternNode& at, int depth, double p) -> void {
      if (depth == l) return;
      for (const auto& [sym, child] : at.children) {
        path.push_back(sym);
        double edge = forest.path_probability(path);
        double total = p * edge;
        if (total >= p_thr && total > 0.0) {
          auto key = std::make_pair(depth + 1, sym);
          auto it = best.find(key);
          if (it == best.end() ||
              context.size() > it->second.context.size() ||
              (context.size() == it->second.context.size() && total > it->second.p)) {
            best[key] = Candidate{total, context};
          }
          // recurse only while above threshold: edge probabilities are <= 1,
          // so the product cannot climb back
          self(self, *child, depth + 1, total);
        }
        path.pop_back();
      }
    };
    walk(walk, *node, 0, 1.0);
  }

  std::vector<Prediction> out;
  out.reserve(best.size());
  for (auto& [key, cand] : best)
    out.push_back(Prediction{key.first, key.second, cand.p, std::move(cand.context)});
  return out;
}

std::vector<Prediction> predict(const PatternForest& forest, double p_thr) {
  auto window = forest.context_window();
  return predict(forest, window, forest.params().m, forest.params().l, p_thr);
}

std::vector<ProbTemporalRule> emit_rules(std::span<const Prediction> preds,
                                         std::int64_t t) {
  std::vector<ProbTemporalRule> rules;
  rules.reserve(preds.size());
  for (const Prediction& pred : preds) {
    ProbTemporalRule rule;
    const int len = static_cast<int>(pred.context.size());
    for (int i = 0; i < len; ++i)
      rule.body.push_back(
          BodyAtom{i - (len - 1), pred.context[static_cast<std::size_t>(i)]});
    rule.head = pred.symbol;
    rule.horizon = pred.horizon;
    rule.p = pred.p;
    rule.extracted_at = t;
    rules.push_back(std::move(rule));
  }
  return rules;
}

namespace {

nlohmann::json symbol_to_json(const EventSymbol& sym, const NameTable& names) {
  nlohmann::json events = nlohmann::json::array();
  for (int id : sym.ids()) events.push_back(names.name(id));
  return nlohmann::json{{"events", std::move(events)}};
}

EventSymbol symbol_from_json(const nlohmann::json& j, const NameTable& names) {
  std::vector<int> ids;
  for (const auto& name : j.at("events"))
    ids.push_back(names.index_of(name.get<std::string>()));
  return EventSymbol(std::move(ids));
}

}  // namespace

std::string rule_to_json(const ProbTemporalRule& rule, const NameTable& names) {
  nlohmann::json body = nlohmann::json::array();
  for (const BodyAtom& atom : rule.body) {
    auto j = symbol_to_json(atom.symbol, names);
    j["offset"] = atom.offset;
    body.push_back(std::move(j));
  }
  nlohmann::json j{{"body", std::move(body)},
                   {"head", symbol_to_json(rule.head, names)},
                   {"horizon", rule.horizon},
                   {"p", rule.p},
                   {"extracted_at", rule.extracted_at}};
  return j.dump();
}

ProbTemporalRule rule_from_json(const std::string& line, const NameTable& names) {
  nlohmann::json j = nlohmann::json::parse(line);
  ProbTemporalRule rule;
  for (const auto& atom : j.at("body"))
    rule.body.push_back(
        BodyAtom{atom.at("offset").get<int>(), symbol_from_json(atom, names)});
  rule.head = symbol_from_json(j.at("head"), names);
  rule.horizon = j.at("horizon").get<int>();
  rule.p = j.at("p").get<double>();
  rule.extracted_at = j.at("extracted_at").get<std::int64_t>();
  return rule;
}

}  // namespace evcast
