#include "evcast/correlation.hpp"

#include <ostream>
#include <stdexcept>

namespace evcast {

std::vector<EventSymbol> symbols_for_step(const EventVector& ev, int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  std::vector<int> active;
  for (std::size_t i = 0; i < ev.flags.size(); ++i)
    if (ev.flags[i]) active.push_back(static_cast<int>(i));
  if (active.empty()) return {EventSymbol{}};

  // all non-empty subsets of the active set with at most k_max events
  std::vector<EventSymbol> out;
  std::vector<int> combo;
  auto emit = [&](auto&& self, std::size_t start) -> void {
    if (!combo.empty()) out.emplace_back(combo);
    if (static_cast<int>(combo.size()) == k_max) return;
    for (std::size_t i = start; i < active.size(); ++i) {
      combo.push_back(active[i]);
      self(self, i + 1);
      combo.pop_back();
    }
  };
  emit(emit, 0);
  return out;
}

std::uint64_t node_budget(int n, int k_max) {
  if (n < 1 || k_max < 1 || k_max > n)
    throw std::invalid_argument("node_budget: need 1 <= k_max <= n");
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, 0)
  for (int i = 0; i <= k_max; ++i) {
    total += binom;
    binom = binom * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  }
  return total;
}

PatternForest::PatternForest(int n, ForestParams params) : n_(n), params_(params) {
  if (n < 1) throw std::invalid_argument("forest: n must be >= 1");
  if (params.m < 1 || params.l < 1)
    throw std::invalid_argument("forest: m and l must be >= 1");
  if (params.k_max < 1 || params.k_max > n)
    throw std::invalid_argument("forest: need 1 <= k_max <= n");
}

void PatternForest::update(const EventVector& ev) {
  if (ev.t != t_)
    throw std::runtime_error("forest: out-of-order step " + std::to_string(ev.t) +
                             ", expected " + std::to_string(t_));
  if (static_cast<int>(ev.flags.size()) != n_)
    throw std::invalid_argument("forest: event vector length mismatch");

  const int span = params_.m + params_.l;
  window_.push_back(symbols_for_step(ev, params_.k_max));
  if (static_cast<int>(window_.size()) > span) window_.pop_front();

  const std::int64_t now = t_;
  auto touch = [&](PatternNode& node) {
    if (node.stamp != now) {
      node.prev = node.count;
      node.stamp = now;
    }
    ++node.count;
  };

  // For each suffix of the window ending at the current step, increment the
  // node reached by every choice of one symbol per step. Nodes on the way
  // are created with count 0; only the path's final node is incremented.
  const int depth_max = static_cast<int>(window_.size());
  for (int d = 1; d <= depth_max; ++d) {
    // steps window_[depth_max - d] .. window_[depth_max - 1]
    std::vector<PatternNode*> frontier;
    for (const EventSymbol& root : window_[static_cast<std::size_t>(depth_max - d)]) {
      auto& slot = trees_[root];
      if (!slot) {
        slot = std::make_unique<PatternNode>();
        slot->symbol = root;
      }
      frontier.push_back(slot.get());
    }
    for (int step = depth_max - d + 1; step < depth_max; ++step) {
      std::vector<PatternNode*> next;
      for (PatternNode* node : frontier) {
        for (const EventSymbol& sym : window_[static_cast<std::size_t>(step)]) {
          auto& slot = node->children[sym];
          if (!slot) {
            slot = std::make_unique<PatternNode>();
            slot->symbol = sym;
          }
          next.push_back(slot.get());
        }
      }
      frontier = std::move(next);
    }
    for (PatternNode* node : frontier) touch(*node);
  }
  ++t_;
}

const PatternNode* PatternForest::find(std::span<const EventSymbol> path) const {
  if (path.empty()) return nullptr;
  auto it = trees_.find(path[0]);
  if (it == trees_.end()) return nullptr;
  const PatternNode* node = it->second.get();
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto child = node->children.find(path[i]);
    if (child == node->children.end()) return nullptr;
    node = child->second.get();
  }
  return node;
}

double PatternForest::prior_probability(const EventSymbol& root) const {
  if (t_ == 0) throw std::runtime_error("prior probability undefined at t = 0");
  auto it = trees_.find(root);
  if (it == trees_.end()) return 0.0;
  return static_cast<double>(it->second->count) / static_cast<double>(t_);
}

double PatternForest::path_probability(std::span<const EventSymbol> path) const {
  if (path.size() < 2)
    throw std::invalid_argument("path probability needs a path of length >= 2");
  if (static_cast<int>(path.size()) > params_.m + params_.l)
    throw std::invalid_argument("path longer than m + l");
  const PatternNode* parent = find(path.subspan(0, path.size() - 1));
  const PatternNode* node = find(path);
  if (!node || node->count == 0) return 0.0;
  const std::int64_t last = t_ - 1;  // step of the most recent update
  const std::uint64_t parent_prev = parent ? parent->count_before(last) : 0;
  if (parent_prev == 0)
    throw std::runtime_error("inconsistent forest: child counted before parent");
  double p = static_cast<double>(node->count) / static_cast<double>(parent_prev);
  return std::min(1.0, std::max(0.0, p));
}

std::vector<std::vector<EventSymbol>> PatternForest::context_window() const {
  std::vector<std::vector<EventSymbol>> out;
  const std::size_t take =
      std::min<std::size_t>(window_.size(), static_cast<std::size_t>(params_.m));
  for (std::size_t i = window_.size() - take; i < window_.size(); ++i)
    out.push_back(window_[i]);
  return out;
}

void PatternForest::for_each_node(
    const std::function<void(std::span<const EventSymbol>, const PatternNode&)>& fn)
    const {
  std::vector<EventSymbol> path;
  auto walk = [&](auto&& self, const PatternNode& node) -> void {
    path.push_back(node.symbol);
    fn(path, node);
    for (const auto& [sym, child] : node.children) self(self, *child);
    path.pop_back();
  };
  for (const auto& [sym, root] : trees_) walk(walk, *root);
}

void PatternForest::dump(std::ostream& out, const NameTable& names) const {
  const std::int64_t last = t_ - 1;
  for_each_node([&](std::span<const EventSymbol> path, const PatternNode& node) {
    out << path.size() << '\t';
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out << '>';
      out << symbol_to_string(path[i], names);
    }
    out << '\t' << node.count << '\t' << node.count_before(last) << '\n';
  });
}

}  // namespace evcast
