#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evcast {

/// One synchronized row of n numeric readings at logical step t.
/// The original time-column text is kept as opaque metadata; all
/// processing indexes by t.
struct ContextVector {
  std::int64_t t = 0;
  std::vector<double> values;
  std::string stamp;  // raw time-column cell, informational only

  friend bool operator==(const ContextVector& a, const ContextVector& b) {
    return a.t == b.t && a.values == b.values;
  }
};

/// Binary image of a ContextVector: flags[i] = 1 marks an abrupt change
/// detected on stream i at step t.
struct EventVector {
  std::int64_t t = 0;
  std::vector<std::uint8_t> flags;

  friend bool operator==(const EventVector&, const EventVector&) = default;
};

/// A set of event-type indices active at one step. The empty set is a
/// first-class symbol (a step with no events). Ids are kept sorted and
/// unique so set equality is representation equality.
class EventSymbol {
 public:
  EventSymbol() = default;
  explicit EventSymbol(std::vector<int> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    if (!ids_.empty() && ids_.front() < 0)
      throw std::invalid_argument("EventSymbol: negative event index");
  }

  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<int>& ids() const { return ids_; }

  bool contains(int id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }

  /// Activity at one step: a non-empty symbol is active iff all of its
  /// events are flagged; the empty symbol is active iff no event is.
  bool active_in(const EventVector& ev) const {
    if (ids_.empty())
      return std::none_of(ev.flags.begin(), ev.flags.end(),
                          [](std::uint8_t f) { return f != 0; });
    for (int id : ids_) {
      if (id >= static_cast<int>(ev.flags.size()) || ev.flags[id] == 0)
        return false;
    }
    return true;
  }

  friend auto operator<=>(const EventSymbol&, const EventSymbol&) = default;

 private:
  std::vector<int> ids_;
};

/// Stream/event names, index <-> name. Built from the CSV header or a
/// caller-supplied list; defaults to s1..sn.
class NameTable {
 public:
  NameTable() = default;
  explicit NameTable(std::vector<std::string> names) : names_(std::move(names)) {}

  static NameTable numbered(std::size_t n, const std::string& prefix = "s") {
    std::vector<std::string> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i + 1));
    return NameTable(std::move(v));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }

  int index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw std::invalid_argument("unknown event name: " + name);
  }

 private:
  std::vector<std::string> names_;
};

/// Symbol display form: bare name for singletons, {a,b} for larger sets,
/// {} for the empty symbol.
std::string symbol_to_string(const EventSymbol& sym, const NameTable& names);

/// Shortest round-trip decimal text for a double (deterministic output).
std::string format_double(double v);

}  // namespace evcast
