#include "evcast/ptl.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "evcast/prediction.hpp"

namespace evcast {

RuleKey rule_key(const ProbTemporalRule& rule) {
  return RuleKey{rule.body, rule.head, rule.horizon};
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool eat(std::string_view s) {
    skip_ws();
    if (text.substr(pos, s.size()) == s) {
      pos += s.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("rule syntax error at position " + std::to_string(pos) +
                             ": " + what);
  }
  std::string name() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected a name");
    return std::string(text.substr(start, pos - start));
  }
  long integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) fail("expected an integer");
    return std::stol(std::string(text.substr(start, pos - start)));
  }
  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
            text[pos] == '-' || text[pos] == '+' || text[pos] == 'e' ||
            text[pos] == 'E'))
      ++pos;
    double out = 0.0;
    auto res = std::from_chars(text.data() + start, text.data() + pos, out);
    if (res.ec != std::errc{} || res.ptr != text.data() + pos)
      fail("expected a number");
    return out;
  }
};

EventSymbol parse_symbol(Cursor& cur, const NameTable& names) {
  if (cur.eat('{')) {
    std::vector<int> ids;
    if (!cur.eat('}')) {
      do {
        ids.push_back(names.index_of(cur.name()));
      } while (cur.eat(','));
      if (!cur.eat('}')) cur.fail("expected '}'");
    }
    return EventSymbol(std::move(ids));
  }
  return EventSymbol({names.index_of(cur.name())});
}

}  // namespace

ProbTemporalRule parse_rule(std::string_view text, const NameTable& names) {
  Cursor cur{text};
  ProbTemporalRule rule;
  std::vector<std::optional<int>> offsets;
  do {
    BodyAtom atom;
    atom.symbol = parse_symbol(cur, names);
    if (cur.eat('@'))
      offsets.push_back(static_cast<int>(cur.integer()));
    else
      offsets.push_back(std::nullopt);
    rule.body.push_back(std::move(atom));
  } while (cur.eat('&'));
  if (!cur.eat("->")) cur.fail("expected '->'");
  rule.head = parse_symbol(cur, names);
  if (!cur.eat(':')) cur.fail("expected ':'");
  if (!cur.eat('[')) cur.fail("expected '['");
  rule.horizon = static_cast<int>(cur.integer());
  if (!cur.eat(',')) cur.fail("expected ','");
  rule.p = cur.number();
  if (!cur.eat(']')) cur.fail("expected ']'");
  cur.skip_ws();
  if (cur.pos != text.size()) cur.fail("trailing input");

  bool any_given = false, all_given = true;
  for (const auto& o : offsets) {
    any_given = any_given || o.has_value();
    all_given = all_given && o.has_value();
  }
  if (any_given && !all_given)
    throw std::runtime_error("rule syntax error: offsets must be given on all body "
                             "conjuncts or none");
  const int len = static_cast<int>(rule.body.size());
  for (int i = 0; i < len; ++i)
    rule.body[static_cast<std::size_t>(i)].offset =
        any_given ? *offsets[static_cast<std::size_t>(i)] : i - (len - 1);
  for (int i = 0; i < len; ++i) {
    int off = rule.body[static_cast<std::size_t>(i)].offset;
    if (off > 0) throw std::runtime_error("rule body offsets must be non-positive");
    if (i > 0 && off <= rule.body[static_cast<std::size_t>(i - 1)].offset)
      throw std::runtime_error("rule body offsets must be strictly increasing");
  }
  if (rule.body.back().offset != 0)
    throw std::runtime_error("rule body must end at offset 0");
  if (rule.horizon < 1) throw std::runtime_error("rule horizon must be >= 1");
  if (rule.p < 0.0 || rule.p > 1.0)
    throw std::runtime_error("rule probability out of range [0,1]: " +
                             format_double(rule.p));
  return rule;
}

std::string format_rule(const ProbTemporalRule& rule, const NameTable& names) {
  std::string out;
  const bool show_offsets = rule.body.size() > 1;
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i) out += " & ";
    out += symbol_to_string(rule.body[i].symbol, names);
    if (show_offsets) out += "@" + std::to_string(rule.body[i].offset);
  }
  out += " -> " + symbol_to_string(rule.head, names);
  out += " : [" + std::to_string(rule.horizon) + ", " + format_double(rule.p) + "]";
  return out;
}

bool check_blk(std::span<const EventVector> history, const BlkConstraint& c) {
  int run = 0;
  for (const auto& ev : history) {
    if (c.symbol.active_in(ev)) {
      if (++run >= c.limit) return false;
    } else {
      run = 0;
    }
  }
  return true;
}

bool check_occ(std::span<const EventVector> history, const OccConstraint& c) {
  std::size_t begin = 0;
  if (c.window > 0 && history.size() > static_cast<std::size_t>(c.window))
    begin = history.size() - static_cast<std::size_t>(c.window);
  int count = 0;
  for (std::size_t i = begin; i < history.size(); ++i)
    if (c.symbol.active_in(history[i])) ++count;
  return count >= c.min_occ && count <= c.max_occ;
}

bool check_constraint(std::span<const EventVector> history, const Constraint& c) {
  return std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, BlkConstraint>)
          return check_blk(history, cc);
        else
          return check_occ(history, cc);
      },
      c);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

EventSymbol parse_event_list(const std::string& text, const NameTable& names) {
  std::vector<int> ids;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      std::string name = trim(cur);
      if (!name.empty()) ids.push_back(names.index_of(name));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return EventSymbol(std::move(ids));
}

}  // namespace

std::vector<Constraint> parse_constraints(std::istream& in, const NameTable& names) {
  std::vector<Constraint> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "constraints line " + std::to_string(lineno); };
    auto open = line.find('(');
    auto close = line.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw std::runtime_error(where() + ": expected BLK(...) or OCC(...)");
    std::string kind = trim(line.substr(0, open));
    EventSymbol sym = parse_event_list(line.substr(open + 1, close - open - 1), names);
    std::string rest = trim(line.substr(close + 1));
    if (kind == "BLK") {
      if (rest.empty() || rest[0] != '<')
        throw std::runtime_error(where() + ": expected BLK(<events>) < <int>");
      int limit = std::stoi(trim(rest.substr(1)));
      if (limit < 1) throw std::runtime_error(where() + ": BLK limit must be >= 1");
      out.push_back(BlkConstraint{std::move(sym), limit});
    } else if (kind == "OCC") {
      auto lb = rest.find('[');
      auto comma = rest.find(',');
      auto rb = rest.find(']');
      if (lb == std::string::npos || comma == std::string::npos ||
          rb == std::string::npos || !(lb < comma && comma < rb))
        throw std::runtime_error(where() + ": expected OCC(<events>) [<int>,<int>]");
      int lo = std::stoi(trim(rest.substr(lb + 1, comma - lb - 1)));
      int hi = std::stoi(trim(rest.substr(comma + 1, rb - comma - 1)));
      if (lo < 0 || hi < lo)
        throw std::runtime_error(where() + ": need 0 <= min <= max");
      out.push_back(OccConstraint{std::move(sym), lo, hi, 0});
    } else {
      throw std::runtime_error(where() + ": unknown constraint kind '" + kind + "'");
    }
  }
  return out;
}

std::vector<Constraint> parse_constraints(const std::filesystem::path& path,
                                          const NameTable& names) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_constraints(in, names);
}

namespace {

/// Would realizing `pred` on top of `history` breach a ceiling?
bool realization_allowed(std::span<const EventVector> history, const Prediction& pred,
                         std::span<const Constraint> constraints,
                         std::size_t flag_count) {
  // hypothetical: horizon-1 inactive steps, then the predicted symbol
  std::vector<EventVector> extended(history.begin(), history.end());
  std::int64_t t0 = history.empty() ? 0 : history.back().t + 1;
  for (int h = 1; h <= pred.horizon; ++h) {
    EventVector ev;
    ev.t = t0 + h - 1;
    ev.flags.assign(flag_count, 0);
    if (h == pred.horizon)
      for (int id : pred.symbol.ids())
        if (id < static_cast<int>(flag_count)) ev.flags[static_cast<std::size_t>(id)] = 1;
    extended.push_back(std::move(ev));
  }
  for (const Constraint& c : constraints) {
    if (const auto* blk = std::get_if<BlkConstraint>(&c)) {
      if (!check_blk(extended, *blk)) return false;
    } else if (const auto* occ = std::get_if<OccConstraint>(&c)) {
      // only the ceiling: a minimum cannot be falsified mid-stream
      OccConstraint upper = *occ;
      upper.min_occ = 0;
      if (!check_occ(extended, upper)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Prediction> prune_predictions(std::vector<Prediction> preds,
                                          std::span<const Constraint> constraints,
                                          std::span<const EventVector> history) {
  if (constraints.empty()) return preds;
  std::size_t flag_count = history.empty() ? 0 : history.back().flags.size();
  if (flag_count == 0)
    for (const auto& p : preds)
      for (int id : p.symbol.ids())
        flag_count = std::max(flag_count, static_cast<std::size_t>(id) + 1);
  std::vector<Prediction> kept;
  for (auto& p : preds)
    if (realization_allowed(history, p, constraints, flag_count))
      kept.push_back(std::move(p));
  return kept;
}

}  // namespace evcast
