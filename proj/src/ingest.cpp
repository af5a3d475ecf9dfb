#include "evcast/ingest.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace evcast {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& cell, const std::string& where) {
  std::string v = trim(cell);
  if (v.empty()) throw std::runtime_error(where + ": empty numeric cell");
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::runtime_error(where + ": malformed number '" + v + "'");
  return out;
}

}  // namespace

StreamTable::StreamTable(const std::filesystem::path& source, std::size_t expected_n,
                         StreamTableOptions opts)
    : in_(source), opts_(opts), path_(source.string()) {
  if (!in_) throw std::runtime_error("cannot open " + path_);
  std::string header;
  if (!std::getline(in_, header))
    throw std::runtime_error(path_ + ": missing header");
  auto cells = split_csv_line(header);
  if (cells.size() != expected_n + 1)
    throw std::runtime_error(path_ + ": header declares " +
                             std::to_string(cells.size() ? cells.size() - 1 : 0) +
                             " value columns, expected " + std::to_string(expected_n));
  std::vector<std::string> names(cells.begin() + 1, cells.end());
  for (auto& n : names) n = trim(n);
  names_ = NameTable(std::move(names));
  last_values_.resize(expected_n, 0.0);
}

std::optional<ContextVector> StreamTable::next() {
  std::string line;
  while (std::getline(in_, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    std::string where =
        path_ + ": row " + std::to_string(next_t_ + 1);
    if (cells.size() != names_.size() + 1)
      throw std::runtime_error(where + ": expected " +
                               std::to_string(names_.size() + 1) + " columns, got " +
                               std::to_string(cells.size()));
    ContextVector cv;
    cv.t = next_t_;
    cv.stamp = trim(cells[0]);
    cv.values.resize(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      std::string cell = trim(cells[i + 1]);
      if (cell.empty()) {
        if (opts_.fill_forward && have_last_) {
          cv.values[i] = last_values_[i];
          continue;
        }
        throw std::runtime_error(where + ": missing value in column " +
                                 names_.name(static_cast<int>(i)));
      }
      cv.values[i] = parse_number(cell, where + ", column " +
                                            names_.name(static_cast<int>(i)));
    }
    last_values_ = cv.values;
    have_last_ = true;
    ++next_t_;
    return cv;
  }
  return std::nullopt;
}

std::vector<ContextVector> StreamTable::read_all() {
  std::vector<ContextVector> rows;
  while (auto cv = next()) rows.push_back(std::move(*cv));
  return rows;
}

void write_context_csv(std::ostream& out, const std::vector<ContextVector>& rows,
                       const NameTable& names) {
  out << 't';
  for (const auto& n : names.names()) out << ',' << n;
  out << '\n';
  for (const auto& cv : rows) {
    out << cv.t;
    for (double v : cv.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_context_csv(const std::filesystem::path& path,
                       const std::vector<ContextVector>& rows, const NameTable& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_context_csv(out, rows, names);
}

void write_event_csv(std::ostream& out, const std::vector<EventVector>& rows,
                     const NameTable& names) {
  out << 't';
  for (std::size_t i = 0; i < names.size(); ++i) out << ",e" << (i + 1);
  out << '\n';
  for (const auto& ev : rows) {
    out << ev.t;
    for (auto f : ev.flags) out << ',' << (f ? '1' : '0');
    out << '\n';
  }
}

void write_event_csv(const std::filesystem::path& path,
                     const std::vector<EventVector>& rows, const NameTable& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_event_csv(out, rows, names);
}

EventTable read_event_csv(std::istream& in, const std::string& what) {
  EventTable table;
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(what + ": missing header");
  auto cells = split_csv_line(header);
  if (cells.size() < 2) throw std::runtime_error(what + ": header too short");
  std::vector<std::string> names(cells.begin() + 1, cells.end());
  for (auto& n : names) n = trim(n);
  table.names = NameTable(std::move(names));
  std::string line;
  std::int64_t t = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto row = split_csv_line(line);
    std::string where = what + ": row " + std::to_string(t + 1);
    if (row.size() != cells.size())
      throw std::runtime_error(where + ": column count mismatch");
    EventVector ev;
    ev.t = t;
    ev.flags.resize(table.names.size());
    for (std::size_t i = 0; i < table.names.size(); ++i) {
      std::string cell = trim(row[i + 1]);
      if (cell == "0")
        ev.flags[i] = 0;
      else if (cell == "1")
        ev.flags[i] = 1;
      else
        throw std::runtime_error(where + ": flag must be 0 or 1, got '" + cell + "'");
    }
    table.rows.push_back(std::move(ev));
    ++t;
  }
  return table;
}

EventTable read_event_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_event_csv(in, path.string());
}

bool looks_like_event_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) return false;
  auto cells = split_csv_line(header);
  if (cells.size() < 2) return false;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    std::string c = trim(cells[i]);
    if (c.size() < 2 || c[0] != 'e') return false;
    for (std::size_t j = 1; j < c.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(c[j]))) return false;
  }
  return true;
}

}  // namespace evcast
