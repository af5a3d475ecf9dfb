#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <vector>

#include "evcast/types.hpp"

namespace evcast {

struct StreamTableOptions {
  bool fill_forward = false;  // replace blank cells with the previous row's value
};

/// Sequential reader over a synchronized multivariate CSV
/// (header: time column + n value columns, one row per period).
/// Single consumer; rows are yielded in file order with t = 0,1,2,...
class StreamTable {
 public:
  StreamTable(const std::filesystem::path& source, std::size_t expected_n,
              StreamTableOptions opts = {});

  const NameTable& names() const { return names_; }
  std::size_t stream_count() const { return names_.size(); }

  /// Next row, or nullopt at end of file. Throws std::runtime_error naming
  /// the 1-based data-row number on malformed input.
  std::optional<ContextVector> next();

  /// Drain the remaining rows.
  std::vector<ContextVector> read_all();

 private:
  std::ifstream in_;
  NameTable names_;
  StreamTableOptions opts_;
  std::int64_t next_t_ = 0;
  std::vector<double> last_values_;
  bool have_last_ = false;
  std::string path_;
};

void write_context_csv(std::ostream& out, const std::vector<ContextVector>& rows,
                       const NameTable& names);
void write_context_csv(const std::filesystem::path& path,
                       const std::vector<ContextVector>& rows, const NameTable& names);

/// Event CSV: header t,e1,...,en with 0/1 cells.
void write_event_csv(std::ostream& out, const std::vector<EventVector>& rows,
                     const NameTable& names);
void write_event_csv(const std::filesystem::path& path,
                     const std::vector<EventVector>& rows, const NameTable& names);

struct EventTable {
  NameTable names;
  std::vector<EventVector> rows;
};

EventTable read_event_csv(const std::filesystem::path& path);
EventTable read_event_csv(std::istream& in, const std::string& what);

/// Peek at a CSV header: true when every value column is named e<i>
/// (an event table rather than a numeric stream table).
bool looks_like_event_csv(const std::filesystem::path& path);

}  // namespace evcast
