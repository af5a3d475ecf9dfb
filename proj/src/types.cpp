#include "evcast/types.hpp"

#include <charconv>
#include <cstdio>

namespace evcast {

std::string symbol_to_string(const EventSymbol& sym, const NameTable& names) {
  if (sym.size() == 1) return names.name(sym.ids()[0]);
  std::string out = "{";
  bool first = true;
  for (int id : sym.ids()) {
    if (!first) out += ',';
    out += names.name(id);
    first = false;
  }
  out += '}';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace evcast
