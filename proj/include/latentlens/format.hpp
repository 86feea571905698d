#ifndef LATENTLENS_FORMAT_HPP
#define LATENTLENS_FORMAT_HPP

#include <cstdio>
#include <string>
#include <vector>

namespace latentlens {

// Floats in CSV/JSON outputs use 9 significant digits, '.' decimal
// separator, no locale dependence.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace latentlens

#endif
