#pragma once

#include <string>
#include <vector>

#include "fibercoh/error.hpp"
#include "fibercoh/graded.hpp"

namespace fibercoh {

/// Named rectangular table of strings, emitted as TSV.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Table& add(std::vector<std::string> row) {
    rows.push_back(std::move(row));
    return *this;
  }
  const std::string& cell(std::size_t row, const std::string& column) const;
};

inline const std::string& Table::cell(std::size_t row, const std::string& column) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == column) return rows.at(row).at(c);
  throw Error(ErrorKind::invalid_input, "table " + name + " has no column " + column);
}

inline std::string to_tsv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "\t" : "") + cells[i];
    out += '\n';
  };
  line(t.header);
  for (auto& r : t.rows) line(r);
  return out;
}

/// One row per degree 0..len-1 with a column per family.
inline Table graded_table(std::string name, const std::vector<std::string>& labels,
                          const std::vector<GradedDim>& families, int len) {
  Table t{std::move(name), {"degree"}, {}};
  for (auto& l : labels) t.header.push_back(l);
  for (int q = 0; q < len; ++q) {
    std::vector<std::string> row{std::to_string(q)};
    for (auto& f : families) row.push_back(std::to_string(f[q]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string bool_cell(bool b) { return b ? "true" : "false"; }

}  // namespace fibercoh
