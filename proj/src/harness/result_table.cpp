#include "aqst/harness/result_table.hpp"

#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "aqst/errors.hpp"

#ifndef AQST_VERSION
#define AQST_VERSION "unknown"
#endif

namespace aqst::harness {

const char* version() { return AQST_VERSION; }

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return fmt::format("{}", v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& os) const {
  os << "# aqst_sim " << version() << '\n';
  os << "# command: " << command << '\n';
  for (const auto& [k, v] : provenance) os << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

}  // namespace aqst::harness
