#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace aqst::harness {

/// Empty cell, integer, real (written in shortest round-trip form) or text.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

/// Rectangular CSV table with a '#'-prefixed provenance header.
struct ResultTable {
  std::string command;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws InvalidArgument when the row width differs from the header.
  void add_row(std::vector<Cell> row);

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

std::string format_cell(const Cell& cell);

/// Version string compiled into the library.
const char* version();

}  // namespace aqst::harness
