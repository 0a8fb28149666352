#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icsa/types.hpp"

namespace icsa {

struct LoadOptions {
  // Column holding an outlier flag (1/0, yes/no, true/false, outlier/inlier).
  // Removed from the data and turned into `outliers`.
  std::optional<std::string> outlier_column;
  std::vector<std::string> drop;         // columns ignored entirely
  std::vector<std::string> force_numeric;  // never auto-tagged binary
  std::vector<std::string> force_binary;
  bool keep_text_columns = false;  // otherwise a non-numeric cell is an error
};

struct LoadedTable {
  DataMatrix data;
  IndexSet outliers;  // rows flagged by outlier_column
  std::vector<std::string> text_names;
  std::vector<std::vector<std::string>> text_columns;
};

// Header row required. Columns whose values are all 0/1 are tagged binary.
// Throws IngestError with row/column location on ragged rows or bad cells,
// SchemaError for unknown column names in the options.
LoadedTable load_csv(const std::string& path, const LoadOptions& options = {});
LoadedTable parse_csv(std::istream& in, const LoadOptions& options = {});

// Shortest round-tripping decimal representation.
std::string format_double(double v);

void write_csv(std::ostream& out, const DataMatrix& data);
void write_csv(const std::string& path, const DataMatrix& data);
void write_text(const std::string& path, const std::string& content);

}  // namespace icsa
