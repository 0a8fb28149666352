#include "icsa/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "icsa/error.hpp"

namespace icsa {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_flag(const std::string& s, bool& out) {
  const std::string v = lower(s);
  if (v == "1" || v == "yes" || v == "y" || v == "true" || v == "outlier" || v == "o") {
    out = true;
    return true;
  }
  if (v == "0" || v == "no" || v == "n" || v == "false" || v == "inlier" || v == "i") {
    out = false;
    return true;
  }
  return false;
}

[[noreturn]] void ingest_error(std::size_t line, const std::string& column, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line;
  if (!column.empty()) msg << ", column '" << column << "'";
  msg << ": " << what;
  throw Error(ErrorCode::IngestError, msg.str());
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

LoadedTable parse_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_line(line);
      break;
    }
  }
  if (header.empty()) ingest_error(line_no, "", "missing header row");

  auto check_known = [&](const std::string& name) {
    if (!contains(header, name)) throw Error(ErrorCode::SchemaError, "unknown column '" + name + "'");
  };
  if (options.outlier_column) check_known(*options.outlier_column);
  for (const auto& v : {&options.drop, &options.force_numeric, &options.force_binary})
    for (const auto& name : *v) check_known(name);

  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> line_of;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream what;
      what << "expected " << header.size() << " fields, found " << fields.size();
      ingest_error(line_no, "", what.str());
    }
    cells.push_back(std::move(fields));
    line_of.push_back(line_no);
  }
  if (cells.empty()) ingest_error(line_no, "", "no data rows");
  const std::size_t n = cells.size();

  LoadedTable out;
  std::vector<std::size_t> numeric_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (contains(options.drop, name)) continue;
    if (options.outlier_column && name == *options.outlier_column) {
      for (std::size_t r = 0; r < n; ++r) {
        bool flag = false;
        if (!parse_flag(cells[r][c], flag)) ingest_error(line_of[r], name, "unrecognized outlier flag '" + cells[r][c] + "'");
        if (flag) out.outliers.push_back(r);
      }
      continue;
    }
    double v = 0;
    std::size_t bad = n;
    for (std::size_t r = 0; r < n && bad == n; ++r)
      if (!parse_number(cells[r][c], v)) bad = r;
    if (bad == n) {
      numeric_cols.push_back(c);
    } else if (options.keep_text_columns) {
      out.text_names.push_back(name);
      std::vector<std::string> col(n);
      for (std::size_t r = 0; r < n; ++r) col[r] = cells[r][c];
      out.text_columns.push_back(std::move(col));
    } else {
      ingest_error(line_of[bad], name, "cannot parse '" + cells[bad][c] + "' as a number");
    }
  }

  DataMatrix& d = out.data;
  d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(numeric_cols.size()));
  for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
    const std::size_t c = numeric_cols[k];
    bool binary = true;
    for (std::size_t r = 0; r < n; ++r) {
      double v = 0;
      parse_number(cells[r][c], v);
      d.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v;
      binary = binary && (v == 0.0 || v == 1.0);
    }
    const std::string& name = header[c];
    if (contains(options.force_binary, name) && !binary)
      throw Error(ErrorCode::InvalidColumnKind, "column '" + name + "' is forced binary but holds values other than 0/1");
    if (contains(options.force_numeric, name)) binary = false;
    d.names.push_back(name);
    d.kinds.push_back(binary ? ColumnKind::Binary : ColumnKind::Numeric);
  }
  return out;
}

LoadedTable load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IngestError, "cannot open '" + path + "'");
  return parse_csv(in, options);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const DataMatrix& data) {
  for (std::size_t j = 0; j < data.names.size(); ++j) out << (j ? "," : "") << data.names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) out << (j ? "," : "") << format_double(data.values(i, j));
    out << '\n';
  }
}

void write_csv(const std::string& path, const DataMatrix& data) {
  std::ostringstream s;
  write_csv(s, data);
  write_text(path, s.str());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IngestError, "cannot write '" + path + "'");
  out << content;
}

}  // namespace icsa
