#include "factest/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "factest/errors.hpp"

namespace factest {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::string location(std::string_view source, std::size_t line, const std::string& column) {
  std::ostringstream msg;
  msg << source << ": line " << line << ", column '" << column << "'";
  return msg.str();
}

double parse_cell(std::string_view text, std::string_view source, std::size_t line, const std::string& column) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) throw DataError(location(source, line, column) + ": missing value");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(location(source, line, column) + ": cannot parse '" + std::string(text) + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw DataError(location(source, line, column) + ": non-finite value '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_dates(const CsvPanel& a, const CsvPanel& b, std::string_view name_a, std::string_view name_b) {
  if (a.dates.empty() || b.dates.empty()) return;
  for (std::size_t i = 0; i < a.dates.size(); ++i) {
    if (a.dates[i] != b.dates[i]) {
      std::ostringstream msg;
      msg << "date mismatch at data row " << i + 1 << ": " << name_a << " has '" << a.dates[i] << "', " << name_b
          << " has '" << b.dates[i] << "'";
      throw DataError(msg.str());
    }
  }
}

CsvPanel matrix_table(const Matrix& values, const std::vector<std::string>& names, const std::string& prefix,
                      const std::vector<std::string>& dates) {
  CsvPanel out;
  out.values = values;
  for (Index j = 0; j < values.cols(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    out.columns.push_back(idx < names.size() && !names[idx].empty() ? names[idx] : prefix + std::to_string(j + 1));
  }
  if (!dates.empty()) {
    out.date_header = "date";
    out.dates = dates;
  }
  return out;
}

}  // namespace

CsvPanel parse_csv(std::istream& in, const CsvOptions& options, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_record(line);
      break;
    }
  }
  if (header.empty()) throw DataError(std::string(source) + ": missing header row");

  CsvPanel out;
  std::size_t first_numeric = 0;
  if (options.date_column) {
    out.date_header = header.front();
    first_numeric = 1;
  }
  out.columns.assign(header.begin() + static_cast<std::ptrdiff_t>(first_numeric), header.end());
  if (out.columns.empty()) throw DataError(std::string(source) + ": no numeric columns");

  std::vector<double> cells;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_record(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << source << ": line " << line_no << " has " << fields.size() << " fields, header has " << header.size();
      throw DataError(msg.str());
    }
    if (options.date_column) out.dates.push_back(fields.front());
    for (std::size_t j = first_numeric; j < fields.size(); ++j) {
      cells.push_back(parse_cell(fields[j], source, line_no, header[j]));
    }
    ++rows;
  }
  if (rows == 0) throw DataError(std::string(source) + ": no data rows");

  const auto n_cols = static_cast<Index>(out.columns.size());
  out.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), static_cast<Index>(rows), n_cols);
  return out;
}

CsvPanel read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, options, path.string());
}

void write_csv(const CsvPanel& panel, std::ostream& out) {
  const bool with_dates = !panel.dates.empty();
  if (with_dates) out << panel.date_header.value_or("date") << ',';
  for (std::size_t j = 0; j < panel.columns.size(); ++j) out << (j ? "," : "") << panel.columns[j];
  out << '\n';
  for (Index i = 0; i < panel.values.rows(); ++i) {
    if (with_dates) out << panel.dates[static_cast<std::size_t>(i)] << ',';
    for (Index j = 0; j < panel.values.cols(); ++j) out << (j ? "," : "") << format_double(panel.values(i, j));
    out << '\n';
  }
}

void write_csv(const CsvPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(panel, out);
}

void standardize_columns(Matrix& values, const std::vector<std::string>& names) {
  const Index n = values.rows();
  if (n < 2) throw DataError("standardization needs at least two rows");
  for (Index j = 0; j < values.cols(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const std::string name = idx < names.size() ? names[idx] : "column " + std::to_string(j + 1);
    const double mean = values.col(j).mean();
    values.col(j).array() -= mean;
    const double sd = std::sqrt(values.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DataError("column '" + name + "' is constant and cannot be standardized");
    values.col(j) /= sd;
  }
}

PanelData load_panel(const std::filesystem::path& y_path, const std::filesystem::path& x_path,
                     const std::optional<std::filesystem::path>& w_path, const LoadOptions& options) {
  const CsvOptions csv{options.date_column};
  CsvPanel y = read_csv(y_path, csv);
  CsvPanel x = read_csv(x_path, csv);
  std::optional<CsvPanel> w;
  if (w_path) w = read_csv(*w_path, csv);

  if (y.values.cols() != 1) {
    throw DataError(y_path.string() + ": outcome file must have exactly one numeric column, found " +
                    std::to_string(y.values.cols()));
  }
  if (x.rows() != y.rows()) {
    throw DataError("row count mismatch: " + y_path.string() + " has " + std::to_string(y.rows()) + ", " +
                    x_path.string() + " has " + std::to_string(x.rows()));
  }
  check_dates(y, x, y_path.string(), x_path.string());
  if (w) {
    if (w->rows() != y.rows()) {
      throw DataError("row count mismatch: " + y_path.string() + " has " + std::to_string(y.rows()) + ", " +
                      w_path->string() + " has " + std::to_string(w->rows()));
    }
    check_dates(y, *w, y_path.string(), w_path->string());
  }

  if (options.standardize) {
    standardize_columns(y.values, y.columns);
    standardize_columns(x.values, x.columns);
    if (w) standardize_columns(w->values, w->columns);
  }

  PanelData data;
  data.y = y.values.col(0);
  data.x = std::move(x.values);
  data.x_names = std::move(x.columns);
  data.dates = !x.dates.empty() ? std::move(x.dates) : std::move(y.dates);
  if (w) {
    data.w = std::move(w->values);
    data.w_names = std::move(w->columns);
  }

  if (options.lags != 0) data = lag_align(data, options.lags);
  data.validate();
  return data;
}

PanelData lag_align(const Vector& y, const Matrix& x, Index lags) {
  PanelData data;
  data.y = y;
  data.x = x;
  return lag_align(data, lags);
}

PanelData lag_align(const PanelData& data, Index lags) {
  if (lags != 1) throw InvalidArgument("only lags = 1 is supported");
  const Index t = data.y.size();
  if (t < 3) throw InvalidArgument("lag alignment needs at least 3 periods");
  if (data.x.rows() != t || (data.w && data.w->rows() != t)) throw DataError("lag alignment: row count mismatch");

  PanelData out;
  out.y = data.y.tail(t - lags);
  out.x = data.x.topRows(t - lags);
  if (data.w) out.w = data.w->topRows(t - lags);
  out.x_names = data.x_names;
  out.w_names = data.w_names;
  if (!data.dates.empty()) out.dates.assign(data.dates.begin(), data.dates.end() - lags);
  return out;
}

CsvPanel outcome_table(const PanelData& data) {
  return matrix_table(Matrix(data.y), {"y"}, "y", data.dates);
}

CsvPanel regressor_table(const PanelData& data) {
  return matrix_table(data.x, data.x_names, "x", data.dates);
}

CsvPanel extra_regressor_table(const PanelData& data) {
  if (!data.w) throw InvalidArgument("panel has no extra regressors");
  return matrix_table(*data.w, data.w_names, "w", data.dates);
}

}  // namespace factest
