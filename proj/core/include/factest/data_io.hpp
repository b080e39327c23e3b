#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factest/factor_model.hpp"
#include "factest/types.hpp"

namespace factest {

/// A rectangular numeric CSV table with a header row.
struct CsvPanel {
  std::vector<std::string> columns;   ///< names of the numeric columns
  std::optional<std::string> date_header;
  std::vector<std::string> dates;     ///< row labels; empty when no date column
  Matrix values;

  Index rows() const { return values.rows(); }
};

struct CsvOptions {
  /// Treat the first column as row labels instead of data.
  bool date_column = false;
};

/// Comma-separated, header row required, UTF-8 (a leading BOM is skipped).
/// Every data cell must parse as a finite real; empty cells and NA are
/// rejected with their row and column.
CsvPanel parse_csv(std::istream& in, const CsvOptions& options = {}, std::string_view source = "<stream>");
CsvPanel read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes with 17 significant digits so that reading back is exact.
void write_csv(const CsvPanel& panel, std::ostream& out);
void write_csv(const CsvPanel& panel, const std::filesystem::path& path);

/// Subtracts each column's mean and divides by its sample standard deviation.
/// Throws DataError naming the first constant column.
void standardize_columns(Matrix& values, const std::vector<std::string>& names);

struct LoadOptions {
  bool date_column = false;
  bool standardize = false;
  /// When 1, pairs y_{t+1} with x_t (and w_t).
  Index lags = 0;
};

/// Y is the single numeric column of y_path, X every numeric column of
/// x_path, W every numeric column of w_path. Row counts must agree; when
/// date columns are present they must match row by row.
PanelData load_panel(const std::filesystem::path& y_path, const std::filesystem::path& x_path,
                     const std::optional<std::filesystem::path>& w_path, const LoadOptions& options = {});

/// Pairs y_{t+lags} with x_t, dropping the boundary rows. Only lags = 1 is
/// supported. Requires T >= 3.
PanelData lag_align(const Vector& y, const Matrix& x, Index lags = 1);

/// As above, shifting every row-indexed field of `data` (w, dates) with x.
PanelData lag_align(const PanelData& data, Index lags = 1);

/// Panel as CSV tables: y (single column "y"), x and optionally w.
CsvPanel outcome_table(const PanelData& data);
CsvPanel regressor_table(const PanelData& data);
CsvPanel extra_regressor_table(const PanelData& data);

}  // namespace factest
