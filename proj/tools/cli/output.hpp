#pragma once

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sheet_extremes::cli {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Shortest round-trip text for a double; "nan", "inf", "-inf" for non-finite values.
std::string num(double x);
std::string num(const std::optional<double>& x);

/// A fixed-column table rendered as RFC 4180 CSV or as a JSON array of rows.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  void add(std::vector<std::string> row);

  void write_csv(std::ostream& os) const;
  /// Numeric-looking cells become JSON numbers, "true"/"false" booleans, "" null.
  Json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& cell);
/// Parses RFC 4180 text; the first record is the header.
std::vector<std::vector<std::string>> parse_csv(std::istream& is);

/// Writes to `path`, or to standard output when path is empty or "-".
void emit(const std::string& path, const std::string& text);

}  // namespace sheet_extremes::cli
