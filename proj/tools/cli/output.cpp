#include "cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sheet_extremes::cli {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns_.size()) throw std::logic_error("table row has the wrong number of cells");
  rows_.push_back(std::move(row));
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Table::write_csv(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(cells[i]);
    }
    os << "\r\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

namespace {

Json cell_json(const std::string& s) {
  if (s.empty()) return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "nan" || s == "inf" || s == "-inf") return s;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) {
    long long iv = 0;
    const auto ires = std::from_chars(s.data(), s.data() + s.size(), iv);
    if (ires.ec == std::errc() && ires.ptr == s.data() + s.size()) return iv;
    return v;
  }
  return s;
}

}  // namespace

Json Table::to_json() const {
  Json arr = Json::array();
  for (const auto& r : rows_) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = cell_json(r[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      record.push_back(std::move(cell));
      cell.clear();
      out.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      cell += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV field");
  if (any) {
    record.push_back(std::move(cell));
    out.push_back(std::move(record));
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace sheet_extremes::cli
