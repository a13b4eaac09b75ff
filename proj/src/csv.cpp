#include "hdinfer/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <vector>

namespace hdinfer {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size();
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::string& path, bool* had_header) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open file '" + path + "'", 0);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  std::size_t n_cols = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      if (rows.empty() && !header_seen) continue;
      // blank lines are only tolerated at the end of the file
      std::string rest;
      while (std::getline(in, rest)) {
        ++line_number;
        if (!trim(rest).empty()) throw CsvError("blank line inside data", line_number - 1);
      }
      break;
    }
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool all_numeric = true;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_double(fields[j], row[j])) {
        all_numeric = false;
        break;
      }
    }
    if (!all_numeric) {
      if (rows.empty() && !header_seen) {
        header_seen = true;
        n_cols = fields.size();
        continue;
      }
      throw CsvError("non-numeric field", line_number);
    }
    if (rows.empty() && !header_seen) n_cols = fields.size();
    if (fields.size() != n_cols)
      throw CsvError("expected " + std::to_string(n_cols) + " fields, found " +
                         std::to_string(fields.size()),
                     line_number);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("no data rows", line_number);

  if (had_header) *had_header = header_seen;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n_cols; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return x;
}

Eigen::VectorXd read_csv_vector(const std::string& path) {
  const Eigen::MatrixXd m = read_csv_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw CsvError("expected a single column in '" + path + "'", 1);
}

}  // namespace hdinfer
