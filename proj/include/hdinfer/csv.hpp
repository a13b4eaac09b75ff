#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdinfer {

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

// Comma-separated numeric matrix, rows are observations. A single header
// row is auto-detected: the first row is a header iff any of its tokens
// fails to parse as a number.
Eigen::MatrixXd read_csv_matrix(const std::string& path, bool* had_header = nullptr);

// Single-column (or single-row) numeric CSV.
Eigen::VectorXd read_csv_vector(const std::string& path);

}  // namespace hdinfer
