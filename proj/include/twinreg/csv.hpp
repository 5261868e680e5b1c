#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twinreg {

/// Shortest decimal string that round-trips back to the same double.
std::string format_double(double v);

/// Strict double parse of a whole field.
double parse_double(const std::string& field);

/// RFC-4180 quoting, applied only when the field needs it.
std::string csv_quote(const std::string& field);

/// One CSV record, honoring quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

struct NumericCsv {
  std::vector<std::string> header;
  Eigen::MatrixXd values; // rows x columns
};

/// Reads a header row plus an all-numeric body. Ragged rows, empty bodies,
/// or non-numeric cells raise std::runtime_error with line context.
NumericCsv read_numeric_csv(std::istream& is);
NumericCsv read_numeric_csv_file(const std::string& path);

/// First column response, remaining columns predictors.
void write_regression_csv(std::ostream& os, const std::vector<std::string>& header,
                          const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

} // namespace twinreg
