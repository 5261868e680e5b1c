#include "twinreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinreg {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  // allow surrounding spaces
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && end[-1] == ' ') --end;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw std::runtime_error("not a number: '" + field + "'");
  }
  return v;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

NumericCsv read_numeric_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty file");
  NumericCsv out;
  out.header = split_csv_line(line);
  const std::size_t ncol = out.header.size();
  if (ncol == 0) throw std::runtime_error("empty header");
  std::vector<double> data;
  std::size_t nrow = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != ncol) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(ncol) + " fields, got " +
                               std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      double v;
      try {
        v = parse_double(f);
      } catch (const std::exception& e) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
      }
      if (!std::isfinite(v)) {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": non-finite value");
      }
      data.push_back(v);
    }
    ++nrow;
  }
  if (nrow == 0) throw std::runtime_error("no data rows");
  out.values.resize(nrow, ncol);
  for (std::size_t i = 0; i < nrow; ++i) {
    for (std::size_t j = 0; j < ncol; ++j) {
      out.values(i, j) = data[i * ncol + j];
    }
  }
  return out;
}

NumericCsv read_numeric_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_numeric_csv(is);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_regression_csv(std::ostream& os, const std::vector<std::string>& header,
                          const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  if (header.size() != static_cast<std::size_t>(X.cols()) + 1) {
    throw std::invalid_argument("write_regression_csv: header size mismatch");
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) os << ',';
    os << csv_quote(header[j]);
  }
  os << '\n';
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    os << format_double(y[i]);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      os << ',' << format_double(X(i, j));
    }
    os << '\n';
  }
}

} // namespace twinreg
