#include <charconv>
#include <fstream>
#include <iomanip>
#include <cmath>
#include <sstream>

#include "rmopt/cli.hpp"

namespace rmopt::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field = trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      ++col;
      double v = 0.0;
      const char* b = field.data();
      const char* e = field.data() + field.size();
      if (!field.empty() && *b == '+') ++b;
      const auto [ptr, ec] = std::from_chars(b, e, v);
      if (field.empty() || ec != std::errc() || ptr != e || !std::isfinite(v)) {
        throw InputError(source + ":" + std::to_string(line_no) + ":" + std::to_string(col) +
                         ": cannot parse '" + field + "' as a finite real number");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " columns, found " + std::to_string(col));
    }
    ++rows;
  }
  if (rows == 0) throw InputError(source + ": no data rows");
  return Matrix(rows, cols, std::move(values));
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file " + path);
  return parse_matrix_csv(in, path);
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
  out << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_matrix_csv(m, out);
}

}  // namespace rmopt::cli
