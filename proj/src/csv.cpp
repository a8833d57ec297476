#include "specproj/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace specproj {

Eigen::MatrixXd read_csv_matrix(std::istream& in, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(field, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": non-numeric field '" + field + "'");
      }
      while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) {
        ++used;
      }
      if (used != field.size() || !std::isfinite(value)) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": non-numeric field '" + field + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": ragged row (expected " +
                               std::to_string(rows.front().size()) + " fields, got " +
                               std::to_string(row.size()) + ")");
    }
    if (row.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(origin + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Eigen::MatrixXd read_csv_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv_matrix(in, path);
}

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_csv_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv_matrix(out, m);
}

}  // namespace specproj
