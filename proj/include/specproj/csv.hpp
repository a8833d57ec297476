#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace specproj {

// Header-less CSV, one row per line. Readers reject ragged rows and
// non-numeric fields.
Eigen::MatrixXd read_csv_matrix(std::istream& in, const std::string& origin = "<stream>");
Eigen::MatrixXd read_csv_matrix_file(const std::string& path);

void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_csv_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace specproj
