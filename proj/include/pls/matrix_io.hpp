#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>

namespace pls {

/// Dense text format: first line "n p", then n rows of p space-separated
/// decimals. Values are written with 17 significant digits so a
/// write/read round trip is bit exact.
Eigen::MatrixXd read_dense_matrix(std::istream& in, const std::string& name = "<stream>");
Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path);

void write_dense_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m);
void write_dense_matrix(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace pls
