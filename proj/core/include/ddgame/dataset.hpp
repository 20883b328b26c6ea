#pragma once

#include <Eigen/Core>
#include <string>

namespace ddgame {

// Sampled decision/response pairs: row j holds (x^(j), z^(j)).
struct Dataset {
  Eigen::MatrixXd x;  // m x d
  Eigen::MatrixXd z;  // m x k

  Dataset() = default;
  Dataset(Eigen::MatrixXd xs, Eigen::MatrixXd zs);

  long m() const { return x.rows(); }
  int d() const { return static_cast<int>(x.cols()); }
  int k() const { return static_cast<int>(z.cols()); }
};

// CSV with header j,x_0,...,x_{d-1},z_0,...,z_{k-1}, 17 significant digits.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

}  // namespace ddgame
