#include "ddgame/dataset.hpp"

#include "ddgame/csv.hpp"
#include "ddgame/errors.hpp"

namespace ddgame {

Dataset::Dataset(Eigen::MatrixXd xs, Eigen::MatrixXd zs)
    : x(std::move(xs)), z(std::move(zs)) {
  if (x.rows() != z.rows())
    throw DimensionMismatch("Dataset: x and z record counts differ");
  if (x.rows() < 1) throw DimensionMismatch("Dataset: need at least 1 record");
  if (x.cols() < 1 || z.cols() < 1)
    throw DimensionMismatch("Dataset: empty coordinate dimensions");
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header;
  header.push_back("j");
  for (int c = 0; c < data.d(); ++c)
    header.push_back("x_" + std::to_string(c));
  for (int c = 0; c < data.k(); ++c)
    header.push_back("z_" + std::to_string(c));
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(data.m()));
  for (long j = 0; j < data.m(); ++j) {
    std::vector<double> row;
    row.reserve(header.size());
    row.push_back(static_cast<double>(j));
    for (int c = 0; c < data.d(); ++c) row.push_back(data.x(j, c));
    for (int c = 0; c < data.k(); ++c) row.push_back(data.z(j, c));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

Dataset read_dataset_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  int d = 0, k = 0;
  if (table.header.empty() || table.header[0] != "j")
    throw ConfigError(path + ": dataset CSV must start with column 'j'");
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (name == "x_" + std::to_string(d) && k == 0)
      ++d;
    else if (name == "z_" + std::to_string(k))
      ++k;
    else
      throw ConfigError(path + ": unexpected dataset column '" + name + "'");
  }
  if (d == 0 || k == 0)
    throw ConfigError(path + ": dataset CSV needs x_* and z_* columns");
  const long m = static_cast<long>(table.rows.size());
  if (m == 0) throw ConfigError(path + ": dataset CSV has no records");
  Eigen::MatrixXd x(m, d), z(m, k);
  for (long j = 0; j < m; ++j) {
    const auto& row = table.rows[static_cast<std::size_t>(j)];
    for (int c = 0; c < d; ++c) x(j, c) = row[static_cast<std::size_t>(1 + c)];
    for (int c = 0; c < k; ++c)
      z(j, c) = row[static_cast<std::size_t>(1 + d + c)];
  }
  return Dataset(std::move(x), std::move(z));
}

}  // namespace ddgame
