#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace icsa {

// Observations are stored row-major so each observation is contiguous; the
// distance kernels depend on this.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;

enum class ColumnKind { Numeric, Binary };

struct DataMatrix {
  RowMatrix values;
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  IndexSet binary_columns() const;

  // Numeric matrix with default names "x1".."xp" and all columns numeric.
  static DataMatrix from_values(RowMatrix values);
};

}  // namespace icsa
