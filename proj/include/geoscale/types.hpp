#pragma once

#include <Eigen/Core>

namespace geoscale {

// Row-major matrix for data accessed a row at a time through the kernels.
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace geoscale
