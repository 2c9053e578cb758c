#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace plg {

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  ///< (row, col), sorted by row; padding excluded
    double cost = 0;                         ///< sum over `pairs`
};

/// Minimum-cost assignment. Rectangular inputs are padded to square with
/// zero-cost dummy rows/columns, so min(rows, cols) pairs are returned.
/// Throws on non-finite costs.
Assignment hungarian_assign(const Eigen::MatrixXd& cost);

}  // namespace plg
