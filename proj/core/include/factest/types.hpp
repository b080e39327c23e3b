#pragma once

#include <Eigen/Dense>

namespace factest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace factest
