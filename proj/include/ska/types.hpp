#pragma once

#include <Eigen/Dense>

namespace ska {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace ska
