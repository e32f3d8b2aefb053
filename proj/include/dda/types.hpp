#pragma once

#include <Eigen/Dense>

namespace dda {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace dda
