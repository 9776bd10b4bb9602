#pragma once

#include <Eigen/Dense>

namespace infobound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Model parameter theta; length equals the model dimension d.
using ParamPoint = Eigen::VectorXd;

}  // namespace infobound
