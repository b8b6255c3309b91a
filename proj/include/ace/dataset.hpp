#pragma once

#include <Eigen/Core>

namespace ace {

/// An observed sample: covariates X (n x p), treatment t, outcome y.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd t;
  Eigen::VectorXd y;

  Eigen::Index n() const { return t.size(); }
  Eigen::Index dim() const { return X.cols(); }
};

}  // namespace ace
