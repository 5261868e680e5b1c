#pragma once

#include <Eigen/Dense>

namespace twinreg {

// Regression data. X is kept dense and column-major; the solvers walk it
// column by column. column_norms records the pre-standardization Euclidean
// norms so coefficients can be mapped back to the original scale.
struct Problem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  bool standardized = false;
  Eigen::VectorXd column_norms;

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }
};

/// Validates shapes and finiteness; column_norms starts at all ones.
Problem make_problem(Eigen::VectorXd y, Eigen::MatrixXd X);

/// Scales every column to unit Euclidean norm, recording the scale factors.
/// The response is left untouched. Throws on a zero-norm column, naming it.
Problem standardize(const Problem& problem);

/// Coefficients on the original predictor scale given standardized-scale ones.
Eigen::VectorXd to_original_scale(const Problem& standardized_problem,
                                  const Eigen::VectorXd& beta);

} // namespace twinreg
