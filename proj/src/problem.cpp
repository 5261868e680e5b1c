#include "twinreg/problem.hpp"

#include <stdexcept>
#include <string>

namespace twinreg {

Problem make_problem(Eigen::VectorXd y, Eigen::MatrixXd X) {
  if (y.size() < 1 || X.cols() < 1) {
    throw std::invalid_argument("make_problem: need n >= 1 and p >= 1");
  }
  if (X.rows() != y.size()) {
    throw std::invalid_argument("make_problem: X has " + std::to_string(X.rows()) +
                                " rows but y has " + std::to_string(y.size()));
  }
  if (!y.allFinite() || !X.allFinite()) {
    throw std::invalid_argument("make_problem: non-finite entries in the data");
  }
  Problem pr;
  pr.y = std::move(y);
  pr.X = std::move(X);
  pr.column_norms = Eigen::VectorXd::Ones(pr.X.cols());
  return pr;
}

Problem standardize(const Problem& problem) {
  const int p = problem.p();
  Problem out;
  out.y = problem.y;
  out.X = problem.X;
  out.column_norms.resize(p);
  for (int j = 0; j < p; ++j) {
    const double nrm = out.X.col(j).norm();
    if (!(nrm > 0.0)) {
      throw std::invalid_argument("standardize: column " + std::to_string(j) +
                                  " has zero norm");
    }
    out.X.col(j) /= nrm;
    out.column_norms[j] = problem.column_norms[j] * nrm;
  }
  out.standardized = true;
  return out;
}

Eigen::VectorXd to_original_scale(const Problem& pr, const Eigen::VectorXd& beta) {
  if (beta.size() != pr.column_norms.size()) {
    throw std::invalid_argument("to_original_scale: dimension mismatch");
  }
  return beta.cwiseQuotient(pr.column_norms);
}

} // namespace twinreg
