#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twinreg {

struct SelectionOutcome {
  std::vector<int> selected; // indices in [0, p)
  std::vector<int> truth;
  int p = 0;
};

/// False discoveries over selections, with the |selected| v 1 guard.
double fdr(const SelectionOutcome& outcome);

/// True discoveries over true signals, with the |truth| v 1 guard.
double tdr(const SelectionOutcome& outcome);

/// 1 exactly when at least one false selection occurred.
int fwer_indicator(const SelectionOutcome& outcome);

/// Root mean squared prediction error on a test set.
double rmse(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x_test,
            const Eigen::VectorXd& y_test, double intercept = 0.0);

/// Mean of per-split mean squared prediction errors.
double mspe(const std::vector<double>& per_split_mse);

// One method's per-grid-index metric samples for a single replication.
// NaN marks a missing cell (failed fit).
struct MetricCurve {
  std::vector<double> lambda;
  std::vector<double> fdr;
  std::vector<double> tdr;
  std::vector<double> model_size;
  std::vector<double> rmse;
};

using ReplicationCurves = std::map<std::string, MetricCurve>;

struct SelectionReport {
  struct Row {
    std::string method;
    int grid_index = 0;
    double lambda_mean = 0.0;
    double fdr_mean = 0.0, fdr_se = 0.0;
    double tdr_mean = 0.0, tdr_se = 0.0;
    double size_mean = 0.0, size_se = 0.0;
    double rmse_mean = 0.0, rmse_se = 0.0;
  };
  int n_reps = 0;
  std::vector<Row> rows; // sorted by method then grid_index
};

/// Pointwise means and standard errors across replications at matched grid
/// indices. Standard errors are sample sd / sqrt(reps) and are NaN when
/// fewer than two replications contribute. Summation order is canonical
/// (values sorted first), so permuting replications cannot change the report.
SelectionReport aggregate(const std::vector<ReplicationCurves>& reps);

void write_report_csv(std::ostream& os, const SelectionReport& report);

} // namespace twinreg
