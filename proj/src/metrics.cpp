#include "twinreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "twinreg/csv.hpp"

namespace twinreg {

namespace {

void check_outcome(const SelectionOutcome& o) {
  for (int j : o.selected) {
    if (j < 0 || j >= o.p) throw std::invalid_argument("selection index out of range");
  }
  for (int j : o.truth) {
    if (j < 0 || j >= o.p) throw std::invalid_argument("truth index out of range");
  }
}

} // namespace

double fdr(const SelectionOutcome& outcome) {
  check_outcome(outcome);
  const std::set<int> truth(outcome.truth.begin(), outcome.truth.end());
  std::size_t false_sel = 0;
  for (int j : outcome.selected) {
    if (!truth.count(j)) ++false_sel;
  }
  return static_cast<double>(false_sel) /
         std::max<std::size_t>(outcome.selected.size(), 1);
}

double tdr(const SelectionOutcome& outcome) {
  check_outcome(outcome);
  const std::set<int> sel(outcome.selected.begin(), outcome.selected.end());
  std::size_t hits = 0;
  for (int j : outcome.truth) {
    if (sel.count(j)) ++hits;
  }
  return static_cast<double>(hits) / std::max<std::size_t>(outcome.truth.size(), 1);
}

int fwer_indicator(const SelectionOutcome& outcome) {
  check_outcome(outcome);
  const std::set<int> truth(outcome.truth.begin(), outcome.truth.end());
  for (int j : outcome.selected) {
    if (!truth.count(j)) return 1;
  }
  return 0;
}

double rmse(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x_test,
            const Eigen::VectorXd& y_test, double intercept) {
  if (x_test.rows() != y_test.size() || x_test.cols() != beta.size()) {
    throw std::invalid_argument("rmse: dimension mismatch");
  }
  if (y_test.size() == 0) throw std::invalid_argument("rmse: empty test set");
  const Eigen::ArrayXd resid = y_test.array() - (x_test * beta).array() - intercept;
  return std::sqrt(resid.square().sum() / y_test.size());
}

double mspe(const std::vector<double>& per_split_mse) {
  if (per_split_mse.empty()) throw std::invalid_argument("mspe: no splits");
  double s = 0.0;
  for (double v : per_split_mse) s += v;
  return s / per_split_mse.size();
}

namespace {

struct MeanSe {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

// Sorted summation makes the result independent of replication order.
MeanSe mean_se(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](double x) { return std::isnan(x); }),
          v.end());
  MeanSe out;
  if (v.empty()) return out;
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / v.size();
  if (v.size() >= 2) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] - out.mean;
      sq[i] = d * d;
    }
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double x : sq) ss += x;
    out.se = std::sqrt(ss / (v.size() - 1)) / std::sqrt(double(v.size()));
  }
  return out;
}

} // namespace

SelectionReport aggregate(const std::vector<ReplicationCurves>& reps) {
  if (reps.empty()) throw std::invalid_argument("aggregate: no replications");
  SelectionReport report;
  report.n_reps = static_cast<int>(reps.size());

  std::set<std::string> methods;
  for (const auto& rep : reps) {
    for (const auto& [m, _] : rep) methods.insert(m);
  }
  for (const std::string& method : methods) {
    std::size_t n_grid = 0;
    for (const auto& rep : reps) {
      auto it = rep.find(method);
      if (it == rep.end()) continue;
      if (n_grid == 0) {
        n_grid = it->second.lambda.size();
      } else if (it->second.lambda.size() != n_grid) {
        throw std::invalid_argument("aggregate: mismatched grid lengths for " + method);
      }
    }
    for (std::size_t i = 0; i < n_grid; ++i) {
      std::vector<double> lam, f, t, sz, rm;
      for (const auto& rep : reps) {
        auto it = rep.find(method);
        if (it == rep.end()) continue;
        lam.push_back(it->second.lambda[i]);
        f.push_back(it->second.fdr[i]);
        t.push_back(it->second.tdr[i]);
        sz.push_back(it->second.model_size[i]);
        rm.push_back(it->second.rmse[i]);
      }
      SelectionReport::Row row;
      row.method = method;
      row.grid_index = static_cast<int>(i);
      row.lambda_mean = mean_se(lam).mean;
      auto mf = mean_se(f), mt = mean_se(t), ms = mean_se(sz), mr = mean_se(rm);
      row.fdr_mean = mf.mean;
      row.fdr_se = mf.se;
      row.tdr_mean = mt.mean;
      row.tdr_se = mt.se;
      row.size_mean = ms.mean;
      row.size_se = ms.se;
      row.rmse_mean = mr.mean;
      row.rmse_se = mr.se;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report_csv(std::ostream& os, const SelectionReport& report) {
  os << "method,grid_index,lambda_mean,fdr_mean,fdr_se,tdr_mean,tdr_se,"
        "size_mean,rmse_mean,rmse_se\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& r : report.rows) {
    os << csv_quote(r.method) << ',' << r.grid_index << ',' << field(r.lambda_mean)
       << ',' << field(r.fdr_mean) << ',' << field(r.fdr_se) << ','
       << field(r.tdr_mean) << ',' << field(r.tdr_se) << ',' << field(r.size_mean)
       << ',' << field(r.rmse_mean) << ',' << field(r.rmse_se) << '\n';
  }
}

} // namespace twinreg
