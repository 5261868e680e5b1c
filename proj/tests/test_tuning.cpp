#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twinreg/random.hpp"
#include "twinreg/simulate.hpp"
#include "twinreg/stats.hpp"
#include "twinreg/tuning.hpp"

using namespace twinreg;

TEST_CASE("normal quantile against a 12-digit reference table") {
  const struct {
    double p, x;
  } table[] = {
      {0.5, 0.0},
      {0.75, 0.674489750196081743},
      {0.9, 1.28155156554460047},
      {0.95, 1.64485362695147271},
      {0.975, 1.95996398454005424},
      {0.99, 2.3263478740408411},
      {0.995, 2.57582930354890076},
      {0.999, 3.09023230616781354},
      {0.9995, 3.29052673149189479},
      {0.25, -0.674489750196081743},
      {0.001, -3.09023230616781354},
      {0.999609375, 3.35935371793431134},
      {0.99999, 4.26489079392282463},
      {0.9999995, 4.89163847569859039},
  };
  for (const auto& row : table) {
    CHECK(std::abs(std_normal_quantile(row.p) - row.x) <= 1e-9);
  }
  // cdf/quantile round trip
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double p = rng.uniform(1e-10, 1.0 - 1e-10);
    CHECK(std_normal_cdf(std_normal_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
  }
  CHECK_THROWS(std_normal_quantile(0.0));
  CHECK_THROWS(std_normal_quantile(1.0));
}

TEST_CASE("universal rule for variant a") {
  CHECK_THROWS_WITH_AS(universal_twin_a({1000, 1000, 1.0, {}}),
                       doctest::Contains("sufficiently larger"),
                       std::invalid_argument);

  const TuningPair t = universal_twin_a({4000, 1000, 1.0, {}});
  CHECK(t.lambda == doctest::Approx(5.5753832832747577).epsilon(1e-12));
  CHECK(t.tau == doctest::Approx(23.221088226883622).epsilon(1e-12));

  const TuningPair t2 = universal_twin_a({4000, 1000, 2.0, {}});
  CHECK(t2.lambda == doctest::Approx(2.0 * t.lambda).epsilon(1e-14));
  CHECK(t2.tau == doctest::Approx(2.0 * t.tau).epsilon(1e-14));

  // growing p raises lambda (n fixed and large enough)
  double prev = 0.0;
  for (int p : {100, 200, 400, 800}) {
    const TuningPair cur = universal_twin_a({100000, p, 1.0, {}});
    CHECK(cur.lambda > prev);
    CHECK(cur.tau > cur.lambda);
    prev = cur.lambda;
  }
}

TEST_CASE("universal rule for variant b") {
  const TuningPair t = universal_twin_b({4000, 1000, 1.0, {}}, false);
  CHECK(t.lambda == doctest::Approx(3.7169221888498384).epsilon(1e-12));
  CHECK(t.tau == doctest::Approx(t.lambda / (0.49 * 0.49)).epsilon(1e-12));

  // high-dimensional branch with eps'/delta = 0.12
  const TuningPair h = universal_twin_b({1000, 2000, 1.0, 0.06}, true);
  const double lam = std::sqrt(2.0 * std::log(2000.0));
  CHECK(h.lambda == doctest::Approx(lam).epsilon(1e-12));
  CHECK(h.tau == doctest::Approx(17.122210251016400 * lam).epsilon(1e-10));

  const TuningPair s2 = universal_twin_b({1000, 2000, 3.0, 0.06}, true);
  CHECK(s2.lambda == doctest::Approx(3.0 * h.lambda).epsilon(1e-14));
  CHECK(s2.tau == doctest::Approx(3.0 * h.tau).epsilon(1e-14));

  CHECK_THROWS(universal_twin_b({1000, 1000, 1.0, {}}, false)); // delta too small
  CHECK_THROWS(universal_twin_b({1000, 2000, 1.0, {}}, true));  // missing prior
  CHECK_THROWS(universal_twin_b({100, 2000, 1.0, 0.9}, true));  // prior too large
}

TEST_CASE("orthogonal calibration hits the target gap") {
  const CalibrationTarget tgt{0.1, 100, 1.0};
  for (TwinFamily fam : {TwinFamily::A, TwinFamily::B}) {
    const Calibration cal = calibrate_orthogonal(tgt, fam);
    CHECK(cal.target == doctest::Approx(3.29052673149189479).epsilon(1e-10));
    const PenaltySpec spec =
        fam == TwinFamily::A ? twin_a(cal.lambda, cal.tau) : twin_b(cal.lambda, cal.tau);
    CHECK(min_gap(spec) == doctest::Approx(cal.target).epsilon(1e-8));
  }

  // alpha = 1 stays solvable as long as alpha/(2p) < 1/2
  const Calibration full = calibrate_orthogonal({1.0, 2, 1.0}, TwinFamily::A);
  CHECK(full.target == doctest::Approx(0.674489750196081743).epsilon(1e-10));
  CHECK(min_gap(twin_a(full.lambda, full.tau)) ==
        doctest::Approx(full.target).epsilon(1e-8));

  // self-consistency across random targets
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const CalibrationTarget t{rng.uniform(0.01, 0.9), 1 + int(rng.index(3000)),
                              std::pow(10.0, rng.uniform(-1.0, 1.0))};
    const TwinFamily fam = rng.uniform() < 0.5 ? TwinFamily::A : TwinFamily::B;
    const Calibration cal = calibrate_orthogonal(t, fam);
    const PenaltySpec spec =
        fam == TwinFamily::A ? twin_a(cal.lambda, cal.tau) : twin_b(cal.lambda, cal.tau);
    CHECK(min_gap(spec) == doctest::Approx(cal.target).epsilon(1e-8));
  }

  CHECK_THROWS(calibrate_orthogonal({1.2, 100, 1.0}, TwinFamily::A));
  CHECK_THROWS(calibrate_orthogonal({0.1, 100, -1.0}, TwinFamily::A));
  CHECK_THROWS(calibrate_orthogonal({1.0, 1, 1.0}, TwinFamily::A)); // tail = 1/2
}

TEST_CASE("calibration with data applies the power rule") {
  SimScenario sc;
  sc.n = 128;
  sc.p = 128;
  sc.k = 10;
  sc.snr = 8.0;
  sc.seed = 5;
  sc.design_kind = DesignKind::Orthonormal;
  const SimDataset ds = make_dataset(sc);
  const Problem pr = standardize(ds.problem);
  const CalibrationTarget tgt{0.2, pr.p(), ds.sigma};
  const Calibration plain = calibrate_orthogonal(tgt, TwinFamily::A);
  const Calibration powered = calibrate_orthogonal(tgt, TwinFamily::A, &pr);
  auto count = [&](const Calibration& c) {
    const PenaltySpec spec = twin_a(c.lambda, c.tau);
    const Eigen::VectorXd corr = pr.X.transpose() * pr.y;
    int m = 0;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      if (threshold(spec, corr[j]) != 0.0) ++m;
    }
    return m;
  };
  CHECK(count(powered) >= count(plain));
  CHECK(min_gap(twin_a(powered.lambda, powered.tau)) ==
        doctest::Approx(powered.target).epsilon(1e-8));
}

TEST_CASE("cross-validation prefers small lambda on noiseless data") {
  Rng rng(23);
  const int n = 60, p = 8;
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  const Eigen::VectorXd y = 2.0 * X.col(0);
  const Problem raw = make_problem(y, X);
  const CvResult cv = cross_validate(raw, lasso(1.0), 2, SolverConfig{}, Algorithm::CD,
                                     60, -1.0, 1, /*center_response=*/false);
  CHECK(cv.lambdas.size() == 60);
  CHECK(cv.cv_curve.size() == 60);
  CHECK(cv.best_index >= 55);
  CHECK(cv.cv_curve[cv.best_index] <= 1e-4 * cv.cv_curve[0]);
}

TEST_CASE("leave-one-out runs and keeps the grid length") {
  SimScenario sc;
  sc.n = 20;
  sc.p = 10;
  sc.k = 2;
  sc.snr = 3.0;
  sc.seed = 11;
  const Problem raw = make_dataset(sc).problem;
  const CvResult cv =
      cross_validate(raw, twin_b(1.0, 0.5), 20, SolverConfig{}, Algorithm::CD, 30);
  CHECK(cv.cv_curve.size() == 30);
  CHECK(cv.best_lambda > 0.0);
}

TEST_CASE("cross-validation is deterministic under a fixed seed") {
  SimScenario sc;
  sc.n = 50;
  sc.p = 30;
  sc.k = 4;
  sc.snr = 4.0;
  sc.seed = 31;
  const Problem raw = make_dataset(sc).problem;
  const CvResult a =
      cross_validate(raw, twin_a(1.0, 0.2), 5, SolverConfig{}, Algorithm::CD, 25);
  const CvResult b =
      cross_validate(raw, twin_a(1.0, 0.2), 5, SolverConfig{}, Algorithm::CD, 25);
  REQUIRE(a.cv_curve.size() == b.cv_curve.size());
  for (std::size_t i = 0; i < a.cv_curve.size(); ++i) {
    CHECK(a.cv_curve[i] == b.cv_curve[i]);
  }
  CHECK(a.best_lambda == b.best_lambda);

  CHECK_THROWS(cross_validate(raw, lasso(1.0), 1, SolverConfig{}, Algorithm::CD));
  CHECK_THROWS(cross_validate(raw, lasso(1.0), 51, SolverConfig{}, Algorithm::CD));
}

TEST_CASE("zero-variance folds warn but are retained") {
  Eigen::MatrixXd X(12, 3);
  Rng rng(41);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(12, 4.0);
  const Problem raw = make_problem(y, X);
  const CvResult cv = cross_validate(raw, lasso(1.0), 3, SolverConfig{}, Algorithm::CD,
                                     10, -1.0, 1, /*center_response=*/false);
  CHECK(cv.warnings.size() == 3);
  CHECK(cv.cv_curve.size() == 10);
}

TEST_CASE("cv-selected model size lands near the truth on Model 3") {
  SimScenario sc;
  sc.n = 250;
  sc.p = 1000;
  sc.rho = -0.75;
  sc.k = 25;
  sc.snr = 10.0;
  sc.design_kind = DesignKind::AR1;
  int ok = 0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    sc.seed = 900 + rep;
    const SimDataset ds = make_dataset(sc);
    const CvResult cv = cross_validate(ds.problem, twin_a(1.0, 0.1), 10,
                                       SolverConfig{}, Algorithm::CD, 40);
    // refit on everything by walking the warm-started path down to the
    // selected lambda; jumping there cold can land in a poor local minimum
    Problem pr = ds.problem;
    pr.y.array() -= pr.y.mean();
    const Problem std_pr = standardize(pr);
    const std::vector<double> head(cv.lambdas.begin(),
                                   cv.lambdas.begin() + cv.best_index + 1);
    const PathResult path =
        fit_path(std_pr, twin_a(1.0, 0.1), head, SolverConfig{}, Algorithm::CD);
    const int size = static_cast<int>(path.fits.back().active_set.size());
    if (size >= sc.k / 2 && size <= 2 * sc.k) ++ok;
  }
  CHECK(ok * 100 >= 80 * reps);
}

TEST_CASE("sigma plug-in estimate is in the right ballpark") {
  SimScenario sc;
  sc.n = 300;
  sc.p = 100;
  sc.k = 5;
  sc.snr = 5.0;
  sc.seed = 77;
  const SimDataset ds = make_dataset(sc);
  const double est = estimate_sigma(ds.problem, SolverConfig{});
  CHECK(est >= 0.6 * ds.sigma);
  CHECK(est <= 1.5 * ds.sigma);
}
