#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bfc/ensemble.hpp"
#include "bfc/regression.hpp"
#include "bfc/synthetic.hpp"
#include "support/oracles.hpp"

namespace {

bfc::DataMatrix column(std::initializer_list<double> xs) {
  bfc::DataMatrix m;
  for (const double x : xs) m.append_row({&x, 1});
  return m;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear regression
// ---------------------------------------------------------------------------

TEST(TrainLr, ExactLineRecovered) {
  const auto x = column({1.0, 2.0, 3.0, 4.0});
  const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
  const auto model = bfc::train_lr(x, y);
  ASSERT_EQ(model.weights.size(), 2u);
  EXPECT_NEAR(model.weights[0], 2.0, 1e-9);
  EXPECT_NEAR(model.weights[1], 0.0, 1e-9);
}

TEST(TrainLr, ConstantTargetGoesToIntercept) {
  const auto x = column({1.0, 2.0, 5.0});
  const std::vector<double> y{3.5, 3.5, 3.5};
  const auto model = bfc::train_lr(x, y);
  EXPECT_NEAR(model.weights[0], 0.0, 1e-9);
  EXPECT_NEAR(model.weights[1], 3.5, 1e-9);
}

TEST(TrainLr, MatchesQrOracle) {
  bfc::SyntheticRng rng(42u);
  bfc::DataMatrix x(50, 5);
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t c = 0; c < 5; ++c) x.at(i, c) = rng.normal();
    y[i] = rng.normal();
  }
  const auto model = bfc::train_lr(x, y);
  const auto want = oracles::qr_least_squares(x, y);
  ASSERT_EQ(model.weights.size(), want.size());
  for (std::size_t c = 0; c < want.size(); ++c)
    EXPECT_NEAR(model.weights[c], want[c], 1e-8);
}

TEST(TrainLr, NormalEquationGradientIsTiny) {
  bfc::SyntheticRng rng(43u);
  for (int trial = 0; trial < 10; ++trial) {
    bfc::DataMatrix x(30, 3);
    std::vector<double> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.normal();
      y[i] = rng.normal();
    }
    const auto model = bfc::train_lr(x, y);
    // gradient of 1/2||Xw - y||^2 on the augmented design
    std::vector<double> grad(4, 0.0), xty(4, 0.0);
    for (std::size_t i = 0; i < 30; ++i) {
      const double r = model.predict(x.row(i)) - y[i];
      for (std::size_t c = 0; c < 3; ++c) {
        grad[c] += x.at(i, c) * r;
        xty[c] += x.at(i, c) * y[i];
      }
      grad[3] += r;
      xty[3] += y[i];
    }
    EXPECT_LE(norm(grad), 1e-6 * norm(xty));
  }
}

TEST(TrainLr, RankDeficientHandledByJitter) {
  // Single sample in 3 dims: hopelessly rank deficient, must not throw.
  bfc::DataMatrix x(1, 3);
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 2.0;
  x.at(0, 2) = 3.0;
  const std::vector<double> y{5.0};
  const auto model = bfc::train_lr(x, y);
  EXPECT_NEAR(model.predict(x.row(0)), 5.0, 1e-3);
}

// ---------------------------------------------------------------------------
// Kernel ridge regression
// ---------------------------------------------------------------------------

TEST(TrainKrr, ScalarClosedForm) {
  // One sample, linear kernel k(x,x)=1, y=2, lambda=1: alpha = 2/(1+1) = 1.
  bfc::DataMatrix x(1, 1);
  x.at(0, 0) = 1.0;
  const std::vector<double> y{2.0};
  const auto model = bfc::train_krr(x, y, 1.0, {bfc::KernelType::linear, 1.0});
  ASSERT_EQ(model.alpha.size(), 1u);
  EXPECT_NEAR(model.alpha[0], 1.0, 1e-12);
}

TEST(TrainKrr, LargeLambdaShrinksAlpha) {
  bfc::SyntheticRng rng(5u);
  bfc::DataMatrix x(10, 2);
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = rng.normal();
    y[i] = 3.0 * rng.normal();
  }
  const double lambda = 1e6;
  const auto model = bfc::train_krr(x, y, lambda, {bfc::KernelType::rbf, 1.0});
  EXPECT_LE(norm(model.alpha), norm(y) / lambda);
}

TEST(TrainKrr, MatchesDenseSolveOracle) {
  bfc::SyntheticRng rng(6u);
  bfc::DataMatrix x(30, 3);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.normal();
    y[i] = rng.normal();
  }
  const bfc::Kernel kernel{bfc::KernelType::rbf, 1.5};
  const double lambda = 1e-2;
  const auto model = bfc::train_krr(x, y, lambda, kernel);

  auto system = bfc::gram_matrix(kernel, x);
  for (std::size_t i = 0; i < 30; ++i) system[i * 30 + i] += lambda;
  const auto want = oracles::gauss_solve(system, y, 30);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(model.alpha[i], want[i], 1e-8);

  // Prediction at train points equals K alpha (plus the zero offset).
  const auto gram = bfc::gram_matrix(kernel, x);
  for (std::size_t i = 0; i < 30; ++i) {
    double ka = 0.0;
    for (std::size_t j = 0; j < 30; ++j) ka += gram[i * 30 + j] * model.alpha[j];
    EXPECT_NEAR(model.predict(x.row(i)), ka, 1e-9);
  }
}

TEST(TrainKrr, ResidualWithinContract) {
  bfc::SyntheticRng rng(7u);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.bounded(40);
    bfc::DataMatrix x(n, 4);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 4; ++c) x.at(i, c) = rng.normal();
      y[i] = rng.normal();
    }
    const double lambda = std::pow(10.0, -1.0 - static_cast<double>(rng.bounded(3)));
    const bfc::Kernel kernel{bfc::KernelType::rbf, 2.0};
    const auto model = bfc::train_krr(x, y, lambda, kernel);
    const auto gram = bfc::gram_matrix(kernel, x);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = y[i] - lambda * model.alpha[i];
      for (std::size_t j = 0; j < n; ++j) v -= gram[i * n + j] * model.alpha[j];
      resid[i] = v;
    }
    EXPECT_LE(norm(resid), 1e-8 * norm(y));
  }
}

TEST(TrainKrr, RejectsNonPositiveLambda) {
  bfc::DataMatrix x(2, 1);
  const std::vector<double> y{1.0, 2.0};
  EXPECT_THROW((void)bfc::train_krr(x, y, 0.0, {bfc::KernelType::rbf, 1.0}),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Support vector regression
// ---------------------------------------------------------------------------

TEST(TrainSvr, AllResidualsInsideTubeGiveZeroDuals) {
  const auto x = column({0.0, 1.0, 2.0, 3.0});
  const std::vector<double> y{0.05, -0.03, 0.02, -0.01};
  const auto model =
      bfc::train_svr(x, y, 0.1, 10.0, {bfc::KernelType::linear, 1.0});
  for (const double b : model.beta) EXPECT_DOUBLE_EQ(b, 0.0);
}

TEST(TrainSvr, MatchesGridOracleOnThreePoints) {
  const double eps = 0.1, c = 1.0;
  bfc::SyntheticRng rng(77u);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = column({rng.normal(), rng.normal(), rng.normal()});
    const std::vector<double> y{2.0 * rng.normal(), 2.0 * rng.normal(),
                                2.0 * rng.normal()};
    const bfc::Kernel kernel{bfc::KernelType::linear, 1.0};
    const auto model = bfc::train_svr(x, y, eps, c, kernel);

    std::vector<std::vector<double>> kmat(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) kmat[i][j] = kernel(x.row(i), x.row(j));
    const double want = oracles::svr_grid_oracle(kmat, y, eps, c);
    const double got = model.dual_objective(y);
    EXPECT_NEAR(got, want, 1e-3) << "trial " << trial;
  }
}

TEST(TrainSvr, DuplicateTrainPointPredictedWithinTube) {
  bfc::SyntheticRng rng(78u);
  bfc::DataMatrix x(12, 2);
  std::vector<double> y(12);
  for (std::size_t i = 0; i < 12; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = rng.normal();
    y[i] = std::sin(x.at(i, 0)) + 0.5 * x.at(i, 1);
  }
  const double eps = 0.05;
  const auto model =
      bfc::train_svr(x, y, eps, 1000.0, {bfc::KernelType::rbf, 1.0});
  for (std::size_t i = 0; i < 12; ++i)
    EXPECT_LE(std::abs(model.predict(x.row(i)) - y[i]), eps + 5e-3);
}

TEST(TrainSvr, KktConditionsAtConvergence) {
  bfc::SyntheticRng rng(79u);
  bfc::DataMatrix x(15, 2);
  std::vector<double> y(15);
  for (std::size_t i = 0; i < 15; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = rng.normal();
    y[i] = x.at(i, 0) * x.at(i, 1) + 0.3 * rng.normal();
  }
  const double eps = 0.1, c = 2.0;
  const auto model = bfc::train_svr(x, y, eps, c, {bfc::KernelType::rbf, 1.2});
  const double tol = 5e-3;
  for (std::size_t i = 0; i < 15; ++i) {
    const double beta = model.beta[i];
    EXPECT_LE(std::abs(beta), c);  // box holds exactly
    const double resid = y[i] - model.predict(x.row(i));
    if (std::abs(beta) < 1e-12) {
      EXPECT_LE(std::abs(resid), eps + tol);
    } else if (beta > 0.0 && beta < c - 1e-12) {
      EXPECT_NEAR(resid, eps, tol);
    } else if (beta < 0.0 && beta > -c + 1e-12) {
      EXPECT_NEAR(resid, -eps, tol);
    } else if (beta >= c - 1e-12) {
      EXPECT_GE(resid, eps - tol);
    } else {
      EXPECT_LE(resid, -eps + tol);
    }
  }
}

TEST(TrainSvr, IterationCapReportsDualityGap) {
  bfc::SyntheticRng rng(80u);
  bfc::DataMatrix x(20, 2);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x.at(i, 0) = rng.normal();
    x.at(i, 1) = rng.normal();
    y[i] = 5.0 * rng.normal();
  }
  bfc::SvrOptions opts;
  opts.max_iterations = 2;
  try {
    (void)bfc::train_svr(x, y, 0.01, 100.0, {bfc::KernelType::rbf, 1.0}, opts);
    FAIL() << "expected the iteration cap to trip";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("duality gap"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Routing and evaluation
// ---------------------------------------------------------------------------

namespace {

bfc::RegressionEnsemble toy_ensemble(std::vector<std::vector<double>> centers) {
  bfc::RegressionEnsemble e;
  e.kind = bfc::ModelKind::lr;
  e.processes = 1;
  for (std::size_t g = 0; g < centers.size(); ++g) {
    bfc::GroupModel gm;
    gm.group_id = static_cast<std::uint32_t>(g);
    gm.process = 0;
    const std::size_t d = centers[g].size();
    gm.center = std::move(centers[g]);
    std::vector<double> w(d + 1, 0.0);
    w[d] = static_cast<double>(g);  // group g predicts the constant g
    gm.model = bfc::LinearModel{std::move(w)};
    e.groups.push_back(std::move(gm));
  }
  return e;
}

}  // namespace

TEST(Route, CenterHitRoutesToItsGroup) {
  const auto e = toy_ensemble({{0.0}, {5.0}, {9.0}});
  const std::vector<double> q{5.0};
  EXPECT_EQ(e.route(q), 1u);
}

TEST(Route, EquidistantTieGoesToLowerGroupId) {
  const auto e = toy_ensemble({{0.0}, {2.0}});
  const std::vector<double> q{1.0};
  EXPECT_EQ(e.route(q), 0u);
}

TEST(Route, MatchesIndependentScan) {
  bfc::SyntheticRng rng(91u);
  std::vector<std::vector<double>> centers;
  for (int g = 0; g < 12; ++g) centers.push_back({rng.normal(), rng.normal()});
  const auto e = toy_ensemble(std::vector<std::vector<double>>(centers));
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> q{rng.normal(), rng.normal()};
    std::size_t want = 0;
    double best = oracles::naive_distance(q, centers[0]);
    for (std::size_t g = 1; g < centers.size(); ++g) {
      const double d = oracles::naive_distance(q, centers[g]);
      if (d < best) {
        best = d;
        want = g;
      }
    }
    EXPECT_EQ(e.route(q), want);
  }
}

TEST(Route, InvariantUnderUniformScaling) {
  bfc::SyntheticRng rng(92u);
  std::vector<std::vector<double>> centers;
  for (int g = 0; g < 8; ++g) centers.push_back({rng.normal(), rng.normal()});
  std::vector<std::vector<double>> scaled = centers;
  for (auto& c : scaled)
    for (auto& v : c) v *= 1000.0;
  const auto e1 = toy_ensemble(std::move(centers));
  const auto e2 = toy_ensemble(std::move(scaled));
  for (int t = 0; t < 100; ++t) {
    std::vector<double> q{rng.normal(), rng.normal()};
    std::vector<double> qs{q[0] * 1000.0, q[1] * 1000.0};
    EXPECT_EQ(e1.route(q), e2.route(qs));
  }
}

TEST(Evaluate, PerfectPredictionsGiveZero) {
  auto e = toy_ensemble({{0.0}, {10.0}});
  bfc::DataMatrix test(2, 1);
  test.at(0, 0) = 0.1;
  test.at(1, 0) = 9.5;
  const std::vector<double> y{0.0, 1.0};  // group g predicts g
  const auto report = bfc::evaluate(test, y, e);
  EXPECT_DOUBLE_EQ(report.mse, 0.0);
}

TEST(Evaluate, KnownResiduals) {
  // Residuals {1, -1, 2} -> MSE = 6/3 = 2.
  auto e = toy_ensemble({{0.0}});
  bfc::DataMatrix test(3, 1);
  const std::vector<double> y{-1.0, 1.0, -2.0};  // model predicts 0
  const auto report = bfc::evaluate(test, y, e);
  EXPECT_DOUBLE_EQ(report.mse, 2.0);
}

TEST(Evaluate, ProcessOwnershipDoesNotChangeMse) {
  bfc::SyntheticRng rng(93u);
  std::vector<std::vector<double>> centers;
  for (int g = 0; g < 10; ++g) centers.push_back({rng.normal(), rng.normal()});
  auto e1 = toy_ensemble(std::move(centers));
  auto e8 = e1;
  e8.processes = 8;
  for (std::size_t g = 0; g < e8.groups.size(); ++g)
    e8.groups[g].process = static_cast<std::uint32_t>(g % 8);
  bfc::DataMatrix test(300, 2);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    test.at(i, 0) = rng.normal();
    test.at(i, 1) = rng.normal();
    y[i] = rng.normal();
  }
  const double m1 = bfc::evaluate(test, y, e1).mse;
  const double m8 = bfc::evaluate(test, y, e8).mse;
  EXPECT_NEAR(m1, m8, 1e-12 * std::abs(m1));
}

TEST(Evaluate, WorkerCountDoesNotChangeMse) {
  bfc::SyntheticRng rng(94u);
  auto e = toy_ensemble({{0.0, 0.0}, {3.0, 3.0}});
  bfc::DataMatrix test(101, 2);
  std::vector<double> y(101);
  for (std::size_t i = 0; i < 101; ++i) {
    test.at(i, 0) = rng.normal();
    test.at(i, 1) = rng.normal();
    y[i] = rng.normal();
  }
  EXPECT_EQ(bfc::evaluate(test, y, e, 1).mse, bfc::evaluate(test, y, e, 8).mse);
}
