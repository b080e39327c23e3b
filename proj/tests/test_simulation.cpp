#include <cmath>

#include "doctest.h"
#include "factest/errors.hpp"
#include "factest/simulation.hpp"
#include "test_util.hpp"

using namespace factest;

namespace {

double lag1_autocorrelation(const Vector& v) {
  const Vector c = v.array() - v.mean();
  return c.head(c.size() - 1).dot(c.tail(c.size() - 1)) / c.squaredNorm();
}

}  // namespace

TEST_CASE("design presets") {
  const auto d1 = SimulationConfig::design(1);
  CHECK(d1.rho_f == 0.0);
  CHECK(d1.rho_u == 0.0);
  CHECK(d1.rho_e == 0.0);
  const auto d2 = SimulationConfig::design(2);
  CHECK(d2.rho_f == 0.6);
  CHECK(d2.rho_u == 0.1);
  CHECK(d2.rho_e == 0.0);
  const auto d3 = SimulationConfig::design(3);
  CHECK(d3.rho_e == 0.1);
  CHECK(d3.periods == 100);
  CHECK(d3.regressors == 100);
  CHECK(d3.factors == 2);
  CHECK(d3.gamma_star == Vector::Constant(2, 0.5));
  CHECK_THROWS_AS(SimulationConfig::design(0), InvalidArgument);
  CHECK_THROWS_AS(SimulationConfig::design(4), InvalidArgument);
}

TEST_CASE("configuration validation") {
  auto cfg = SimulationConfig::design(1);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.rho_f = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.signal = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.factors = 3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.alphas = {0.05, 1.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.reps = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("beta_star patterns") {
  auto cfg = SimulationConfig::design(1);
  cfg.regressors = 5;
  cfg.signal = 0.4;
  CHECK(cfg.beta_star() == (Vector(5) << 0.4, 0.2, 0, 0, 0).finished());
  cfg.beta_pattern = BetaPattern::Geometric;
  CHECK(cfg.beta_star() == (Vector(5) << 0.4, 0.2, 0.1, 0.05, 0.025).finished());
  cfg.signal = 0.0;
  CHECK(cfg.beta_star() == Vector::Zero(5));
}

TEST_CASE("Toeplitz covariance and its sampler") {
  const Matrix sigma = toeplitz_covariance(4, 0.6);
  CHECK(sigma(0, 0) == 1.0);
  CHECK(sigma(0, 3) == doctest::Approx(0.216));
  CHECK(sigma(2, 1) == doctest::Approx(0.6));

  const GaussianSampler s(sigma);
  CHECK(factest::testing::max_abs(s.factor() * s.factor().transpose() - sigma) < 1e-10);
  CHECK(toeplitz_sampler(4, 0.6) == toeplitz_sampler(4, 0.6));

  const GaussianSampler identity(Matrix::Identity(3, 3));
  CHECK(identity.factor() == Matrix::Identity(3, 3));

  Matrix two(2, 2);
  two << 1, 0.6, 0.6, 1;
  const GaussianSampler corr(two);
  const Index n = 100000;
  const Matrix draws = corr.transform(Matrix(standard_normal_vector({3, "sampler", 0}, 2 * n).reshaped(2, n)));
  const double r = draws.row(0).dot(draws.row(1)) / std::sqrt(draws.row(0).squaredNorm() * draws.row(1).squaredNorm());
  CHECK(std::abs(r - 0.6) < 0.01);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianSampler{indefinite}, FactorizationError);
  Matrix asym(2, 2);
  asym << 1, 0.2, 0.1, 1;
  CHECK_THROWS_AS(GaussianSampler{asym}, FactorizationError);
}

TEST_CASE("panel structure matches the model equations") {
  auto cfg = SimulationConfig::design(3);
  cfg.periods = 30;
  cfg.regressors = 12;
  cfg.signal = 0.3;
  const SimulatedPanel panel = PanelGenerator(cfg).generate_components(4);
  CHECK(panel.data.x.rows() == 30);
  CHECK(panel.data.x.cols() == 12);
  CHECK(factest::testing::max_abs(panel.data.x - panel.factors * panel.loadings.transpose() - panel.idiosyncratic) < 1e-12);
  const Vector y = panel.factors * cfg.gamma_star + panel.idiosyncratic * cfg.beta_star() + panel.errors;
  CHECK(factest::testing::max_abs(panel.data.y - y) < 1e-12);
  CHECK(panel.loadings.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("generated panels are deterministic and differ across replications") {
  const auto cfg = SimulationConfig::design(2);
  const PanelData a = generate_panel(cfg, 7);
  const PanelData b = generate_panel(cfg, 7);
  const PanelData c = generate_panel(cfg, 8);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.x != c.x);

  const SimulatedPanel pa = PanelGenerator(cfg).generate_components(7);
  const SimulatedPanel pc = PanelGenerator(cfg).generate_components(8);
  CHECK(pa.loadings != pc.loadings);
}

TEST_CASE("designs share shocks; signal changes only y") {
  auto d2 = SimulationConfig::design(2);
  auto d3 = SimulationConfig::design(3);
  const SimulatedPanel p2 = PanelGenerator(d2).generate_components(3);
  const SimulatedPanel p3 = PanelGenerator(d3).generate_components(3);
  CHECK(p2.data.x == p3.data.x);
  CHECK(p2.factors == p3.factors);
  CHECK(p2.errors[0] == p3.errors[0]);
  CHECK(p2.errors != p3.errors);

  auto strong = d2;
  strong.signal = 0.4;
  const SimulatedPanel ps = PanelGenerator(strong).generate_components(3);
  CHECK(ps.data.x == p2.data.x);
  CHECK(factest::testing::max_abs(ps.data.y - p2.data.y - p2.idiosyncratic * strong.beta_star()) < 1e-12);
}

TEST_CASE("AR(1) processes have the configured persistence and unit variance") {
  auto cfg = SimulationConfig::design(3);
  cfg.periods = 20000;
  cfg.regressors = 3;
  cfg.rho_f = 0.6;
  cfg.rho_u = 0.3;
  cfg.rho_e = 0.5;
  const SimulatedPanel panel = PanelGenerator(cfg).generate_components(0);
  const double t = static_cast<double>(cfg.periods);
  const double acf_se = 1.0 / std::sqrt(t);
  CHECK(std::abs(lag1_autocorrelation(panel.factors.col(0)) - 0.6) < 5 * acf_se);
  CHECK(std::abs(lag1_autocorrelation(panel.idiosyncratic.col(1)) - 0.3) < 5 * acf_se);
  CHECK(std::abs(lag1_autocorrelation(panel.errors) - 0.5) < 5 * acf_se);

  for (double rho : {0.6, 0.3, 0.5}) {
    const Vector& v = rho == 0.6 ? Vector(panel.factors.col(1)) : rho == 0.3 ? Vector(panel.idiosyncratic.col(2)) : panel.errors;
    const double var = (v.array() - v.mean()).square().sum() / (t - 1.0);
    const double se = std::sqrt(2.0 * (1.0 + rho * rho) / ((1.0 - rho * rho) * t));
    CHECK(std::abs(var - 1.0) < 4.0 * se);
  }
}

TEST_CASE("stationary start: early-period variance equals the long-run variance") {
  auto cfg = SimulationConfig::design(2);
  cfg.periods = 3;
  cfg.regressors = 2;
  cfg.rho_f = 0.9;
  const Index reps = 20000;
  double first = 0.0;
  double third = 0.0;
  const PanelGenerator gen(cfg);
  for (Index r = 0; r < reps; ++r) {
    const SimulatedPanel p = gen.generate_components(r);
    first += p.factors(0, 0) * p.factors(0, 0);
    third += p.factors(2, 0) * p.factors(2, 0);
  }
  const double se = std::sqrt(2.0 / static_cast<double>(reps));
  CHECK(std::abs(first / reps - 1.0) < 4 * se);
  CHECK(std::abs(third / reps - 1.0) < 4 * se);
}

TEST_CASE("idiosyncratic cross-sectional covariance is Toeplitz") {
  auto cfg = SimulationConfig::design(1);
  cfg.periods = 100000;
  cfg.regressors = 5;
  const SimulatedPanel panel = PanelGenerator(cfg).generate_components(0);
  const Matrix cov = panel.idiosyncratic.transpose() * panel.idiosyncratic / static_cast<double>(cfg.periods);
  CHECK(factest::testing::max_abs(cov - toeplitz_covariance(5, 0.6)) < 0.02);
}

TEST_CASE("regressing y on the true components recovers the coefficients") {
  auto cfg = SimulationConfig::design(1);
  cfg.periods = 10000;
  cfg.regressors = 10;
  cfg.signal = 0.4;
  const SimulatedPanel panel = PanelGenerator(cfg).generate_components(1);
  Matrix z(cfg.periods, 12);
  z << panel.factors, panel.idiosyncratic;
  const Vector coef = z.colPivHouseholderQr().solve(panel.data.y);
  Vector truth(12);
  truth << cfg.gamma_star, cfg.beta_star();
  CHECK((coef - truth).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("run_monte_carlo is deterministic across worker counts") {
  auto cfg = SimulationConfig::design(1);
  cfg.periods = 40;
  cfg.regressors = 40;
  cfg.reps = 6;
  cfg.signal = 0.3;
  cfg.test.grid_size = 15;
  cfg.test.bootstrap_draws = 30;
  cfg.threads = 1;
  const RejectionTable a = run_monte_carlo(cfg);
  cfg.threads = 4;
  const RejectionTable b = run_monte_carlo(cfg);
  REQUIRE(a.rows.size() == 3);
  REQUIRE(b.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.rows[i].rejections == b.rows[i].rejections);
    CHECK(a.rows[i].reject_rate == b.rows[i].reject_rate);
    CHECK(a.rows[i].alpha == cfg.alphas[i]);
    CHECK(a.rows[i].reps == 6);
    CHECK(a.rows[i].design == "design1");
    CHECK(a.rows[i].reject_rate == doctest::Approx(a.rows[i].rejections / 6.0));
  }
}
