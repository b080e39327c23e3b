#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "factest/bootstrap_test.hpp"
#include "factest/factor_model.hpp"
#include "factest/types.hpp"

namespace factest {

/// How the sparse coefficient vector scales with the signal strength m.
enum class BetaPattern {
  TwoSparse,  ///< (1, 0.5, 0, ..., 0) * m
  Geometric,  ///< (1, 0.5, 0.25, ...) * m
};

/// Data-generating process: K AR(1) factors with N(0, I) stationary law,
/// U[-1, 1] loadings, AR(1) idiosyncratic shocks with stationary law
/// N(0, Sigma), Sigma_ij = decay^|i-j|, and AR(1) errors with N(0, 1)
/// stationary law. The first period is drawn from the stationary law.
///
///     y_t = f_t' gamma + u_t' beta + eps_t
///     x_t = B f_t + u_t
struct SimulationConfig {
  std::string label = "custom";
  Index periods = 100;      ///< T
  Index regressors = 100;   ///< p
  Index factors = 2;        ///< K
  double rho_f = 0.0;
  double rho_u = 0.0;
  double rho_e = 0.0;
  double signal = 0.0;      ///< m
  Vector gamma_star = Vector::Constant(2, 0.5);
  double sigma_decay = 0.6;
  BetaPattern beta_pattern = BetaPattern::TwoSparse;

  Index reps = 2000;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> alphas{0.1, 0.05, 0.01};
  TestConfig test;            ///< test.seed is ignored; each replication derives its own
  std::size_t threads = 1;    ///< replication workers; 0 = hardware concurrency

  /// Presets for the three dependence designs:
  /// 1: rho_f = rho_u = rho_e = 0; 2: 0.6, 0.1, 0; 3: 0.6, 0.1, 0.1.
  static SimulationConfig design(int number);

  Vector beta_star() const;
  void validate() const;
};

/// Toeplitz matrix with entries decay^|i-j|.
Matrix toeplitz_covariance(Index size, double decay);

/// Draws N(0, Sigma) vectors through a Cholesky factor computed once.
class GaussianSampler {
 public:
  /// Throws FactorizationError unless sigma is symmetric positive definite.
  explicit GaussianSampler(const Matrix& sigma);

  /// factor * z for a vector (or columns) of standard normals.
  Vector transform(const Vector& z) const { return factor_ * z; }
  Matrix transform(const Matrix& z) const { return factor_ * z; }

  const Matrix& factor() const { return factor_; }
  Index dimension() const { return factor_.rows(); }

 private:
  Matrix factor_;  // lower triangular
};

/// Shared, cached sampler for toeplitz_covariance(size, decay).
std::shared_ptr<const GaussianSampler> toeplitz_sampler(Index size, double decay);

/// All latent pieces of one simulated panel.
struct SimulatedPanel {
  PanelData data;
  Matrix factors;        ///< T x K
  Matrix loadings;       ///< p x K
  Matrix idiosyncratic;  ///< T x p
  Vector errors;         ///< T
};

class PanelGenerator {
 public:
  explicit PanelGenerator(SimulationConfig config);

  /// Replication `rep` draws from streams (seed, "dgp/<part>", rep) with
  /// part in {loadings, factors, idiosyncratic, errors}.
  SimulatedPanel generate_components(Index rep) const;
  PanelData generate(Index rep) const { return generate_components(rep).data; }

  const SimulationConfig& config() const { return config_; }

 private:
  SimulationConfig config_;
  Vector beta_;
  std::shared_ptr<const GaussianSampler> sampler_;
};

PanelData generate_panel(const SimulationConfig& config, Index rep);

struct RejectionRow {
  std::string design;
  Index periods = 0;
  Index regressors = 0;
  double signal = 0.0;
  double alpha = 0.0;
  Index reps = 0;
  Index rejections = 0;
  Index degenerate_count = 0;
  /// rejections / (reps - degenerate_count); 0 when every replication was degenerate.
  double reject_rate = 0.0;
  double seconds = 0.0;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
};

/// One row per alpha. Replications run in parallel; the bootstrap of
/// replication r is seeded from (seed, "rep", r), so results do not depend
/// on the worker count.
RejectionTable run_monte_carlo(const SimulationConfig& config);

}  // namespace factest
