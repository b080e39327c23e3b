#pragma once

#include <optional>
#include <vector>

#include "factest/types.hpp"

namespace factest {

/// Penalized least squares
///
///     min_beta (1/T) ||y - U beta||_2^2 + lambda ||beta||_1
///
/// solved by cyclic coordinate descent on the partial residual. Note the
/// loss carries no 1/2 factor; lambda_bar below and the bootstrap
/// criterion use the matching 2/T scaling.
struct LassoOptions {
  /// Converged when the largest coefficient change over a sweep is at most
  /// tolerance * max(1, ||y||_inf) and the KKT residual is at most
  /// kkt_tolerance * lambda.
  double tolerance = 1e-8;
  double kkt_tolerance = 1e-7;
  int max_sweeps = 100000;
  /// Record the objective after every full sweep in LassoFit::objective_trace.
  bool record_objective = false;
};

struct LassoFit {
  double lambda = 0.0;
  Vector beta;
  Vector residuals;   ///< y - U beta
  double objective = 0.0;
  int iterations = 0; ///< coordinate sweeps performed
  bool converged = false;
  std::vector<double> objective_trace;
};

/// Strictly increasing penalties 0 < lambda_1 < ... < lambda_M < lambda_bar.
struct LambdaGrid {
  std::vector<double> values;
  double lambda_bar = 0.0;

  /// lambda_m = m * lambda_bar / (M + 1), m = 1..M.
  static LambdaGrid equidistant(double lambda_bar, Index size);

  Index size() const { return static_cast<Index>(values.size()); }
  void validate() const;
};

/// 2/T * ||U' y||_inf. Throws DegenerateInput when it is zero.
double compute_lambda_bar(const Matrix& u, const Vector& y);

double lasso_objective(const Matrix& u, const Vector& y, const Vector& beta, double lambda);

/// Largest violation of the optimality conditions at beta, in penalty units:
/// |g_j - lambda sign(beta_j)| for active j and max(0, |g_j| - lambda)
/// otherwise, with g = (2/T) U'(y - U beta).
double kkt_violation(const Matrix& u, const Vector& y, const Vector& beta, double lambda);

/// Coordinate-descent solver bound to one design matrix; caches column norms
/// so a whole penalty path reuses them.
class LassoSolver {
 public:
  LassoSolver(const Matrix& u, const Vector& y, LassoOptions options = {});

  LassoFit fit(double lambda, const std::optional<Vector>& warm_start = std::nullopt) const;

  /// Fits from the largest penalty down, each warm-started at the previous
  /// solution. Result is ordered by descending lambda.
  std::vector<LassoFit> fit_path(const LambdaGrid& grid) const;

  double lambda_bar() const { return lambda_bar_; }

 private:
  const Matrix& u_;
  const Vector& y_;
  LassoOptions options_;
  Vector column_sq_norms_;
  double lambda_bar_ = 0.0;
  double change_tolerance_ = 0.0;
};

LassoFit fit(const Matrix& u, const Vector& y, double lambda,
             const std::optional<Vector>& warm_start = std::nullopt,
             const LassoOptions& options = {});

std::vector<LassoFit> fit_path(const Matrix& u, const Vector& y, const LambdaGrid& grid,
                               const LassoOptions& options = {});

}  // namespace factest
