#include "factest/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "factest/errors.hpp"

namespace factest {
namespace {

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double raw_lambda_bar(const Matrix& u, const Vector& y) {
  if (u.cols() == 0) return 0.0;
  return 2.0 / static_cast<double>(u.rows()) * (u.transpose() * y).cwiseAbs().maxCoeff();
}

void check_shapes(const Matrix& u, const Vector& y) {
  if (u.rows() != y.size()) throw InvalidArgument("design and response disagree on the number of rows");
  if (u.rows() == 0) throw InvalidArgument("empty design");
}

}  // namespace

LambdaGrid LambdaGrid::equidistant(double lambda_bar, Index size) {
  if (size < 1) throw InvalidArgument("grid size must be positive");
  if (!(lambda_bar > 0.0) || !std::isfinite(lambda_bar)) {
    throw InvalidArgument("lambda_bar must be positive and finite");
  }
  LambdaGrid grid;
  grid.lambda_bar = lambda_bar;
  grid.values.resize(static_cast<std::size_t>(size));
  const double denom = static_cast<double>(size + 1);
  for (Index m = 0; m < size; ++m) {
    grid.values[static_cast<std::size_t>(m)] = static_cast<double>(m + 1) * lambda_bar / denom;
  }
  return grid;
}

void LambdaGrid::validate() const {
  if (values.empty()) throw InvalidArgument("lambda grid is empty");
  if (!(values.front() > 0.0)) throw InvalidArgument("lambda grid must be positive");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw InvalidArgument("lambda grid must be strictly increasing");
  }
  if (!(values.back() < lambda_bar)) throw InvalidArgument("lambda grid must stay below lambda_bar");
}

double compute_lambda_bar(const Matrix& u, const Vector& y) {
  check_shapes(u, y);
  const double value = raw_lambda_bar(u, y);
  if (!std::isfinite(value)) throw DataError("non-finite values in design or response");
  if (value == 0.0) {
    throw DegenerateInput("lambda_bar = 0: the response is orthogonal to every regressor");
  }
  return value;
}

double lasso_objective(const Matrix& u, const Vector& y, const Vector& beta, double lambda) {
  const Vector r = y - u * beta;
  return r.squaredNorm() / static_cast<double>(u.rows()) + lambda * beta.lpNorm<1>();
}

double kkt_violation(const Matrix& u, const Vector& y, const Vector& beta, double lambda) {
  const Vector gradient = (2.0 / static_cast<double>(u.rows())) * (u.transpose() * (y - u * beta));
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double v = beta[j] != 0.0 ? std::abs(gradient[j] - lambda * (beta[j] > 0.0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(gradient[j]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

LassoSolver::LassoSolver(const Matrix& u, const Vector& y, LassoOptions options)
    : u_(u), y_(y), options_(options) {
  check_shapes(u, y);
  if (!u.allFinite() || !y.allFinite()) throw DataError("non-finite values in design or response");
  column_sq_norms_ = u.colwise().squaredNorm().transpose();
  lambda_bar_ = raw_lambda_bar(u, y);
  const double scale = y.size() > 0 ? std::max(1.0, y.cwiseAbs().maxCoeff()) : 1.0;
  change_tolerance_ = options_.tolerance * scale;
}

LassoFit LassoSolver::fit(double lambda, const std::optional<Vector>& warm_start) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
  const Index p = u_.cols();
  const double two_over_t = 2.0 / static_cast<double>(u_.rows());

  LassoFit out;
  out.lambda = lambda;

  // Every coordinate update from beta = 0 soft-thresholds to zero.
  if (lambda >= lambda_bar_) {
    out.beta = Vector::Zero(p);
    out.residuals = y_;
    out.objective = y_.squaredNorm() / static_cast<double>(u_.rows());
    out.converged = true;
    if (options_.record_objective) out.objective_trace.push_back(out.objective);
    return out;
  }

  Vector beta = Vector::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw InvalidArgument("warm start has the wrong length");
    beta = *warm_start;
    for (Index j = 0; j < p; ++j) {
      if (column_sq_norms_[j] == 0.0) beta[j] = 0.0;
    }
  }
  Vector r = y_ - u_ * beta;

  auto update = [&](Index j) {
    const double sq = column_sq_norms_[j];
    if (sq == 0.0) return 0.0;
    const double old = beta[j];
    const double z = two_over_t * (u_.col(j).dot(r) + sq * old);
    const double fresh = soft_threshold(z, lambda) / (two_over_t * sq);
    if (fresh == old) return 0.0;
    r.noalias() -= (fresh - old) * u_.col(j);
    beta[j] = fresh;
    return std::abs(fresh - old);
  };

  std::vector<Index> active;
  bool full_sweep = true;
  int sweeps = 0;
  while (sweeps < options_.max_sweeps) {
    double max_change = 0.0;
    if (full_sweep) {
      for (Index j = 0; j < p; ++j) max_change = std::max(max_change, update(j));
    } else {
      for (Index j : active) max_change = std::max(max_change, update(j));
    }
    ++sweeps;
    if (options_.record_objective) {
      out.objective_trace.push_back(r.squaredNorm() / static_cast<double>(u_.rows()) +
                                    lambda * beta.lpNorm<1>());
    }

    if (max_change <= change_tolerance_) {
      if (full_sweep) {
        if (kkt_violation(u_, y_, beta, lambda) <= options_.kkt_tolerance * lambda) {
          out.converged = true;
          break;
        }
      } else {
        full_sweep = true;
      }
    } else if (full_sweep) {
      active.clear();
      for (Index j = 0; j < p; ++j) {
        if (beta[j] != 0.0) active.push_back(j);
      }
      full_sweep = false;
    }
  }

  out.iterations = sweeps;
  out.residuals = y_ - u_ * beta;
  out.objective = out.residuals.squaredNorm() / static_cast<double>(u_.rows()) + lambda * beta.lpNorm<1>();
  out.beta = std::move(beta);
  return out;
}

std::vector<LassoFit> LassoSolver::fit_path(const LambdaGrid& grid) const {
  grid.validate();
  std::vector<LassoFit> path;
  path.reserve(grid.values.size());
  std::optional<Vector> warm;
  for (auto it = grid.values.rbegin(); it != grid.values.rend(); ++it) {
    path.push_back(fit(*it, warm));
    warm = path.back().beta;
  }
  return path;
}

LassoFit fit(const Matrix& u, const Vector& y, double lambda, const std::optional<Vector>& warm_start,
             const LassoOptions& options) {
  return LassoSolver(u, y, options).fit(lambda, warm_start);
}

std::vector<LassoFit> fit_path(const Matrix& u, const Vector& y, const LambdaGrid& grid,
                               const LassoOptions& options) {
  return LassoSolver(u, y, options).fit_path(grid);
}

}  // namespace factest
