#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's solvers; they re-derive each quantity by the most
// literal route available.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace factest::oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues of X X' / (T p), always from the full T x T matrix, descending.
inline Vector full_gram_eigenvalues(const Matrix& x) {
  const Matrix gram = x * x.transpose() / (static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

/// Literal argmax of mu_k / mu_{k+1}; a numerically zero denominator counts
/// as +inf and the first maximum wins.
inline Index ratio_scan(const Vector& mu, Index k_max) {
  Index best = 1;
  double best_ratio = -1.0;
  for (Index k = 1; k <= k_max; ++k) {
    const double den = mu[k];
    const double ratio = den <= 1e-12 * mu[0] ? std::numeric_limits<double>::infinity() : mu[k - 1] / den;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

/// Projector onto the leading-k left singular vectors of X.
inline Matrix svd_projector(const Matrix& x, Index k) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU);
  const Matrix u = svd.matrixU().leftCols(k);
  return u * u.transpose();
}

/// X - Z (Z'Z)^{-1} Z' X via the normal equations.
inline Matrix normal_equations_residual(const Matrix& z, const Matrix& x) {
  const Matrix ztz = z.transpose() * z;
  return x - z * ztz.inverse() * (z.transpose() * x);
}

/// 2/T max_j |sum_t u_tj y_t| with explicit loops.
inline double naive_lambda_bar(const Matrix& u, const Vector& y) {
  double best = 0.0;
  for (Index j = 0; j < u.cols(); ++j) {
    double s = 0.0;
    for (Index t = 0; t < u.rows(); ++t) s += u(t, j) * y[t];
    best = std::max(best, std::abs(s));
  }
  return 2.0 * best / static_cast<double>(u.rows());
}

/// max_j |(2/T) sum_t u_tj r_t e_t| with explicit loops.
inline double naive_criterion(const Matrix& u, const Vector& r, const Vector& e) {
  double best = 0.0;
  for (Index j = 0; j < u.cols(); ++j) {
    double s = 0.0;
    for (Index t = 0; t < u.rows(); ++t) s += u(t, j) * r[t] * e[t];
    best = std::max(best, std::abs(2.0 * s / static_cast<double>(u.rows())));
  }
  return best;
}

inline double lasso_objective(const Matrix& u, const Vector& y, const Vector& beta, double lambda) {
  return (y - u * beta).squaredNorm() / static_cast<double>(u.rows()) + lambda * beta.lpNorm<1>();
}

/// Accelerated proximal gradient (FISTA) on (1/T)||y - U b||^2 + lambda ||b||_1.
inline Vector proximal_gradient_lasso(const Matrix& u, const Vector& y, double lambda, int iterations = 100000) {
  const double t = static_cast<double>(u.rows());
  Eigen::JacobiSVD<Matrix> svd(u);
  const double lipschitz = 2.0 / t * svd.singularValues()[0] * svd.singularValues()[0];
  const double step = 1.0 / lipschitz;
  Vector beta = Vector::Zero(u.cols());
  Vector z = beta;
  double momentum = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector grad = -2.0 / t * (u.transpose() * (y - u * z));
    Vector next = z - step * grad;
    for (Index j = 0; j < next.size(); ++j) {
      const double v = next[j];
      next[j] = v > step * lambda ? v - step * lambda : (v < -step * lambda ? v + step * lambda : 0.0);
    }
    const double next_momentum = (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0;
    z = next + ((momentum - 1.0) / next_momentum) * (next - beta);
    beta = next;
    momentum = next_momentum;
  }
  return beta;
}

/// Smallest sample value q with #{draws <= q} / L >= 1 - alpha, by scanning
/// every candidate.
inline double inf_quantile(const std::vector<double>& draws, double alpha) {
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  const double l = static_cast<double>(sorted.size());
  for (double q : sorted) {
    const auto count = std::count_if(sorted.begin(), sorted.end(), [q](double d) { return d <= q; });
    if (static_cast<double>(count) >= (1.0 - alpha) * l - 1e-9) return q;
  }
  return sorted.back();
}

/// 1-based smallest m with q[m'] <= lambda[m'] for every m' >= m, or 0 when
/// no m qualifies. Checks every candidate m against the full tail.
inline Index literal_m_hat(const std::vector<double>& q, const std::vector<double>& lambda) {
  const auto size = static_cast<Index>(q.size());
  for (Index m = 0; m < size; ++m) {
    bool all = true;
    for (Index mp = m; mp < size; ++mp) all = all && q[static_cast<std::size_t>(mp)] <= lambda[static_cast<std::size_t>(mp)];
    if (all) return m + 1;
  }
  return 0;
}

}  // namespace factest::oracle
