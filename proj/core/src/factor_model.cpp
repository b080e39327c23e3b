#include "factest/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "factest/errors.hpp"

namespace factest {
namespace {

constexpr double kZeroEigenvalue = 1e-12;
constexpr double kDegenerateGap = 1e-10;
constexpr double kCollinearity = 1e-10;

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

// Eigen-decomposition of the smaller of x x' and x' x, largest first.
struct GramEigen {
  bool wide = true;   // true: decomposed x x' (T <= p)
  Vector values;      // unscaled eigenvalues, descending
  Matrix vectors;     // matching eigenvectors as columns
};

GramEigen gram_eigen(const Matrix& x, bool want_vectors) {
  GramEigen out;
  out.wide = x.rows() <= x.cols();
  Matrix gram = out.wide ? Matrix(x * x.transpose()) : Matrix(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      gram, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("eigen-decomposition of the Gram matrix failed");
  out.values = solver.eigenvalues().reverse();
  if (want_vectors) out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

void fix_sign(Eigen::Ref<Vector> column) {
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < column.size(); ++i) {
    const double a = std::abs(column[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (column[arg] < 0.0) column = -column;
}

Index select_by_ratio(const Vector& eigenvalues, Index k_max) {
  const Vector ratios = eigenvalue_ratios(eigenvalues, k_max);
  Index best = 0;
  for (Index k = 1; k < ratios.size(); ++k) {
    if (ratios[k] > ratios[best]) best = k;
  }
  return best + 1;
}

void check_k_max(Index k_max, Index periods, Index regressors) {
  const Index limit = std::min(periods, regressors) - 1;
  if (k_max < 1 || k_max > limit) {
    std::ostringstream msg;
    msg << "k_max must lie in [1, min(T,p)-1] = [1, " << limit << "], got " << k_max;
    throw InvalidArgument(msg.str());
  }
}

FactorEstimate factors_from_eigen(const Matrix& x, const GramEigen& eig, Index k) {
  const Index periods = x.rows();
  const Index n = std::min(x.rows(), x.cols());
  const double scale = static_cast<double>(periods) * static_cast<double>(x.cols());

  FactorEstimate out;
  out.eigenvalues = eig.values / scale;
  out.factors.resize(periods, k);
  const double root_t = std::sqrt(static_cast<double>(periods));

  if (k > 0) {
    if (eig.wide) {
      out.factors = root_t * eig.vectors.leftCols(k);
    } else {
      const double top = eig.values[0];
      const double kth = eig.values[k - 1];
      if (top > 0.0 && kth > kZeroEigenvalue * top) {
        for (Index j = 0; j < k; ++j) {
          out.factors.col(j) = x * eig.vectors.col(j) * (root_t / std::sqrt(eig.values[j]));
        }
      } else {
        // Null directions of x'x carry no information about x x'; fall
        // back to the T x T problem.
        const GramEigen full = [&] {
          GramEigen g;
          Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix(x * x.transpose()));
          g.values = solver.eigenvalues().reverse();
          g.vectors = solver.eigenvectors().rowwise().reverse();
          return g;
        }();
        out.factors = root_t * full.vectors.leftCols(k);
      }
    }
    for (Index j = 0; j < k; ++j) fix_sign(out.factors.col(j));

    if (k < n) {
      const double kept = out.eigenvalues[k - 1];
      const double dropped = out.eigenvalues[k];
      if (kept - dropped <= kDegenerateGap * std::abs(kept)) out.degenerate_boundary = true;
    }
  }
  out.loadings = x.transpose() * out.factors / static_cast<double>(periods);
  return out;
}

std::string column_label(Index column, Index k, const PanelData& data) {
  if (column < k) return "factor_" + std::to_string(column + 1);
  const Index j = column - k;
  if (j < static_cast<Index>(data.w_names.size()) && !data.w_names[j].empty()) return data.w_names[j];
  return "w_" + std::to_string(j + 1);
}

}  // namespace

void PanelData::validate() const {
  const Index t = y.size();
  if (t < 2) throw DataError("panel needs at least 2 periods");
  if (x.rows() != t) {
    std::ostringstream msg;
    msg << "x has " << x.rows() << " rows but y has " << t;
    throw DataError(msg.str());
  }
  if (x.cols() < 1) throw DataError("x needs at least one column");
  require_finite(y, "y");
  require_finite(x, "x");
  if (w) {
    if (w->rows() != t) {
      std::ostringstream msg;
      msg << "w has " << w->rows() << " rows but y has " << t;
      throw DataError(msg.str());
    }
    if (w->cols() < 1) throw DataError("w, when given, needs at least one column");
    require_finite(*w, "w");
  }
}

Index default_k_max(Index periods, Index regressors) {
  return std::min<Index>(8, std::min(periods, regressors) - 1);
}

Vector gram_eigenvalues(const Matrix& x) {
  require_finite(x, "x");
  const double scale = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
  return gram_eigen(x, false).values / scale;
}

Vector eigenvalue_ratios(const Vector& eigenvalues, Index k_max) {
  if (k_max < 1 || k_max + 1 > eigenvalues.size()) {
    throw InvalidArgument("eigenvalue_ratios: need k_max + 1 eigenvalues");
  }
  const double top = eigenvalues[0];
  if (!(top > 0.0)) throw DegenerateInput("all eigenvalues are zero; x carries no variation");
  Vector ratios(k_max);
  for (Index k = 0; k < k_max; ++k) {
    const double denom = eigenvalues[k + 1];
    ratios[k] = denom <= kZeroEigenvalue * top ? std::numeric_limits<double>::infinity()
                                               : eigenvalues[k] / denom;
  }
  return ratios;
}

Index estimate_num_factors(const Matrix& x, Index k_max) {
  check_k_max(k_max, x.rows(), x.cols());
  return select_by_ratio(gram_eigenvalues(x), k_max);
}

FactorEstimate estimate_factors(const Matrix& x, Index k) {
  if (k < 0 || k > std::min(x.rows(), x.cols())) {
    throw InvalidArgument("number of factors must lie in [0, min(T,p)]");
  }
  require_finite(x, "x");
  return factors_from_eigen(x, gram_eigen(x, k > 0), k);
}

FactorDecomposition residualize(const PanelData& data, const Matrix& factors) {
  data.validate();
  const Index periods = data.periods();
  const Index k = factors.cols();
  if (factors.rows() != periods) throw InvalidArgument("factors must have T rows");
  if (k > 0) {
    const Matrix gram = factors.transpose() * factors;
    const double t = static_cast<double>(periods);
    if ((gram - t * Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-8 * t) {
      throw InvalidArgument("factors must satisfy F'F = T I");
    }
  }

  FactorDecomposition out;
  out.k_hat = k;
  out.factors = factors;
  out.loadings = data.x.transpose() * factors / static_cast<double>(periods);
  out.used_w = data.w.has_value();

  if (!data.w) {
    if (k == 0) {
      out.basis.resize(periods, 0);
      out.u_hat = data.x;
      out.y_tilde = data.y;
      return out;
    }
    out.basis = factors / std::sqrt(static_cast<double>(periods));
  } else {
    const Index l = data.w->cols();
    if (k + l >= periods) throw InvalidArgument("need K + l < T when extra regressors are used");
    Matrix z(periods, k + l);
    z << factors, *data.w;

    // Unit-norm columns so the conditioning check does not depend on the
    // scale of w.
    Matrix normalized = z;
    for (Index j = 0; j < z.cols(); ++j) {
      const double norm = z.col(j).norm();
      if (norm == 0.0) {
        const std::string name = column_label(j, k, data);
        throw CollinearityError("column " + name + " is identically zero", {name});
      }
      normalized.col(j) /= norm;
    }
    Eigen::JacobiSVD<Matrix> svd(normalized);
    const Vector& sv = svd.singularValues();
    if (sv[sv.size() - 1] < kCollinearity * sv[0]) {
      Eigen::ColPivHouseholderQR<Matrix> qr(normalized);
      qr.setThreshold(kCollinearity);
      std::vector<std::string> offending;
      const auto& perm = qr.colsPermutation().indices();
      for (Index i = std::min<Index>(qr.rank(), z.cols() - 1); i < z.cols(); ++i) {
        offending.push_back(column_label(perm[i], k, data));
      }
      std::string msg = "factors and extra regressors are collinear; dependent columns:";
      for (const auto& name : offending) msg += " " + name;
      throw CollinearityError(msg, std::move(offending));
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    out.basis = qr.householderQ() * Matrix::Identity(periods, k + l);
  }

  out.u_hat = data.x - out.basis * (out.basis.transpose() * data.x);
  out.y_tilde = data.y - out.basis * (out.basis.transpose() * data.y);
  return out;
}

FactorDecomposition decompose(const PanelData& data, const FactorOptions& options) {
  data.validate();
  const Index periods = data.periods();
  const Index regressors = data.regressors();

  Index k = 0;
  GramEigen eig;
  if (options.k) {
    k = *options.k;
    if (k < 0 || k > std::min(periods, regressors)) {
      throw InvalidArgument("number of factors must lie in [0, min(T,p)]");
    }
    eig = gram_eigen(data.x, k > 0);
  } else {
    const Index k_max = options.k_max.value_or(default_k_max(periods, regressors));
    check_k_max(k_max, periods, regressors);
    eig = gram_eigen(data.x, true);
    const double scale = static_cast<double>(periods) * static_cast<double>(regressors);
    k = select_by_ratio(eig.values / scale, k_max);
  }

  const FactorEstimate est = factors_from_eigen(data.x, eig, k);
  FactorDecomposition out = residualize(data, est.factors);
  out.eigenvalues = est.eigenvalues;
  out.loadings = est.loadings;
  out.degenerate_boundary = est.degenerate_boundary;
  return out;
}

}  // namespace factest
