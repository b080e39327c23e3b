#pragma once

#include <optional>
#include <string>
#include <vector>

#include "factest/types.hpp"

namespace factest {

/// Observed sample: outcome y (T), regressors x (T x p) and optional
/// additional regressors w (T x l) that enter the outcome equation directly.
/// Rows are time periods.
struct PanelData {
  Vector y;
  Matrix x;
  std::optional<Matrix> w;

  // Optional labels; empty means "unnamed".
  std::vector<std::string> x_names;
  std::vector<std::string> w_names;
  std::vector<std::string> dates;

  Index periods() const { return y.size(); }
  Index regressors() const { return x.cols(); }
  Index extra_regressors() const { return w ? w->cols() : 0; }

  /// Throws DataError on shape mismatch or non-finite entries.
  void validate() const;
};

/// Principal-component factors of a regressor matrix.
struct FactorEstimate {
  Matrix factors;       ///< T x K, factors' factors = T * I
  Matrix loadings;      ///< p x K, factors' x / T
  Vector eigenvalues;   ///< all min(T, p) eigenvalues of x x' / (T p), descending
  /// Set when the K-th and (K+1)-th eigenvalues coincide within a relative
  /// gap of 1e-10, so the kept eigenspace is not uniquely determined.
  bool degenerate_boundary = false;
};

/// Output of the residualization step.
struct FactorDecomposition {
  Index k_hat = 0;
  Matrix factors;       ///< T x k_hat
  Matrix loadings;      ///< p x k_hat
  Vector eigenvalues;   ///< as in FactorEstimate (empty when factors were supplied)
  Matrix u_hat;         ///< (I - P) x
  Vector y_tilde;       ///< (I - P) y
  bool used_w = false;
  bool degenerate_boundary = false;
  /// Orthonormal basis (T x (k_hat + l)) of the space P projects onto.
  Matrix basis;

  /// The T x T projector P = basis * basis'.
  Matrix projector() const { return basis * basis.transpose(); }
};

struct FactorOptions {
  std::optional<Index> k;       ///< fixed number of factors; estimated when empty
  std::optional<Index> k_max;   ///< ceiling for the estimator; default_k_max when empty
};

/// min(8, min(T, p) - 1).
Index default_k_max(Index periods, Index regressors);

/// All min(T, p) eigenvalues of x x' / (T p), sorted descending.
Vector gram_eigenvalues(const Matrix& x);

/// Ratios mu_k / mu_{k+1} for k = 1..k_max given descending eigenvalues.
/// A denominator at or below 1e-12 * mu_1 is treated as zero and yields +inf.
Vector eigenvalue_ratios(const Vector& eigenvalues, Index k_max);

/// Eigenvalue-ratio estimator: argmax_{1<=k<=k_max} mu_k / mu_{k+1} over the
/// eigenvalues of x x' / (T p). Ties go to the smallest k.
Index estimate_num_factors(const Matrix& x, Index k_max);

/// Leading-k principal-component factors of x. Each factor column is
/// sign-fixed so its entry of largest magnitude is positive.
FactorEstimate estimate_factors(const Matrix& x, Index k);

/// Projects x and y off the column space of the factors (and of data.w
/// when present). factors must satisfy factors' factors = T * I.
FactorDecomposition residualize(const PanelData& data, const Matrix& factors);

/// Factor-count selection, extraction and residualization in one call.
FactorDecomposition decompose(const PanelData& data, const FactorOptions& options = {});

}  // namespace factest
