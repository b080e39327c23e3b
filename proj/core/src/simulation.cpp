#include "factest/simulation.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "factest/errors.hpp"
#include "factest/parallel.hpp"
#include "factest/random.hpp"

namespace factest {
namespace {

void check_ar(double rho, const char* name) {
  if (!(std::abs(rho) < 1.0)) {
    std::ostringstream msg;
    msg << name << " must satisfy |rho| < 1, got " << rho;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

SimulationConfig SimulationConfig::design(int number) {
  SimulationConfig cfg;
  switch (number) {
    case 1:
      break;
    case 2:
      cfg.rho_f = 0.6;
      cfg.rho_u = 0.1;
      break;
    case 3:
      cfg.rho_f = 0.6;
      cfg.rho_u = 0.1;
      cfg.rho_e = 0.1;
      break;
    default:
      throw InvalidArgument("design must be 1, 2 or 3, got " + std::to_string(number));
  }
  cfg.label = "design" + std::to_string(number);
  return cfg;
}

Vector SimulationConfig::beta_star() const {
  Vector beta = Vector::Zero(regressors);
  if (beta_pattern == BetaPattern::TwoSparse) {
    if (regressors >= 1) beta[0] = signal;
    if (regressors >= 2) beta[1] = 0.5 * signal;
  } else {
    double weight = 1.0;
    for (Index j = 0; j < regressors; ++j, weight *= 0.5) beta[j] = weight * signal;
  }
  return beta;
}

void SimulationConfig::validate() const {
  if (periods < 2) throw InvalidArgument("T must be at least 2");
  if (regressors < 1) throw InvalidArgument("p must be positive");
  if (factors < 1) throw InvalidArgument("K must be positive");
  if (gamma_star.size() != factors) throw InvalidArgument("gamma_star must have K entries");
  check_ar(rho_f, "rho_f");
  check_ar(rho_u, "rho_u");
  check_ar(rho_e, "rho_e");
  if (!(signal >= 0.0) || !std::isfinite(signal)) throw InvalidArgument("signal strength m must be nonnegative");
  if (!(std::abs(sigma_decay) < 1.0)) throw InvalidArgument("Toeplitz decay must satisfy |decay| < 1");
  if (reps < 1) throw InvalidArgument("reps must be positive");
  if (alphas.empty()) throw InvalidArgument("at least one alpha is required");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alphas must lie in (0, 1)");
  }
  test.validate();
}

Matrix toeplitz_covariance(Index size, double decay) {
  Matrix sigma(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) sigma(i, j) = std::pow(decay, static_cast<double>(std::abs(i - j)));
  }
  return sigma;
}

GaussianSampler::GaussianSampler(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw FactorizationError("covariance must be square and non-empty");
  if (!sigma.allFinite()) throw FactorizationError("covariance has non-finite entries");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw FactorizationError("covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw FactorizationError("covariance is not positive definite");
  factor_ = llt.matrixL();
}

std::shared_ptr<const GaussianSampler> toeplitz_sampler(Index size, double decay) {
  static std::mutex mutex;
  static std::map<std::pair<Index, double>, std::shared_ptr<const GaussianSampler>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{size, decay}];
  if (!slot) slot = std::make_shared<const GaussianSampler>(toeplitz_covariance(size, decay));
  return slot;
}

PanelGenerator::PanelGenerator(SimulationConfig config) : config_(std::move(config)) {
  config_.validate();
  beta_ = config_.beta_star();
  sampler_ = toeplitz_sampler(config_.regressors, config_.sigma_decay);
}

SimulatedPanel PanelGenerator::generate_components(Index rep) const {
  const Index t_len = config_.periods;
  const Index p = config_.regressors;
  const Index k = config_.factors;
  const std::uint64_t seed = config_.seed;
  const auto index = static_cast<std::uint64_t>(rep);

  SimulatedPanel out;
  out.loadings = uniform_vector({seed, "dgp/loadings", index}, p * k, -1.0, 1.0).reshaped(p, k);

  // Innovations are laid out one period per column.
  const Matrix factor_shocks = standard_normal_vector({seed, "dgp/factors", index}, k * t_len).reshaped(k, t_len);
  const Matrix idio_shocks =
      sampler_->transform(Matrix(standard_normal_vector({seed, "dgp/idiosyncratic", index}, p * t_len).reshaped(p, t_len)));
  const Vector error_shocks = standard_normal_vector({seed, "dgp/errors", index}, t_len);

  const double sf = std::sqrt(1.0 - config_.rho_f * config_.rho_f);
  const double su = std::sqrt(1.0 - config_.rho_u * config_.rho_u);
  const double se = std::sqrt(1.0 - config_.rho_e * config_.rho_e);

  out.factors.resize(t_len, k);
  out.idiosyncratic.resize(t_len, p);
  out.errors.resize(t_len);
  out.factors.row(0) = factor_shocks.col(0).transpose();
  out.idiosyncratic.row(0) = idio_shocks.col(0).transpose();
  out.errors[0] = error_shocks[0];
  for (Index t = 1; t < t_len; ++t) {
    out.factors.row(t) = config_.rho_f * out.factors.row(t - 1) + sf * factor_shocks.col(t).transpose();
    out.idiosyncratic.row(t) = config_.rho_u * out.idiosyncratic.row(t - 1) + su * idio_shocks.col(t).transpose();
    out.errors[t] = config_.rho_e * out.errors[t - 1] + se * error_shocks[t];
  }

  out.data.x = out.factors * out.loadings.transpose() + out.idiosyncratic;
  out.data.y = out.factors * config_.gamma_star + out.idiosyncratic * beta_ + out.errors;
  return out;
}

PanelData generate_panel(const SimulationConfig& config, Index rep) {
  return PanelGenerator(config).generate(rep);
}

RejectionTable run_monte_carlo(const SimulationConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const PanelGenerator generator(config);
  const std::size_t n_alpha = config.alphas.size();

  struct Outcome {
    bool degenerate = false;
    std::vector<char> reject;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(config.reps));

  parallel_for(outcomes.size(), config.threads, [&](std::size_t r) {
    Outcome& outcome = outcomes[r];
    outcome.reject.assign(n_alpha, 0);
    const PanelData data = generator.generate(static_cast<Index>(r));
    TestConfig test = config.test;
    test.seed = derive_seed({config.seed, "rep", r});
    test.threads = 1;
    try {
      const PreparedTest prepared = PreparedTest::prepare(data, test);
      for (std::size_t a = 0; a < n_alpha; ++a) outcome.reject[a] = prepared.decide(config.alphas[a]).reject;
    } catch (const DegenerateInput&) {
      outcome.degenerate = true;
    }
  });

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RejectionTable table;
  Index degenerate = 0;
  for (const auto& o : outcomes) degenerate += o.degenerate ? 1 : 0;
  for (std::size_t a = 0; a < n_alpha; ++a) {
    RejectionRow row;
    row.design = config.label;
    row.periods = config.periods;
    row.regressors = config.regressors;
    row.signal = config.signal;
    row.alpha = config.alphas[a];
    row.reps = config.reps;
    row.degenerate_count = degenerate;
    for (const auto& o : outcomes) row.rejections += (!o.degenerate && o.reject[a]) ? 1 : 0;
    const Index valid = config.reps - degenerate;
    row.reject_rate = valid > 0 ? static_cast<double>(row.rejections) / static_cast<double>(valid) : 0.0;
    row.seconds = seconds;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace factest
