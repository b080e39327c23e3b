#include "factest/report.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace factest {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["m_hat"] = r.m_hat ? nlohmann::json(*r.m_hat) : nlohmann::json(nullptr);
  j["reject"] = r.reject;
  j["K_hat"] = r.k_hat;
  j["used_w"] = r.used_w;
  j["degenerate_eigenspace"] = r.degenerate_boundary;
  j["grid"] = {{"M", r.grid_size}, {"L", r.bootstrap_draws}, {"lambda_bar", r.statistic}};
  j["seed"] = r.seed;
  j["quantile_path"] = std::vector<double>(r.quantile_path.begin(), r.quantile_path.end());
  return j;
}

nlohmann::json to_json(const PValueResult& r) {
  nlohmann::json j;
  j["p_value"] = r.p_value;
  j["statistic"] = r.statistic;
  j["K_hat"] = r.k_hat;
  j["used_w"] = r.used_w;
  j["grid"] = {{"M", r.grid_size}, {"L", r.bootstrap_draws}, {"lambda_bar", r.statistic}};
  j["seed"] = r.seed;
  j["alpha_grid"] = r.alpha_grid;
  j["decisions"] = r.decisions;
  return j;
}

std::string format_summary(const TestResult& r) {
  std::ostringstream out;
  out << "factor regression adequacy test (H0: beta = 0)\n"
      << "  factors (K_hat)     : " << r.k_hat << (r.used_w ? " + extra regressors" : "") << '\n'
      << "  grid size M         : " << r.grid_size << '\n'
      << "  bootstrap draws L   : " << r.bootstrap_draws << '\n'
      << "  seed                : " << r.seed << '\n'
      << "  alpha               : " << general(r.alpha) << '\n'
      << "  statistic           : " << general(r.statistic) << '\n'
      << "  threshold           : " << general(r.threshold) << '\n'
      << "  m_hat               : " << (r.m_hat ? std::to_string(*r.m_hat) : std::string("none (lambda_bar)")) << '\n'
      << "  decision            : " << (r.reject ? "reject H0" : "do not reject H0") << '\n';
  if (r.degenerate_boundary) out << "  warning: K-th and (K+1)-th eigenvalues coincide\n";
  return out.str();
}

std::string format_summary(const PValueResult& r) {
  std::ostringstream out;
  out << "factor regression adequacy test (H0: beta = 0)\n"
      << "  factors (K_hat)     : " << r.k_hat << (r.used_w ? " + extra regressors" : "") << '\n'
      << "  grid size M         : " << r.grid_size << '\n'
      << "  bootstrap draws L   : " << r.bootstrap_draws << '\n'
      << "  seed                : " << r.seed << '\n'
      << "  statistic           : " << general(r.statistic) << '\n'
      << "  alpha grid points   : " << r.alpha_grid.size() << '\n'
      << "  p-value             : " << fixed(r.p_value, 3) << '\n';
  return out.str();
}

void write_rejection_csv(const RejectionTable& table, std::ostream& out, bool include_timing) {
  out << "design,T,p,m,alpha,reps,reject_rate,degenerate_count,seconds\n";
  for (const auto& row : table.rows) {
    out << row.design << ',' << row.periods << ',' << row.regressors << ',' << general(row.signal) << ','
        << general(row.alpha) << ',' << row.reps << ',' << fixed(row.reject_rate, 4) << ',' << row.degenerate_count
        << ',' << (include_timing ? fixed(row.seconds, 3) : std::string("0")) << '\n';
  }
}

std::string format_rejection_table(const RejectionTable& table, bool include_timing) {
  // Group rows by (design, T, p, m), preserving first-seen order.
  using Key = std::tuple<std::string, Index, Index, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const RejectionRow*>> groups;
  for (const auto& row : table.rows) {
    Key key{row.design, row.periods, row.regressors, row.signal};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&row);
  }

  std::ostringstream out;
  std::string current;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    const std::string heading =
        std::get<0>(key) + "  T=" + std::to_string(std::get<1>(key)) + " p=" + std::to_string(std::get<2>(key));
    if (heading != current) {
      out << heading << '\n' << "  m     ";
      for (const auto* row : rows) out << "  alpha=" << fixed(row->alpha, 3);
      out << "  reps  degenerate" << (include_timing ? "  seconds" : "") << '\n';
      current = heading;
    }
    out << "  " << fixed(std::get<3>(key), 2) << "  ";
    for (const auto* row : rows) out << "  " << fixed(row->reject_rate, 4) << "     ";
    out << "  " << rows.front()->reps << "  " << rows.front()->degenerate_count;
    if (include_timing) out << "  " << fixed(rows.front()->seconds, 2);
    out << '\n';
  }
  return out.str();
}

}  // namespace factest
