#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "factest/bootstrap_test.hpp"
#include "factest/data_io.hpp"
#include "factest/errors.hpp"
#include "factest/factor_model.hpp"
#include "factest/report.hpp"
#include "factest/simulation.hpp"

namespace factest::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputFlags {
  std::string y_path;
  std::string x_path;
  std::string w_path;
  bool date_column = false;
  bool standardize = false;
  bool lag = false;
};

struct TestFlags {
  Index grid_size = 200;
  Index bootstrap = 200;
  std::uint64_t seed = kDefaultSeed;
  std::string k = "auto";
  Index k_max = 0;
  std::size_t threads = 0;
};

struct OutputFlags {
  std::string format = "json";
  std::string output;
};

void add_input_flags(CLI::App* cmd, InputFlags& in, bool with_y) {
  if (with_y) {
    cmd->add_option("--y", in.y_path, "CSV with the outcome column")->required();
    cmd->add_option("--w", in.w_path, "CSV with additional regressors treated as observed factors");
  }
  cmd->add_option("--x", in.x_path, "CSV with the regressor columns")->required();
  cmd->add_flag("--date-column", in.date_column, "first CSV column holds date labels");
  cmd->add_flag("--standardize", in.standardize, "z-score every column before testing");
  if (with_y) cmd->add_flag("--lag", in.lag, "pair y_{t+1} with x_t (one lag of data)");
}

void add_test_flags(CLI::App* cmd, TestFlags& t) {
  cmd->add_option("--grid-size,-M", t.grid_size, "number of penalty grid points M")->capture_default_str();
  cmd->add_option("--bootstrap,-L", t.bootstrap, "number of bootstrap draws L")->capture_default_str();
  cmd->add_option("--seed", t.seed, std::string("random seed (default from ") + kSeedEnv + ", else 42)");
  cmd->add_option("--k", t.k, "number of factors, or 'auto' for the eigenvalue-ratio estimator")
      ->capture_default_str();
  cmd->add_option("--k-max", t.k_max, "ceiling for the factor-count estimator (default min(8, min(T,p)-1))");
  cmd->add_option("--threads", t.threads, "worker cap; 0 uses every core (results do not depend on it)")
      ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, OutputFlags& o, const std::vector<std::string>& formats) {
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
  cmd->add_option("--output,-o", o.output, "write the report here instead of stdout");
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      const unsigned long long value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: '" + env + "'");
  }
  return kDefaultSeed;
}

TestConfig make_test_config(const TestFlags& t, bool seed_given) {
  if (t.grid_size < 1) throw UsageError("--grid-size must be positive");
  if (t.bootstrap < 1) throw UsageError("--bootstrap must be positive");
  TestConfig cfg;
  cfg.grid_size = t.grid_size;
  cfg.bootstrap_draws = t.bootstrap;
  cfg.seed = seed_given ? t.seed : default_seed();
  cfg.threads = t.threads;
  if (t.k != "auto") {
    try {
      std::size_t used = 0;
      const long value = std::stol(t.k, &used);
      if (used != t.k.size() || value < 0) throw std::invalid_argument("k");
      cfg.k = value;
    } catch (const std::exception&) {
      throw UsageError("--k must be 'auto' or a nonnegative integer, got '" + t.k + "'");
    }
  }
  if (t.k_max > 0) cfg.k_max = t.k_max;
  return cfg;
}

PanelData load_input(const InputFlags& in) {
  LoadOptions options;
  options.date_column = in.date_column;
  options.standardize = in.standardize;
  options.lags = in.lag ? 1 : 0;
  std::optional<std::filesystem::path> w;
  if (!in.w_path.empty()) w = in.w_path;
  return load_panel(in.y_path, in.x_path, w, options);
}

void check_alpha(double alpha, const char* flag) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << flag << " must lie in (0, 1), got " << alpha;
    throw UsageError(msg.str());
  }
}

std::vector<double> parse_alpha_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
      throw UsageError("--alpha-grid must be 'start:stop:step' or a comma list, got '" + spec + "'");
    }
    if (!(step > 0.0) || stop < start) throw UsageError("--alpha-grid needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
      // snap to 12 decimals so 0.001 steps land on the decimal grid
      grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  } else {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        grid.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("cannot parse alpha '" + item + "'");
      }
    }
  }
  for (double a : grid) {
    if (a < 0.0 || a > 1.0) throw UsageError("alpha grid values must lie in [0, 1]");
  }
  return grid;
}

void emit(const OutputFlags& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw DataError("cannot write " + o.output);
  file << text;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SimFlags {
  int design = 1;
  std::vector<double> rho;
  std::vector<double> signals{0.0, 0.1, 0.2, 0.3, 0.4};
  Index periods = 100;
  Index regressors = 100;
  Index factors = 2;
  std::string beta_pattern = "sparse";
};

SimulationConfig make_sim_config(const SimFlags& s) {
  SimulationConfig cfg;
  if (!s.rho.empty()) {
    if (s.rho.size() != 3) throw UsageError("--rho takes three values: rho_f,rho_u,rho_e");
    cfg.rho_f = s.rho[0];
    cfg.rho_u = s.rho[1];
    cfg.rho_e = s.rho[2];
    cfg.label = "custom";
  } else {
    if (s.design < 1 || s.design > 3) throw UsageError("--design must be 1, 2 or 3, got " + std::to_string(s.design));
    cfg = SimulationConfig::design(s.design);
  }
  cfg.periods = s.periods;
  cfg.regressors = s.regressors;
  cfg.factors = s.factors;
  cfg.gamma_star = Vector::Constant(s.factors, 0.5);
  cfg.beta_pattern = s.beta_pattern == "geometric" ? BetaPattern::Geometric : BetaPattern::TwoSparse;
  return cfg;
}

void add_sim_flags(CLI::App* cmd, SimFlags& s) {
  cmd->add_option("--design", s.design, "dependence design 1, 2 or 3")->capture_default_str();
  cmd->add_option("--rho", s.rho, "explicit AR coefficients rho_f,rho_u,rho_e (overrides --design)")
      ->delimiter(',');
  cmd->add_option("--T", s.periods, "number of periods")->capture_default_str();
  cmd->add_option("--p", s.regressors, "number of regressors")->capture_default_str();
  cmd->add_option("--K", s.factors, "number of latent factors")->capture_default_str();
  cmd->add_option("--beta-pattern", s.beta_pattern, "sparse: (1,0.5,0,...)*m; geometric: (1,0.5,0.25,...)*m")
      ->check(CLI::IsMember({"sparse", "geometric"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tuning-free bootstrap test of factor regression against factor-augmented sparse alternatives",
               "factest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "factest 0.1.0");

  InputFlags input;
  TestFlags test_flags;
  OutputFlags output;
  double alpha = 0.05;
  std::string alpha_grid = "0.001:0.999:0.001";

  CLI::App* test_cmd = app.add_subcommand("test", "run the test at one level alpha");
  add_input_flags(test_cmd, input, true);
  add_test_flags(test_cmd, test_flags);
  add_output_flags(test_cmd, output, {"json", "text"});
  test_cmd->add_option("--alpha", alpha, "test level in (0, 1)")->capture_default_str();

  CLI::App* pvalue_cmd = app.add_subcommand("pvalue", "p-value: smallest rejecting alpha on a grid");
  add_input_flags(pvalue_cmd, input, true);
  add_test_flags(pvalue_cmd, test_flags);
  add_output_flags(pvalue_cmd, output, {"json", "text"});
  pvalue_cmd->add_option("--alpha-grid", alpha_grid, "'start:stop:step' or comma-separated levels")
      ->capture_default_str();

  SimFlags sim;
  std::vector<double> sim_alphas{0.1, 0.05, 0.01};
  Index reps = 2000;
  std::string csv_path;
  bool no_timing = false;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo rejection frequencies");
  add_sim_flags(sim_cmd, sim);
  add_test_flags(sim_cmd, test_flags);
  sim_cmd->add_option("--m", sim.signals, "signal strengths")->delimiter(',');
  sim_cmd->add_option("--reps", reps, "replications per signal strength")->capture_default_str();
  sim_cmd->add_option("--alpha", sim_alphas, "test levels")->delimiter(',');
  sim_cmd->add_option("--csv", csv_path, "also write the table as CSV");
  sim_cmd->add_flag("--no-timing", no_timing, "print 0 for timings so outputs are byte-stable");

  int k_max_factors = 0;
  std::string scree_path;
  CLI::App* factors_cmd = app.add_subcommand("factors", "inspect the factor structure of a regressor panel");
  add_input_flags(factors_cmd, input, false);
  add_output_flags(factors_cmd, output, {"json", "text"});
  factors_cmd->add_option("--k-max", k_max_factors, "ceiling for the estimator (default min(8, min(T,p)-1))");
  factors_cmd->add_option("--scree", scree_path, "write index,eigenvalue,ratio CSV here");

  Index rep = 0;
  double gen_signal = 0.0;
  std::string out_dir = ".";
  CLI::App* gen_cmd = app.add_subcommand("generate", "write one simulated panel as y.csv and x.csv");
  add_sim_flags(gen_cmd, sim);
  gen_cmd->add_option("--m", gen_signal, "signal strength")->capture_default_str();
  gen_cmd->add_option("--seed", test_flags.seed, "random seed");
  gen_cmd->add_option("--rep", rep, "replication index")->capture_default_str();
  gen_cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "factest 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (const CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run 'factest " << sub->get_name() << " --help' for usage\n";
    }
    return kUsage;
  }

  try {
    if (test_cmd->parsed()) {
      check_alpha(alpha, "--alpha");
      const TestConfig cfg = make_test_config(test_flags, test_cmd->count("--seed") > 0);
      const PanelData data = load_input(input);
      const TestResult result = run_test(data, alpha, cfg);
      emit(output, output.format == "json" ? to_json(result).dump(2) + "\n" : format_summary(result), out);
      return kOk;
    }

    if (pvalue_cmd->parsed()) {
      const std::vector<double> grid = parse_alpha_grid(alpha_grid);
      const TestConfig cfg = make_test_config(test_flags, pvalue_cmd->count("--seed") > 0);
      const PanelData data = load_input(input);
      const PValueResult result = p_value(data, grid, cfg);
      emit(output, output.format == "json" ? to_json(result).dump(2) + "\n" : format_summary(result), out);
      return kOk;
    }

    if (sim_cmd->parsed()) {
      for (double a : sim_alphas) check_alpha(a, "--alpha");
      if (reps < 1) throw UsageError("--reps must be positive");
      SimulationConfig cfg = make_sim_config(sim);
      cfg.reps = reps;
      cfg.alphas = sim_alphas;
      cfg.test = make_test_config(test_flags, true);
      cfg.seed = sim_cmd->count("--seed") > 0 ? test_flags.seed : default_seed();
      cfg.threads = test_flags.threads;

      RejectionTable table;
      for (double m : sim.signals) {
        cfg.signal = m;
        const RejectionTable cell = run_monte_carlo(cfg);
        table.rows.insert(table.rows.end(), cell.rows.begin(), cell.rows.end());
      }
      out << format_rejection_table(table, !no_timing);
      if (!csv_path.empty()) {
        std::ofstream file(csv_path, std::ios::binary);
        if (!file) throw DataError("cannot write " + csv_path);
        write_rejection_csv(table, file, !no_timing);
      }
      return kOk;
    }

    if (factors_cmd->parsed()) {
      CsvPanel x = read_csv(input.x_path, CsvOptions{input.date_column});
      if (input.standardize) standardize_columns(x.values, x.columns);
      const Index periods = x.values.rows();
      const Index regressors = x.values.cols();
      const Index k_max = k_max_factors > 0 ? k_max_factors : default_k_max(periods, regressors);
      const Index k_hat = estimate_num_factors(x.values, k_max);
      const Vector eig = gram_eigenvalues(x.values);
      const Vector ratios = eigenvalue_ratios(eig, k_max);

      if (!scree_path.empty()) {
        std::ofstream file(scree_path, std::ios::binary);
        if (!file) throw DataError("cannot write " + scree_path);
        file << "index,eigenvalue,ratio\n";
        for (Index i = 0; i < eig.size(); ++i) {
          file << i + 1 << ',' << format_double(eig[i]) << ',';
          if (i < ratios.size()) file << (std::isinf(ratios[i]) ? std::string("inf") : format_double(ratios[i]));
          file << '\n';
        }
      }

      if (output.format == "json") {
        nlohmann::json j;
        j["K_hat"] = k_hat;
        j["k_max"] = k_max;
        j["T"] = periods;
        j["p"] = regressors;
        j["eigenvalues"] = std::vector<double>(eig.begin(), eig.end());
        std::vector<nlohmann::json> r;
        for (double v : ratios) r.push_back(std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v));
        j["ratios"] = r;
        emit(output, j.dump(2) + "\n", out);
      } else {
        std::ostringstream text;
        text << "T = " << periods << ", p = " << regressors << ", k_max = " << k_max << '\n'
             << "estimated number of factors: " << k_hat << '\n'
             << "  k  eigenvalue          ratio mu_k/mu_{k+1}\n";
        for (Index i = 0; i < std::min<Index>(eig.size(), k_max + 1); ++i) {
          text << "  " << i + 1 << "  " << format_double(eig[i]);
          if (i < ratios.size()) text << "  " << format_double(ratios[i]);
          text << '\n';
        }
        emit(output, text.str(), out);
      }
      return kOk;
    }

    if (gen_cmd->parsed()) {
      SimulationConfig cfg = make_sim_config(sim);
      cfg.signal = gen_signal;
      cfg.seed = gen_cmd->count("--seed") > 0 ? test_flags.seed : default_seed();
      const PanelData data = generate_panel(cfg, rep);
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      write_csv(outcome_table(data), dir / "y.csv");
      write_csv(regressor_table(data), dir / "x.csv");
      out << "wrote " << (dir / "y.csv").string() << " and " << (dir / "x.csv").string() << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DegenerateInput& e) {
    err << "degenerate input: " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace factest::cli
