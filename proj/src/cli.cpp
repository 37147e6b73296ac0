#include "pls/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pls/bounds.hpp"
#include "pls/errors.hpp"
#include "pls/experiments.hpp"
#include "pls/format.hpp"
#include "pls/measure.hpp"
#include "pls/pls.hpp"
#include "pls/respoly.hpp"
#include "pls/rng.hpp"

namespace pls {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> k_max;
  std::optional<int> reps;
  std::optional<std::string> sigma;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out_dir, "override the output directory");
  cmd->add_option("--k-max", opts.k_max, "override k_range with 1..K");
  cmd->add_option("--reps", opts.reps, "override the replication count");
  cmd->add_option("--sigma", opts.sigma, "override noise levels (comma separated)");
}

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig config = parse_config_file(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out_dir) config.output_dir = *opts.out_dir;
  if (opts.reps) config.reps = *opts.reps;
  if (opts.k_max) {
    if (*opts.k_max < 1) throw ValidationError("--k-max must be >= 1");
    config.k_range.resize(static_cast<std::size_t>(*opts.k_max));
    std::iota(config.k_range.begin(), config.k_range.end(), 1);
  }
  if (opts.sigma) {
    config.noise_levels.clear();
    std::stringstream ss(*opts.sigma);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        config.noise_levels.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("--sigma: bad number '" + item + "'");
      }
    }
    if (config.noise_levels.empty()) throw ValidationError("--sigma: empty list");
  }
  return config;
}

int cmd_risk(const CommonOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const RunRecord rec = run_risk_study(config);
  const std::filesystem::path dir = config.output_dir;
  write_risk_csv(rec, dir / "risk.csv");
  write_plot_script(dir);
  std::cout << "risk study: " << rec.cells.size() << " cells -> " << (dir / "risk.csv").string()
            << " (config hash " << rec.config_hash << ")\n";
  return 0;
}

int cmd_predict(const CommonOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const RunRecord rec = run_prediction_study(config);
  const std::filesystem::path dir = config.output_dir;
  write_prediction_csv(rec, dir / "prediction.csv");
  write_plot_script(dir);
  double worst = 0.0;
  for (const CellAggregate& c : rec.cells) worst = std::max(worst, c.max_eq12_violation);
  std::cout << "prediction study: " << rec.cells.size() << " cells -> "
            << (dir / "prediction.csv").string() << " (max pathwise decomposition violation "
            << format_double(worst) << ")\n";
  return 0;
}

int cmd_bounds(const CommonOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const RunRecord rec = run_risk_study(config);
  const std::filesystem::path dir = config.output_dir;
  for (std::size_t si = 0; si < config.noise_levels.size(); ++si) {
    write_bounds_csv(rec, config.noise_levels[si], dir / ("bounds_sigma" + std::to_string(si) + ".csv"));
  }
  write_plot_script(dir);
  std::cout << "bound tables for " << config.noise_levels.size() << " noise levels -> "
            << dir.string() << "\n";
  return 0;
}

int cmd_respath(const CommonOptions& opts, const std::string& directions) {
  const ExperimentConfig config = load_config(opts);
  std::vector<int> dirs;
  if (!directions.empty()) {
    std::stringstream ss(directions);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        dirs.push_back(std::stoi(item) - 1);  // user-facing indices are 1-based
      } catch (const std::exception&) {
        throw ValidationError("--directions: bad index '" + item + "'");
      }
    }
  }
  const ResidualPathTable table = run_residual_path(config, dirs);
  const std::filesystem::path dir = config.output_dir;
  write_respath_csv(table, dir / "respath.csv");
  write_plot_script(dir);
  std::cout << "residual path over k = 1.." << table.values.rows() << " -> "
            << (dir / "respath.csv").string()
            << (table.crosscheck_available ? "" : " (subset cross-check skipped past the cap)")
            << "\n";
  return 0;
}

int cmd_verify(int n, std::uint64_t seed, int k_cap) {
  if (n < 3) throw ValidationError("verify: --n must be >= 3");
  auto rng = make_rng(seed, 77);

  // Well-separated random spectrum, all directions relevant.
  SpectrumSpec spec;
  spec.kind = SpectrumSpec::Kind::Explicit;
  spec.values.resize(n);
  std::uniform_real_distribution<double> ratio(1.1, 1.6);
  double value = 1.0;
  for (int i = n - 1; i >= 0; --i) {
    spec.values(i) = value;
    value *= ratio(rng);
  }
  const DesignMatrix X = generate_design(spec, n, n, seed);
  const SpectralDecomposition decomp = decompose(X);
  BetaSpec beta_spec;
  beta_spec.kind = BetaSpec::Kind::RandomUnit;
  const Eigen::VectorXd beta = make_beta(beta_spec, decomp, rng);
  const Eigen::VectorXd y = X.entries * beta + gaussian_vector(rng, n, 0.25);

  const PlsPath path = pls_fit(X, decomp, y, n);
  const SpectralProjections proj = path.projections;
  const DiscreteMeasure mu = build_measure(decomp, proj.p_hat);

  const int k_hi = std::min(path.k_max - 1, k_cap);
  double overall = 0.0;
  std::cout << "three-route residual check on a " << n << "x" << n << " instance, seed " << seed
            << "\n  k   fit/moment      fit/subset      moment/subset\n";
  for (int k = 1; k <= k_hi; ++k) {
    const ResidualPolynomial fit = residual_poly_from_fit(path, proj, k);
    const ResidualPolynomial mom = residual_poly_moments(mu, k);
    const VandermondeResult van = residual_values_vandermonde(decomp, proj.p_hat, k);
    double fm = 0.0, fv = 0.0, mv = 0.0;
    for (Eigen::Index i = 0; i < decomp.rank(); ++i) {
      const double scale =
          std::max({1e-2, std::abs(fit.values_on_spectrum(i)), std::abs(van.values(i))});
      fm = std::max(fm, std::abs(fit.values_on_spectrum(i) - mom.values_on_spectrum(i)) / scale);
      fv = std::max(fv, std::abs(fit.values_on_spectrum(i) - van.values(i)) / scale);
      mv = std::max(mv, std::abs(mom.values_on_spectrum(i) - van.values(i)) / scale);
    }
    overall = std::max({overall, fm, fv, mv});
    std::cout << "  " << k << "   " << format_double(fm) << "   " << format_double(fv) << "   "
              << format_double(mv) << "\n";
  }
  std::cout << "max route disagreement: " << format_double(overall) << "\n";
  if (!(overall <= 1e-6)) {
    std::cerr << "verify: routes disagree beyond 1e-6\n";
    return 2;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"PLS regression as Krylov-constrained least squares: studies and checks"};
  app.require_subcommand(1);

  CommonOptions risk_opts, predict_opts, bounds_opts, respath_opts;
  std::string directions;
  int verify_n = 10;
  std::uint64_t verify_seed = 7;
  int verify_k_cap = 12;

  CLI::App* risk = app.add_subcommand("risk", "empirical risk study");
  add_common(risk, risk_opts);
  CLI::App* predict = app.add_subcommand("predict", "prediction error study");
  add_common(predict, predict_opts);
  CLI::App* respath = app.add_subcommand("respath", "residual values along eigendirections");
  add_common(respath, respath_opts);
  respath->add_option("--directions", directions, "1-based eigendirection indices, comma separated");
  CLI::App* bounds = app.add_subcommand("bounds", "bound tables per noise level");
  add_common(bounds, bounds_opts);
  CLI::App* verify = app.add_subcommand("verify", "three-route residual equivalence check");
  verify->add_option("--n", verify_n, "instance size");
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--k-max", verify_k_cap, "largest step to check");

  try {
    app.parse(argc, argv);
    if (risk->parsed()) return cmd_risk(risk_opts);
    if (predict->parsed()) return cmd_predict(predict_opts);
    if (respath->parsed()) return cmd_respath(respath_opts, directions);
    if (bounds->parsed()) return cmd_bounds(bounds_opts);
    if (verify->parsed()) return cmd_verify(verify_n, verify_seed, verify_k_cap);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pls
