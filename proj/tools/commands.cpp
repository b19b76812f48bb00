#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bregret/capacity.hpp"
#include "bregret/error.hpp"
#include "bregret/oracle.hpp"
#include "bregret/regret.hpp"
#include "bregret/serialization.hpp"
#include "output.hpp"

namespace bregret::cli {
namespace {

double in_unit(double nats, Unit unit) { return unit == Unit::Bits ? nats / std::numbers::ln2 : nats; }
const char* unit_name(Unit unit) { return unit == Unit::Bits ? "bits" : "nats"; }

std::vector<std::string> header(const char* command, const ExperimentConfig& config) {
  std::vector<std::string> lines = {std::string("bregret ") + command};
  for (const std::string& line : describe(config)) lines.push_back(line);
  return lines;
}

void write_header(std::ostream& out, const char* command, const ExperimentConfig& config) {
  for (const std::string& line : header(command, config)) out << "# " << line << '\n';
}

std::string audit_path(const std::string& output) { return output.empty() ? output : output + ".audit.csv"; }

// Interior points of the sweep grid, i.e. with 0 < theta < 1.
std::vector<std::size_t> interior_points(const ParamGrid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.point(j)[1];
    if (t > 0.0 && t < 1.0) out.push_back(j);
  }
  return out;
}

struct Comparison {
  std::string check;
  int n;
  int ell;
  std::string predictor;
  std::string theta;
  double alpha;
  double fast;
  double oracle;

  double diff() const {
    if (fast == oracle) return 0.0;
    return std::abs(fast - oracle);
  }
};

void compare_predictor(const Predictor& pred, const std::string& label, const ParamGrid& grid,
                       const std::vector<double>& alphas, std::vector<Comparison>& out) {
  const BatchSetup& setup = pred.setup();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto theta = grid.point(j);
    out.push_back({"batch_regret", setup.n, setup.ell, label, grid.repr(j), 1.0, batch_regret(pred, theta),
                   oracle::oracle_batch_regret(pred, theta)});
    for (double a : alphas) {
      out.push_back({"alpha_batch_regret", setup.n, setup.ell, label, grid.repr(j), a,
                     alpha_batch_regret(pred, theta, a), oracle::oracle_alpha_batch_regret(pred, theta, a)});
    }
    out.push_back({"worst_case_regret", setup.n, setup.ell, label, grid.repr(j), kPosInf,
                   worst_case_regret(pred, theta), oracle::oracle_worst_case_regret(pred, theta)});
  }
}

int report_comparisons(const std::vector<Comparison>& rows, const ExperimentConfig& config, bool use_config,
                       std::ostream& log) {
  std::ostringstream csv;
  if (use_config) {
    write_header(csv, "oracle-check", config);
  } else {
    csv << "# bregret oracle-check (built-in suite)\n";
  }
  csv << "check,n,ell,predictor,theta_repr,alpha,fast,oracle,abs_diff\n";
  double worst = 0.0;
  std::size_t failures = 0;
  for (const Comparison& r : rows) {
    const double d = r.diff();
    if (!(d <= kOracleTolerance)) ++failures;
    if (std::isnan(d) || d > worst) worst = d;
    csv << r.check << ',' << r.n << ',' << r.ell << ',' << r.predictor << ',' << r.theta << ','
        << format_real(r.alpha) << ',' << format_real(r.fast) << ',' << format_real(r.oracle) << ','
        << format_real(d) << '\n';
  }
  write_output(config.output, csv.str());
  log << fmt::format("oracle-check: {} comparisons, max abs diff {:.3g}, {} above {:g}\n", rows.size(), worst,
                     failures, kOracleTolerance);
  return failures == 0 ? kExitOk : kExitConvergence;
}

}  // namespace

BatchSetup build_setup(const ExperimentConfig& config) {
  BatchSetup setup{config.n, config.ell_for(config.n), config.alphabet_size};
  validate(setup);
  return setup;
}

namespace {

GridPtr sweep_grid(double delta, double step) {
  // The step is rounded so both endpoints land on the grid.
  const double width = 1.0 - 2.0 * delta;
  const auto intervals = static_cast<std::size_t>(std::max(1L, std::lround(width / step)));
  return std::make_shared<const ParamGrid>(ParamGrid::uniform_binary(intervals + 1, delta, 1.0 - delta));
}

CapacityResult solve(const ExperimentConfig& config, const GridPtr& grid, const BatchSetup& setup) {
  if (renyi_uses_kl(config.alpha)) return capacity_solve(grid, setup, config.tol, config.max_iter, config.workers);
  return alpha_capacity_solve(grid, setup, config.alpha, config.tol, config.max_iter, config.workers);
}

}  // namespace

GridPtr build_grid(const ExperimentConfig& config) {
  const GridConfig& g = config.grid;
  if (g.kind == "explicit") {
    if (g.values.empty()) throw ConfigError("grid.values: explicit grid needs at least one point");
    return std::make_shared<const ParamGrid>(static_cast<std::size_t>(config.alphabet_size), g.values);
  }
  if (config.alphabet_size != 2) {
    throw ConfigError("grid.kind: '" + g.kind + "' grids are binary; use an explicit grid for alphabet_size > 2");
  }
  if (g.kind == "uniform") {
    if (g.points < 1) throw ConfigError("grid.points: a uniform grid needs points >= 1");
    return std::make_shared<const ParamGrid>(ParamGrid::uniform_binary(static_cast<std::size_t>(g.points), g.lo, g.hi));
  }
  return sweep_grid(config.delta, g.step);
}

Prior build_prior(const ExperimentConfig& config, const GridPtr& grid) {
  const PriorConfig& p = config.prior;
  if (p.kind == "dirichlet") {
    if (config.alphabet_size != 2) throw ConfigError("prior.kind: dirichlet priors are binary only");
    return dirichlet_quadrature(p.beta, static_cast<std::size_t>(p.size));
  }
  if (p.kind == "point") {
    if (static_cast<std::size_t>(p.index) >= grid->size()) {
      throw ConfigError(fmt::format("prior.index: {} is outside a grid of {} points", p.index, grid->size()));
    }
    return Prior::point_mass(grid, static_cast<std::size_t>(p.index));
  }
  if (p.kind == "explicit") {
    if (p.weights.size() != grid->size()) {
      throw ConfigError(fmt::format("prior.weights: {} weights for a grid of {} points", p.weights.size(), grid->size()));
    }
    try {
      return Prior::normalized(grid, p.weights);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("prior.weights: ") + e.what());
    }
  }
  return Prior::uniform(grid);
}

Predictor build_predictor(const ExperimentConfig& config, const GridPtr& grid, const BatchSetup& setup) {
  const PredictorConfig& p = config.predictor;
  if (p.kind == "add_beta") return Predictor::add_beta(p.beta, setup);
  if (p.kind == "mixture") return Predictor::mixture(build_prior(config, grid), setup);
  return Predictor::alpha_nml(build_prior(config, grid), p.alpha, setup);
}

int cmd_regret(const ExperimentConfig& config, std::ostream& log) {
  const BatchSetup setup = build_setup(config);
  const GridPtr grid = build_grid(config);
  const Predictor pred = build_predictor(config, grid, setup);
  if (!pred.certified()) {
    log << fmt::format("warning: add-beta with beta = {:g} is outside [1/2, 1]; no minimax guarantee applies\n",
                       config.predictor.beta);
  }
  const RegretReport report = max_regret(pred, *grid, config.alpha, config.workers);

  std::ostringstream csv;
  write_regret_csv(csv, report, *grid, header("regret", config));
  write_output(config.output, csv.str());
  log << fmt::format("{}: max regret {:.10g} {} at theta_index {} (theta {})\n", pred.describe(),
                     in_unit(report.max_value, config.unit), unit_name(config.unit), report.argmax_index,
                     grid->repr(report.argmax_index));
  return kExitOk;
}

int cmd_capacity(const ExperimentConfig& config, std::ostream& log) {
  const BatchSetup setup = build_setup(config);
  const GridPtr grid = build_grid(config);
  const CapacityResult result = solve(config, grid, setup);
  const SaddleReport saddle = saddle_check(result, config.alpha, setup, config.workers, config.tol);

  nlohmann::json json = capacity_to_json(result, &saddle);
  if (config.unit == Unit::Bits) json["capacity_bits"] = in_unit(result.capacity, Unit::Bits);
  bool converged = result.converged;
  if (!config.refine.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (double step : config.refine) {
      const GridPtr fine = sweep_grid(config.delta, step);
      const CapacityResult r = solve(config, fine, setup);
      converged = converged && r.converged;
      rows.push_back({{"step", step}, {"points", fine->size()}, {"capacity_nats", r.capacity},
                      {"equalizer_gap", r.equalizer_gap}, {"converged", r.converged}});
      log << fmt::format("refine step {:g}: {} points, capacity {:.10g} {}\n", step, fine->size(),
                         in_unit(r.capacity, config.unit), unit_name(config.unit));
    }
    json["refinement"] = rows;
  }
  json["config"] = header("capacity", config);
  write_output(config.output, json.dump(2) + "\n");

  log << fmt::format("capacity {:.10g} {} after {} iterations, equalizer gap {:.3g}, saddle {}\n",
                     in_unit(result.capacity, config.unit), unit_name(config.unit), result.iterations,
                     result.equalizer_gap, saddle.pass ? "PASS" : "FAIL");
  if (!converged) {
    log << fmt::format("error: solver did not reach tol {:g} within {} iterations\n", config.tol, config.max_iter);
    return kExitConvergence;
  }
  return kExitOk;
}

int cmd_lowerbound(const ExperimentConfig& config, std::ostream& log) {
  if (!config.gamma) throw ConfigError("lowerbound needs ell_rule.gamma");
  if (config.alphabet_size != 2) throw ConfigError("lowerbound is defined for binary sources");
  const GridPtr grid = build_grid(config);
  const Prior uniform = dirichlet_quadrature(1.0, static_cast<std::size_t>(config.prior.size));
  const Unit unit = config.unit;

  std::ostringstream csv;
  write_header(csv, "lowerbound", config);
  csv << "n,ell,lower_bound_Iw,add_half_max_regret,half_log_term,residual_lower,residual_upper\n";
  bool sandwich = true;
  for (int n : config.n_values) {
    const BatchSetup setup{n, config.ell_for(n), 2};
    const double nl = static_cast<double>(n) * setup.ell;
    const double lower = cond_mutual_info(uniform, setup, config.workers);
    const double upper = max_regret(Predictor::add_beta(0.5, setup), *grid, 1.0, config.workers).max_value;
    const double half_log = 0.5 * std::log1p(1.0 / n);
    const double residual_lower = (half_log - lower) * nl / std::log(nl);
    const double residual_upper = (upper - half_log) * nl;
    sandwich = sandwich && lower <= upper;
    csv << n << ',' << setup.ell << ',' << format_real(in_unit(lower, unit)) << ','
        << format_real(in_unit(upper, unit)) << ',' << format_real(in_unit(half_log, unit)) << ','
        << format_real(in_unit(residual_lower, unit)) << ',' << format_real(in_unit(residual_upper, unit)) << '\n';
  }
  write_output(config.output, csv.str());
  log << "lowerbound: " << config.n_values.size() << " rows, sandwich " << (sandwich ? "holds" : "VIOLATED") << '\n';

  if (!config.audit_n.empty()) {
    // Pointwise check of R(mixture_w, theta) >= half_log - 5/(n ell) - 5/(n ell theta (1 - theta)).
    std::ostringstream audit;
    write_header(audit, "lowerbound audit", config);
    audit << "n,ell,theta,regret,bound,slack\n";
    double min_slack = kPosInf;
    for (int n : config.audit_n) {
      const BatchSetup setup{n, config.ell_for(n), 2};
      const double nl = static_cast<double>(n) * setup.ell;
      const Predictor mix = Predictor::mixture(uniform, setup);
      for (std::size_t j : interior_points(*grid)) {
        const double theta = grid->point(j)[1];
        const double regret = batch_regret(mix, grid->point(j));
        const double bound = 0.5 * std::log1p(1.0 / n) - 5.0 / nl - 5.0 / (nl * theta * (1.0 - theta));
        min_slack = std::min(min_slack, regret - bound);
        audit << n << ',' << setup.ell << ',' << grid->repr(j) << ',' << format_real(in_unit(regret, unit)) << ','
              << format_real(in_unit(bound, unit)) << ',' << format_real(in_unit(regret - bound, unit)) << '\n';
      }
    }
    write_output(audit_path(config.output), audit.str());
    log << fmt::format("audit: min slack {:.6g} {}{}\n", in_unit(min_slack, unit), unit_name(unit),
                       min_slack >= 0.0 ? "" : " (inequality VIOLATED)");
  }
  return kExitOk;
}

int cmd_limits(const ExperimentConfig& config, std::ostream& log) {
  const BatchSetup setup = build_setup(config);
  const GridPtr grid = build_grid(config);
  const Predictor pred = build_predictor(config, grid, setup);
  try {
    validate_distribution(config.theta, static_cast<std::size_t>(config.alphabet_size));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("theta: ") + e.what());
  }
  const double average = batch_regret(pred, config.theta);
  const double worst = worst_case_regret(pred, config.theta);
  const Unit unit = config.unit;

  std::ostringstream csv;
  write_header(csv, "limits", config);
  csv << "alpha,alpha_regret,batch_regret,worst_case_regret,gap_to_worst\n";
  double last = kNegInf;
  for (double a : config.alphas) {
    last = alpha_batch_regret(pred, config.theta, a);
    csv << format_real(a) << ',' << format_real(in_unit(last, unit)) << ',' << format_real(in_unit(average, unit))
        << ',' << format_real(in_unit(worst, unit)) << ',' << format_real(in_unit(worst - last, unit)) << '\n';
  }
  write_output(config.output, csv.str());
  log << fmt::format("{}: average {:.10g}, worst case {:.10g}, last alpha {:.10g} ({})\n", pred.describe(),
                     in_unit(average, unit), in_unit(worst, unit), in_unit(last, unit), unit_name(unit));
  return kExitOk;
}

int cmd_oracle_check(const ExperimentConfig& config, bool use_config, std::ostream& log) {
  std::vector<Comparison> rows;
  const std::vector<double> alphas = {2.0, 4.0};
  if (use_config) {
    const BatchSetup setup = build_setup(config);
    oracle::check_size_guard(setup);
    const GridPtr grid = build_grid(config);
    const Predictor pred = build_predictor(config, grid, setup);
    std::vector<double> orders = alphas;
    if (!renyi_uses_kl(config.alpha)) orders.push_back(config.alpha);
    std::string label = pred.describe();
    std::replace(label.begin(), label.end(), ',', ';');
    compare_predictor(pred, label, *grid, orders, rows);
    const Prior prior = build_prior(config, grid);
    rows.push_back({"cond_mutual_info", setup.n, setup.ell, "prior", "", 1.0, cond_mutual_info(prior, setup),
                    oracle::oracle_cond_mi(prior, setup)});
    return report_comparisons(rows, config, use_config, log);
  }

  const std::vector<double> thetas = {0.1, 0.3, 0.5, 0.7, 0.9};
  const GridPtr grid = std::make_shared<const ParamGrid>(ParamGrid::binary(thetas));
  const Prior uniform = Prior::uniform(grid);
  const Prior skewed = Prior::normalized(grid, {1.0, 2.0, 3.0, 2.0, 5.0});
  for (int n = 0; n <= 2; ++n) {
    for (int ell = 1; ell <= 3; ++ell) {
      const BatchSetup setup{n, ell, 2};
      try {
        oracle::check_size_guard(setup);
      } catch (const SizeGuardError&) {
        continue;
      }
      const std::vector<std::pair<std::string, Predictor>> family = {
          {"mixture(uniform)", Predictor::mixture(uniform, setup)},
          {"mixture(skewed)", Predictor::mixture(skewed, setup)},
          {"add_beta(0.5)", Predictor::add_beta(0.5, setup)},
          {"add_beta(1)", Predictor::add_beta(1.0, setup)},
          {"alpha_nml(2)", Predictor::alpha_nml(uniform, 2.0, setup)},
          {"alpha_nml(4)", Predictor::alpha_nml(skewed, 4.0, setup)},
      };
      for (const auto& [label, pred] : family) compare_predictor(pred, label, *grid, alphas, rows);
      for (const Prior* w : {&uniform, &skewed}) {
        rows.push_back({"cond_mutual_info", n, ell, w == &uniform ? "uniform" : "skewed", "", 1.0,
                        cond_mutual_info(*w, setup), oracle::oracle_cond_mi(*w, setup)});
      }
    }
  }
  return report_comparisons(rows, config, use_config, log);
}

}  // namespace bregret::cli
