#pragma once

#include <ostream>

#include "bregret/predictors.hpp"
#include "bregret/prior.hpp"
#include "bregret/source_model.hpp"
#include "config.hpp"

namespace bregret::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitConvergence = 2;
inline constexpr int kExitSizeGuard = 3;

// Oracle agreement threshold for oracle-check.
inline constexpr double kOracleTolerance = 1e-10;

GridPtr build_grid(const ExperimentConfig& config);
// Dirichlet priors carry their own quadrature grid; the others live on `grid`.
Prior build_prior(const ExperimentConfig& config, const GridPtr& grid);
Predictor build_predictor(const ExperimentConfig& config, const GridPtr& grid, const BatchSetup& setup);
BatchSetup build_setup(const ExperimentConfig& config);

// Each command writes its table to config.output (stdout when empty) and a
// short human summary to `log`. The return value is the process exit code.
int cmd_regret(const ExperimentConfig& config, std::ostream& log);
int cmd_capacity(const ExperimentConfig& config, std::ostream& log);
int cmd_lowerbound(const ExperimentConfig& config, std::ostream& log);
int cmd_limits(const ExperimentConfig& config, std::ostream& log);
// With `use_config` false, runs the built-in agreement suite over every
// guarded (n, ell) and predictor family; otherwise checks the configured instance.
int cmd_oracle_check(const ExperimentConfig& config, bool use_config, std::ostream& log);

}  // namespace bregret::cli
