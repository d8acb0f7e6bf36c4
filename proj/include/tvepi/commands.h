/*
* Copyright (C) 2026 The tvepi Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef TVEPI_COMMANDS_H
#define TVEPI_COMMANDS_H

#include "tvepi/fit.h"
#include "tvepi/synthesis.h"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tvepi
{

/// Exit codes of the command line front end.
enum ExitCode : int
{
    exit_ok       = 0,
    exit_internal = 1,
    exit_usage    = 2,
};

struct RunConfig {
    std::string command;
    std::string scenario;
    std::filesystem::path config;
    std::filesystem::path out = "out";
    std::uint64_t seed        = 7;
    std::vector<double> lambdas;
    std::optional<std::size_t> starts;
    std::optional<std::size_t> max_restarts;
    std::optional<unsigned> threads;
};

/// Fit setup used by `reproduce` and by `lambda-sweep --scenario` for a built-in experiment.
FitConfig reproduction_config(ScenarioName name);

/// Default weight grid of the sweep, increasing, starting at 0.
std::vector<double> default_lambda_grid();

/// Pass/fail evaluation of a fit against the synthetic truth.
nlohmann::json reproduction_verdict(const SyntheticBundle& bundle, const FitOutcome& fit);

/// Write dataset.csv, truth_paths.csv, trajectory.csv and provenance.json.
void write_bundle(const std::filesystem::path& dir, const SyntheticBundle& bundle);
nlohmann::json provenance_json(const SyntheticBundle& bundle);

struct SweepPoint {
    double lambda     = 0.0;
    double best_loss  = 0.0;
    double misfit     = 0.0; ///< negative log-likelihood of the best estimate
    double penalty    = 0.0;
    double tv         = 0.0; ///< total variation of the best estimate's time-varying paths
    double loss_sd    = 0.0; ///< standard deviation of the per-start best losses
    std::vector<double> start_losses;
    std::vector<double> start_tvs;
    std::string regime;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::size_t selected = 0; ///< index of the well-regularized weight
};

/**
 * @brief Fit every weight in `lambdas` from the same start set.
 *
 * The selected weight is the largest whose misfit stays within half the record count of the smallest
 * misfit across the sweep (a discrepancy rule); smaller weights are labelled under-regularized, larger ones
 * over-regularized.
 */
SweepResult lambda_sweep(const FitConfig& cfg, const Dataset& data, const std::vector<double>& lambdas,
                         std::span<const std::vector<double>> starts);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_reproduce(const RunConfig& cfg, std::ostream& out);
int cmd_lambda_sweep(const RunConfig& cfg, std::ostream& out);

/// Parse arguments and dispatch; usage and config errors return exit_usage, other failures exit_internal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tvepi

#endif // TVEPI_COMMANDS_H
