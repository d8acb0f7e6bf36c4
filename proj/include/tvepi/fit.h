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
#ifndef TVEPI_FIT_H
#define TVEPI_FIT_H

#include "tvepi/objective.h"
#include "tvepi/optimizer.h"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tvepi
{

/**
 * @brief Coordinates the simplex search runs in. Increments replaces every entry of a time-varying block after
 * the first by its difference to the previous entry, so one axis move shifts the whole remaining path.
 * Alternating runs Iterated Nelder-Mead rounds in increments and values in turn, each round starting from the
 * previous optimum, until a round improves no start by the restart tolerance or max_alternations is reached.
 */
enum class SearchCoordinates
{
    Values,
    Increments,
    Alternating,
};

/// Round cap for SearchCoordinates::Alternating, counting the first increments round.
inline constexpr std::size_t max_alternations = 8;

std::string_view to_string(SearchCoordinates coords);
SearchCoordinates parse_search_coordinates(std::string_view name);

/// Alternating searches start in increments, so it maps like Increments here.
std::vector<double> to_search(const ParameterEncoding& encoding, SearchCoordinates coords, std::span<const double> x);
std::vector<double> from_search(const ParameterEncoding& encoding, SearchCoordinates coords,
                                std::span<const double> z);

/**
 * @brief How run_fit searches. Each block width is one level of a coarse-to-fine schedule: time-varying paths
 * are restricted to constant runs of that many steps (the last run may be shorter), and every level starts from
 * the optimum of the previous one. Widths must strictly decrease and end at 1. With widths other than {1} the
 * simplex step sizes must be scalars.
 */
struct SearchPlan {
    SearchCoordinates coordinates = SearchCoordinates::Alternating;
    std::vector<std::size_t> block_widths{1};

    void validate(const IteratedConfig& optimizer) const;
};

/// Block-constant restriction of an encoded point: entries of each width-`width` run replaced by their mean.
std::vector<double> coarsen(const ParameterEncoding& encoding, std::size_t width, std::span<const double> x);

struct FitParameter {
    ParameterSpec spec;
    RegularizerKind regularizer = RegularizerKind::None;
    double weight               = 0.0;
};

/**
 * @brief Everything needed to set up and run one fit. Serialized as JSON, see docs/config.md.
 */
struct FitConfig {
    ModelKind model           = ModelKind::SIRQ;
    double population         = 1000.0;
    double initial_infectious = 10.0;
    TimeGrid grid;
    std::vector<FitParameter> parameters;
    ObservationConfig observation;
    std::filesystem::path dataset;       ///< relative paths resolve against the config file
    std::filesystem::path initial_paths; ///< optional paths CSV used as the first start
    IteratedConfig optimizer;
    SearchPlan search;
    std::size_t starts = 5;
    unsigned threads   = 0;

    ParameterEncoding encoding() const;
    RegularizerSpec regularizer() const;
    /// Same config with every variation penalty weight replaced by `weight`.
    FitConfig with_penalty_weight(double weight) const;
};

FitConfig fit_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const FitConfig& cfg);
FitConfig load_fit_config(const std::filesystem::path& file);

Objective make_objective(const FitConfig& cfg, Dataset data);

/// Rough constant rates implied by the data: early growth from the first positive virulence sample.
std::vector<ParameterPath> crude_rates(const Objective& objective);

/**
 * @brief Start set for multi-start: the encoded `base` plus `count - 1` copies whose rates are scaled by
 * exp(+-0.25) in a fixed sign pattern.
 */
std::vector<std::vector<double>> perturbed_starts(const ParameterEncoding& encoding,
                                                  std::span<const ParameterPath> base, std::size_t count);

/// Paths reshaped to the encoding: constant parameters keep their first value.
std::vector<ParameterPath> shape_for_encoding(const ParameterEncoding& encoding, std::span<const ParameterPath> paths);

struct FitOutcome {
    OptResult result;
    std::vector<OptResult> per_start;
    std::size_t best_start = 0;
    LossParts parts;
    std::vector<ParameterPath> paths;
    Trajectory trajectory;
    bool under_determined = false;
};

/**
 * @brief Multi-start fit following `plan`. Starts are given and results reported in encoded coordinates. Per
 * start, evaluations, restarts and the trace accumulate over all levels and rounds.
 */
FitOutcome run_fit(const Objective& objective, std::span<const std::vector<double>> starts,
                   const IteratedConfig& optimizer, unsigned threads = 0, const SearchPlan& plan = {});

/// fitted_paths.csv, fitted_trajectory.csv, trace.csv and report.json.
void write_fit_outputs(const std::filesystem::path& dir, const Objective& objective, const FitOutcome& fit);
nlohmann::json fit_report(const Objective& objective, const FitOutcome& fit);

} // namespace tvepi

#endif // TVEPI_FIT_H
