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
#ifndef TVEPI_SYNTHESIS_H
#define TVEPI_SYNTHESIS_H

#include "tvepi/dynamics.h"
#include "tvepi/observation.h"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tvepi
{

enum class ScenarioName
{
    ConstantSIRQ,
    TimeVaryingSIR,
    TimeVaryingSIRQ,
};

std::string_view to_string(ScenarioName name);
/// Accepts constant-sirq, tv-sir and tv-sirq; throws ConfigError otherwise.
ScenarioName parse_scenario_name(std::string_view name);

struct PlannedEvidence {
    EvidenceKind kind        = EvidenceKind::Virulence;
    double t                 = 0.0;
    std::int64_t sample_size = 0;
};

struct ScenarioSpec {
    ScenarioName name = ScenarioName::ConstantSIRQ;
    ModelKind model   = ModelKind::SIRQ;
    double population = 1000.0;
    double initial_infectious = 10.0;
    TimeGrid grid;
    /// Ground truth in canonical rate order, each path constant or one value per grid step.
    std::vector<ParameterPath> truth;
    /// Sorted by time; surveillance entries have no sample size.
    std::vector<PlannedEvidence> plan;
    std::uint64_t seed = 0;

    void validate() const;
    StateVector initial() const
    {
        return initial_state(model, population, initial_infectious);
    }
};

/**
 * @brief Built-in experiment setups.
 *
 * The time-varying truths are step paths chosen for this project (the change points and levels are
 * documented in docs/scenarios.md); only the population sizes, initial infectious counts, the constant
 * SIRQ rates and the evidence counts and sample sizes are fixed by the experimental design.
 */
ScenarioSpec builtin_scenario(ScenarioName name, std::uint64_t seed = 0);

struct SyntheticBundle {
    ScenarioSpec spec;
    Trajectory trajectory;
    Dataset dataset;
    std::string spec_hash; ///< FNV-1a of the canonical spec text, hex

    const std::vector<ParameterPath>& truth() const
    {
        return spec.truth;
    }
};

/// Canonical text form of a spec, the input of the spec hash.
std::string canonical_text(const ScenarioSpec& spec);
std::string spec_hash(const ScenarioSpec& spec);

/**
 * @brief Integrate the truth and draw one dataset.
 *
 * Record j draws from CounterRng(seed, j): virulence k ~ Bin(m, I/N), surveillance k ~ Poi(Q) (Poi(R) for
 * SIR), serology k ~ Bin(m, R/N).
 */
SyntheticBundle synthesize(const ScenarioSpec& spec);

/// Draw a single record of the plan from the given trajectory.
EvidenceRecord draw_record(const PlannedEvidence& planned, const Trajectory& traj, std::uint64_t seed,
                           std::uint64_t record_index);

/// Step path over `n_steps`: levels[j] on [changes[j-1], changes[j]).
std::vector<double> step_path(std::size_t n_steps, const std::vector<double>& levels,
                              const std::vector<std::size_t>& changes);

/// `t,beta,gamma[,delta]`, one row per grid step holding the value in force on that step.
void write_paths_csv(std::ostream& out, ModelKind model, const TimeGrid& grid, std::span<const ParameterPath> paths);
/// Parse a paths CSV into full-length paths (n_steps values per rate).
std::vector<ParameterPath> read_paths_csv(std::istream& in, ModelKind model, const TimeGrid& grid);

} // namespace tvepi

#endif // TVEPI_SYNTHESIS_H
