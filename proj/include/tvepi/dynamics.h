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
#ifndef TVEPI_DYNAMICS_H
#define TVEPI_DYNAMICS_H

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvepi
{

enum class ModelKind
{
    SIR,
    SIRQ,
};

/// Dynamic rate parameters. Declaration order is the canonical parameter order.
enum class Rate
{
    Beta,
    Gamma,
    Delta,
};

std::size_t num_compartments(ModelKind kind);
std::size_t num_rates(ModelKind kind);

/// Rates of the model in canonical order: (beta, gamma) or (beta, gamma, delta).
std::vector<Rate> model_rates(ModelKind kind);

std::string_view to_string(ModelKind kind);
std::string_view to_string(Rate rate);
ModelKind parse_model_kind(std::string_view name);
Rate parse_rate(std::string_view name);

/**
 * @brief Compartment occupancies at one instant.
 * Counts are real-valued; `q` is present iff the model is SIRQ.
 */
struct StateVector {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    std::optional<double> q;

    double total() const
    {
        return s + i + r + q.value_or(0.0);
    }

    bool operator==(const StateVector&) const = default;
};

/// Initial state with `infectious` infected, nobody removed or quarantined.
StateVector initial_state(ModelKind kind, double population, double infectious);

/**
 * @brief Uniform time grid. Parameters are held constant on each of the `n_steps` intervals,
 * which are further split into `substeps_per_step` Euler steps.
 */
struct TimeGrid {
    double t0                     = 0.0;
    double horizon                = 100.0;
    std::size_t n_steps           = 100;
    std::size_t substeps_per_step = 10;

    double step_width() const
    {
        return (horizon - t0) / static_cast<double>(n_steps);
    }

    double node_time(std::size_t k) const
    {
        return t0 + step_width() * static_cast<double>(k);
    }

    /// Nearest grid node to t, ties toward the earlier node.
    std::size_t nearest_node(double t) const;

    /// Throws ConfigError if the grid is degenerate.
    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

/// Value sequence of one rate: a single value (constant) or one value per grid step.
struct ParameterPath {
    Rate rate = Rate::Beta;
    std::vector<double> values;

    bool is_constant() const
    {
        return values.size() == 1;
    }

    double at(std::size_t step) const
    {
        return is_constant() ? values.front() : values[step];
    }

    bool operator==(const ParameterPath&) const = default;
};

/// Look up the path of `rate`; throws ArityError if missing.
const ParameterPath& find_path(std::span<const ParameterPath> paths, Rate rate);

/**
 * @brief Deterministic solution on the grid nodes, states[0] is the initial condition.
 */
class Trajectory
{
public:
    Trajectory(ModelKind kind, TimeGrid grid, std::vector<StateVector> states);

    ModelKind kind() const
    {
        return m_kind;
    }
    const TimeGrid& grid() const
    {
        return m_grid;
    }
    const std::vector<StateVector>& states() const
    {
        return m_states;
    }
    const StateVector& at(std::size_t node) const
    {
        return m_states[node];
    }
    double population() const
    {
        return m_population;
    }

private:
    ModelKind m_kind;
    TimeGrid m_grid;
    std::vector<StateVector> m_states;
    double m_population;
};

/**
 * @brief Right-hand side of the SIR / SIRQ ODE in flow form.
 * @param params (beta, gamma) for SIR, (beta, gamma, delta) for SIRQ.
 * @return (dS, dI, dR[, dQ]) with the shape of `state`.
 */
StateVector derivative(ModelKind kind, const StateVector& state, std::span<const double> params);

/**
 * @brief Forward Euler on `grid` with piecewise-constant parameters.
 *
 * Each substep moves the flows S->I, I->R (and I->Q). A flow that would drain a compartment below zero is
 * truncated to the available mass; the I outflows are truncated proportionally, so totals are conserved and
 * all compartments stay non-negative.
 *
 * Throws ArityError for missing or mis-sized paths and IntegrationError if a state becomes non-finite.
 */
Trajectory integrate(ModelKind kind, const StateVector& init, std::span<const ParameterPath> paths,
                     const TimeGrid& grid);

/// beta/gamma, or beta/(gamma + delta) for the controlled SIRQ variant.
double basic_reproduction_number(ModelKind kind, double beta, double gamma, std::optional<double> delta,
                                 bool controlled);

/// `t,S,I,R[,Q]` with one row per grid node.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Parse a trajectory written by write_trajectory_csv. The grid must match the file's time column.
Trajectory read_trajectory_csv(std::istream& in, ModelKind kind, const TimeGrid& grid);

} // namespace tvepi

#endif // TVEPI_DYNAMICS_H
