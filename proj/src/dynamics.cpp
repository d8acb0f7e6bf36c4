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
#include "tvepi/dynamics.h"
#include "tvepi/csv.h"
#include "tvepi/errors.h"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace tvepi
{

std::size_t num_compartments(ModelKind kind)
{
    return kind == ModelKind::SIR ? 3 : 4;
}

std::size_t num_rates(ModelKind kind)
{
    return kind == ModelKind::SIR ? 2 : 3;
}

std::vector<Rate> model_rates(ModelKind kind)
{
    if (kind == ModelKind::SIR) {
        return {Rate::Beta, Rate::Gamma};
    }
    return {Rate::Beta, Rate::Gamma, Rate::Delta};
}

std::string_view to_string(ModelKind kind)
{
    return kind == ModelKind::SIR ? "SIR" : "SIRQ";
}

std::string_view to_string(Rate rate)
{
    switch (rate) {
    case Rate::Beta:
        return "beta";
    case Rate::Gamma:
        return "gamma";
    case Rate::Delta:
        return "delta";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name)
{
    if (name == "SIR" || name == "sir") {
        return ModelKind::SIR;
    }
    if (name == "SIRQ" || name == "sirq") {
        return ModelKind::SIRQ;
    }
    throw ConfigError("unknown model '" + std::string(name) + "'");
}

Rate parse_rate(std::string_view name)
{
    if (name == "beta") {
        return Rate::Beta;
    }
    if (name == "gamma") {
        return Rate::Gamma;
    }
    if (name == "delta") {
        return Rate::Delta;
    }
    throw ConfigError("unknown rate parameter '" + std::string(name) + "'");
}

StateVector initial_state(ModelKind kind, double population, double infectious)
{
    StateVector x{population - infectious, infectious, 0.0, std::nullopt};
    if (kind == ModelKind::SIRQ) {
        x.q = 0.0;
    }
    return x;
}

std::size_t TimeGrid::nearest_node(double t) const
{
    double pos = (t - t0) / step_width();
    if (!(pos > 0.0)) {
        return 0;
    }
    double lower = std::floor(pos);
    auto node    = static_cast<std::size_t>(lower);
    if (pos - lower > 0.5) {
        ++node;
    }
    return std::min(node, n_steps);
}

void TimeGrid::validate() const
{
    if (n_steps == 0) {
        throw ConfigError("time grid needs at least one step");
    }
    if (substeps_per_step == 0) {
        throw ConfigError("time grid needs at least one substep per step");
    }
    if (!(horizon > t0) || !std::isfinite(horizon) || !std::isfinite(t0)) {
        throw ConfigError("time grid horizon must exceed t0");
    }
}

const ParameterPath& find_path(std::span<const ParameterPath> paths, Rate rate)
{
    auto it = std::find_if(paths.begin(), paths.end(), [rate](const auto& p) {
        return p.rate == rate;
    });
    if (it == paths.end()) {
        throw ArityError("missing parameter path for " + std::string(to_string(rate)));
    }
    return *it;
}

Trajectory::Trajectory(ModelKind kind, TimeGrid grid, std::vector<StateVector> states)
    : m_kind(kind)
    , m_grid(grid)
    , m_states(std::move(states))
    , m_population(m_states.empty() ? 0.0 : m_states.front().total())
{
    if (m_states.size() != m_grid.n_steps + 1) {
        throw ConfigError("trajectory needs n_steps + 1 states");
    }
}

namespace
{

void check_state_shape(ModelKind kind, const StateVector& state)
{
    if (state.q.has_value() != (kind == ModelKind::SIRQ)) {
        throw ArityError("state shape does not match model " + std::string(to_string(kind)));
    }
}

} // namespace

StateVector derivative(ModelKind kind, const StateVector& state, std::span<const double> params)
{
    if (params.size() != num_rates(kind)) {
        throw ArityError(std::string(to_string(kind)) + " takes " + std::to_string(num_rates(kind)) +
                         " parameters, got " + std::to_string(params.size()));
    }
    check_state_shape(kind, state);
    const double n         = state.total();
    const double infection = n > 0.0 ? params[0] * state.s * state.i / n : 0.0;
    const double removal   = params[1] * state.i;

    StateVector rate;
    rate.s = -infection;
    rate.r = removal;
    if (kind == ModelKind::SIRQ) {
        const double quarantine = params[2] * state.i;
        rate.i                  = infection - removal - quarantine;
        rate.q                  = quarantine;
    }
    else {
        rate.i = infection - removal;
    }
    return rate;
}

Trajectory integrate(ModelKind kind, const StateVector& init, std::span<const ParameterPath> paths,
                     const TimeGrid& grid)
{
    grid.validate();
    check_state_shape(kind, init);
    const bool quarantine = kind == ModelKind::SIRQ;

    const ParameterPath& beta  = find_path(paths, Rate::Beta);
    const ParameterPath& gamma = find_path(paths, Rate::Gamma);
    const ParameterPath* delta = quarantine ? &find_path(paths, Rate::Delta) : nullptr;
    for (const auto& p : paths) {
        if (p.values.size() != 1 && p.values.size() != grid.n_steps) {
            throw ArityError("path for " + std::string(to_string(p.rate)) + " has " +
                             std::to_string(p.values.size()) + " values, expected 1 or " +
                             std::to_string(grid.n_steps));
        }
    }

    const double n  = init.total();
    const double dt = grid.step_width() / static_cast<double>(grid.substeps_per_step);

    std::vector<StateVector> states;
    states.reserve(grid.n_steps + 1);
    states.push_back(init);

    double s = init.s, i = init.i, r = init.r, q = init.q.value_or(0.0);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double b_dt = n > 0.0 ? beta.at(k) * dt / n : 0.0;
        const double g_dt = gamma.at(k) * dt;
        const double d_dt = delta ? delta->at(k) * dt : 0.0;
        for (std::size_t sub = 0; sub < grid.substeps_per_step; ++sub) {
            double infection = b_dt * s * i;
            double removal   = g_dt * i;
            double quarant   = d_dt * i;
            if (infection > s) {
                infection = s;
            }
            const double available = i + infection;
            const double outflow   = removal + quarant;
            if (outflow > available) {
                // drain I completely, split by the relative rates
                removal = outflow > 0.0 ? available * (removal / outflow) : 0.0;
                quarant = available - removal;
                i       = 0.0;
            }
            else {
                i = available - outflow;
            }
            s = infection == s ? 0.0 : s - infection;
            r += removal;
            q += quarant;
        }
        if (!std::isfinite(s) || !std::isfinite(i) || !std::isfinite(r) || !std::isfinite(q)) {
            throw IntegrationError(k);
        }
        StateVector x{s, i, r, std::nullopt};
        if (quarantine) {
            x.q = q;
        }
        states.push_back(x);
    }
    return Trajectory(kind, grid, std::move(states));
}

double basic_reproduction_number(ModelKind kind, double beta, double gamma, std::optional<double> delta,
                                 bool controlled)
{
    double denom = gamma;
    if (kind == ModelKind::SIRQ && controlled) {
        if (!delta) {
            throw ArityError("controlled reproduction number needs delta");
        }
        denom += *delta;
    }
    if (!(denom > 0.0)) {
        throw DomainError("reproduction number undefined for a zero removal rate");
    }
    return beta / denom;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    const bool quarantine = traj.kind() == ModelKind::SIRQ;
    out << (quarantine ? "t,S,I,R,Q\n" : "t,S,I,R\n");
    for (std::size_t k = 0; k < traj.states().size(); ++k) {
        const auto& x = traj.at(k);
        out << csv::format_double(traj.grid().node_time(k)) << ',' << csv::format_double(x.s) << ','
            << csv::format_double(x.i) << ',' << csv::format_double(x.r);
        if (quarantine) {
            out << ',' << csv::format_double(*x.q);
        }
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in, ModelKind kind, const TimeGrid& grid)
{
    const bool quarantine = kind == ModelKind::SIRQ;
    auto rows             = csv::read_table(in, quarantine ? "t,S,I,R,Q" : "t,S,I,R");
    if (rows.size() != grid.n_steps + 1) {
        throw ParseError("trajectory has " + std::to_string(rows.size()) + " rows, expected " +
                         std::to_string(grid.n_steps + 1));
    }
    std::vector<StateVector> states;
    states.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& row = rows[k];
        double t        = csv::parse_double(row[0]);
        if (std::abs(t - grid.node_time(k)) > 1e-9 * std::max(1.0, std::abs(t))) {
            throw ParseError("trajectory time " + row[0] + " is not grid node " + std::to_string(k));
        }
        StateVector x{csv::parse_double(row[1]), csv::parse_double(row[2]), csv::parse_double(row[3]), std::nullopt};
        if (quarantine) {
            x.q = csv::parse_double(row[4]);
        }
        states.push_back(x);
    }
    return Trajectory(kind, grid, std::move(states));
}

} // namespace tvepi
