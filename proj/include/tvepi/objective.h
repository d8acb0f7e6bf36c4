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
#ifndef TVEPI_OBJECTIVE_H
#define TVEPI_OBJECTIVE_H

#include "tvepi/dynamics.h"
#include "tvepi/observation.h"

#include <span>
#include <vector>

namespace tvepi
{

/// Loss reported when the trajectory cannot be computed.
inline constexpr double overflow_loss = 1e12;

double total_variation(std::span<const double> values);
double quadratic_variation(std::span<const double> values);

enum class Transform
{
    Identity,
    Log,
};

struct ParameterSpec {
    Rate rate         = Rate::Beta;
    bool time_varying = false;
    Transform transform = Transform::Log;
};

/**
 * @brief Maps parameter paths to the flat vector seen by the optimizer and back.
 *
 * Entries are laid out in declaration order; a constant parameter takes one slot, a time-varying one takes
 * `n_steps` slots. Log-transformed slots carry log(value).
 */
class ParameterEncoding
{
public:
    ParameterEncoding() = default;
    ParameterEncoding(std::vector<ParameterSpec> specs, std::size_t n_steps);

    /// Every rate of `kind` as a constant with Log transform.
    static ParameterEncoding all_constant(ModelKind kind, std::size_t n_steps);

    const std::vector<ParameterSpec>& specs() const
    {
        return m_specs;
    }
    std::size_t n_steps() const
    {
        return m_n_steps;
    }
    std::size_t dimension() const
    {
        return m_dimension;
    }
    std::size_t length(std::size_t param) const
    {
        return m_specs[param].time_varying ? m_n_steps : 1;
    }
    std::size_t offset(std::size_t param) const
    {
        return m_offsets[param];
    }

    /// Throws ArityError if a path is missing or mis-sized, EncodingError for non-positive values under Log.
    std::vector<double> encode(std::span<const ParameterPath> paths) const;
    std::vector<ParameterPath> decode(std::span<const double> x) const;

    /// Throws ConfigError unless the encoding covers exactly the rates of `kind`.
    void check_model(ModelKind kind) const;

private:
    std::vector<ParameterSpec> m_specs;
    std::vector<std::size_t> m_offsets;
    std::size_t m_n_steps   = 0;
    std::size_t m_dimension = 0;
};

enum class RegularizerKind
{
    None,
    TotalVariation,
    QuadraticVariation,
};

struct RegularizerTerm {
    Rate rate            = Rate::Beta;
    RegularizerKind kind = RegularizerKind::TotalVariation;
    double weight        = 0.0;
};

/// Per-rate penalty, applied to the natural-scale path. Rates without a term are unpenalized.
struct RegularizerSpec {
    std::vector<RegularizerTerm> terms;

    void validate(const ParameterEncoding& encoding) const;
    double penalty(std::span<const ParameterPath> paths) const;
};

struct LossParts {
    double neg_loglik = 0.0;
    double penalty    = 0.0;
    double total      = 0.0;
    bool overflow     = false;
};

/**
 * @brief Regularized negative log-posterior over the encoded parameter vector.
 *
 * The state equation is deterministic, so the trajectory is a function of the parameters and only the
 * observation log-likelihood and the regularizer contribute. Immutable and safe to evaluate concurrently.
 */
class Objective
{
public:
    Objective(ModelKind kind, StateVector init, TimeGrid grid, Dataset data, ObservationConfig obs,
              ParameterEncoding encoding, RegularizerSpec regularizer);

    double operator()(std::span<const double> x) const
    {
        return evaluate(x).total;
    }

    LossParts evaluate(std::span<const double> x) const;

    /// Throws IntegrationError instead of returning the overflow loss.
    Trajectory trajectory(std::span<const double> x) const;

    ModelKind kind() const
    {
        return m_kind;
    }
    const StateVector& initial() const
    {
        return m_init;
    }
    const TimeGrid& grid() const
    {
        return m_grid;
    }
    const Dataset& data() const
    {
        return m_data;
    }
    const ObservationConfig& observation() const
    {
        return m_obs;
    }
    const ParameterEncoding& encoding() const
    {
        return m_encoding;
    }
    const RegularizerSpec& regularizer() const
    {
        return m_regularizer;
    }
    std::size_t dimension() const
    {
        return m_encoding.dimension();
    }

private:
    ModelKind m_kind;
    StateVector m_init;
    TimeGrid m_grid;
    Dataset m_data;
    ObservationConfig m_obs;
    ParameterEncoding m_encoding;
    RegularizerSpec m_regularizer;
};

double neg_log_posterior(std::span<const double> x, const Objective& objective);

/// Sum of the total variations of all time-varying paths.
double path_total_variation(std::span<const ParameterPath> paths);

} // namespace tvepi

#endif // TVEPI_OBJECTIVE_H
