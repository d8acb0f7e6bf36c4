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
#include "tvepi/objective.h"
#include "tvepi/errors.h"

#include <algorithm>
#include <cmath>

namespace tvepi
{

double total_variation(std::span<const double> values)
{
    double tv = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        tv += std::abs(values[i] - values[i - 1]);
    }
    return tv;
}

double quadratic_variation(std::span<const double> values)
{
    double qv = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        qv += d * d;
    }
    return qv;
}

ParameterEncoding::ParameterEncoding(std::vector<ParameterSpec> specs, std::size_t n_steps)
    : m_specs(std::move(specs))
    , m_n_steps(n_steps)
{
    if (n_steps == 0) {
        throw ConfigError("encoding needs at least one grid step");
    }
    for (std::size_t p = 0; p < m_specs.size(); ++p) {
        for (std::size_t q = 0; q < p; ++q) {
            if (m_specs[q].rate == m_specs[p].rate) {
                throw ConfigError("rate " + std::string(to_string(m_specs[p].rate)) + " encoded twice");
            }
        }
        m_offsets.push_back(m_dimension);
        m_dimension += length(p);
    }
}

ParameterEncoding ParameterEncoding::all_constant(ModelKind kind, std::size_t n_steps)
{
    std::vector<ParameterSpec> specs;
    for (auto rate : model_rates(kind)) {
        specs.push_back({rate, false, Transform::Log});
    }
    return ParameterEncoding(std::move(specs), n_steps);
}

std::vector<double> ParameterEncoding::encode(std::span<const ParameterPath> paths) const
{
    std::vector<double> x(m_dimension);
    for (std::size_t p = 0; p < m_specs.size(); ++p) {
        const auto& spec = m_specs[p];
        const auto& path = find_path(paths, spec.rate);
        const auto len   = length(p);
        if (path.values.size() != len) {
            throw ArityError("path for " + std::string(to_string(spec.rate)) + " has " +
                             std::to_string(path.values.size()) + " values, encoding expects " +
                             std::to_string(len));
        }
        for (std::size_t j = 0; j < len; ++j) {
            double v = path.values[j];
            if (spec.transform == Transform::Log) {
                if (!(v > 0.0)) {
                    throw EncodingError("log transform needs a positive " + std::string(to_string(spec.rate)) +
                                        ", got " + std::to_string(v));
                }
                v = std::log(v);
            }
            x[m_offsets[p] + j] = v;
        }
    }
    return x;
}

std::vector<ParameterPath> ParameterEncoding::decode(std::span<const double> x) const
{
    if (x.size() != m_dimension) {
        throw ArityError("encoded vector has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(m_dimension));
    }
    std::vector<ParameterPath> paths;
    paths.reserve(m_specs.size());
    for (std::size_t p = 0; p < m_specs.size(); ++p) {
        ParameterPath path{m_specs[p].rate, {}};
        auto slice = x.subspan(m_offsets[p], length(p));
        path.values.assign(slice.begin(), slice.end());
        if (m_specs[p].transform == Transform::Log) {
            for (auto& v : path.values) {
                v = std::exp(v);
            }
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

void ParameterEncoding::check_model(ModelKind kind) const
{
    auto rates = model_rates(kind);
    if (rates.size() != m_specs.size()) {
        throw ConfigError("encoding has " + std::to_string(m_specs.size()) + " parameters, " +
                          std::string(to_string(kind)) + " needs " + std::to_string(rates.size()));
    }
    for (auto rate : rates) {
        if (std::none_of(m_specs.begin(), m_specs.end(), [rate](const auto& s) {
                return s.rate == rate;
            })) {
            throw ConfigError("encoding lacks " + std::string(to_string(rate)));
        }
    }
}

void RegularizerSpec::validate(const ParameterEncoding& encoding) const
{
    for (const auto& term : terms) {
        if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) {
            throw ConfigError("regularization weight must be finite and non-negative");
        }
        const auto& specs = encoding.specs();
        auto it           = std::find_if(specs.begin(), specs.end(), [&](const auto& s) {
            return s.rate == term.rate;
        });
        if (it == specs.end()) {
            throw ConfigError("regularizer names unencoded rate " + std::string(to_string(term.rate)));
        }
        if (!it->time_varying && term.kind != RegularizerKind::None) {
            throw ConfigError("constant parameter " + std::string(to_string(term.rate)) +
                              " cannot carry a variation penalty");
        }
    }
}

double RegularizerSpec::penalty(std::span<const ParameterPath> paths) const
{
    double total = 0.0;
    for (const auto& term : terms) {
        if (term.kind == RegularizerKind::None || term.weight == 0.0) {
            continue;
        }
        const auto& values = find_path(paths, term.rate).values;
        total += term.weight *
                 (term.kind == RegularizerKind::TotalVariation ? total_variation(values) : quadratic_variation(values));
    }
    return total;
}

Objective::Objective(ModelKind kind, StateVector init, TimeGrid grid, Dataset data, ObservationConfig obs,
                     ParameterEncoding encoding, RegularizerSpec regularizer)
    : m_kind(kind)
    , m_init(std::move(init))
    , m_grid(grid)
    , m_data(std::move(data))
    , m_obs(obs)
    , m_encoding(std::move(encoding))
    , m_regularizer(std::move(regularizer))
{
    m_grid.validate();
    m_obs.validate();
    if (m_data.model != m_kind) {
        throw ConfigError("dataset targets a different model");
    }
    m_data.validate(m_grid);
    if (m_encoding.n_steps() != m_grid.n_steps) {
        throw ConfigError("encoding and time grid disagree on the number of steps");
    }
    m_encoding.check_model(m_kind);
    m_regularizer.validate(m_encoding);
    if (m_init.q.has_value() != (m_kind == ModelKind::SIRQ)) {
        throw ConfigError("initial state does not match the model");
    }
}

LossParts Objective::evaluate(std::span<const double> x) const
{
    LossParts parts;
    auto paths = m_encoding.decode(x);
    try {
        auto traj        = integrate(m_kind, m_init, paths, m_grid);
        parts.neg_loglik = -dataset_loglik(m_data, traj, m_obs);
    }
    catch (const IntegrationError&) {
        parts.overflow = true;
    }
    parts.penalty = m_regularizer.penalty(paths);
    parts.total   = parts.neg_loglik + parts.penalty;
    if (parts.overflow || !std::isfinite(parts.total)) {
        parts.overflow = true;
        parts.total    = overflow_loss;
    }
    return parts;
}

Trajectory Objective::trajectory(std::span<const double> x) const
{
    auto paths = m_encoding.decode(x);
    return integrate(m_kind, m_init, paths, m_grid);
}

double neg_log_posterior(std::span<const double> x, const Objective& objective)
{
    return objective(x);
}

double path_total_variation(std::span<const ParameterPath> paths)
{
    double tv = 0.0;
    for (const auto& p : paths) {
        tv += total_variation(p.values);
    }
    return tv;
}

} // namespace tvepi
