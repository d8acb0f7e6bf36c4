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
#include "tvepi/synthesis.h"
#include "tvepi/csv.h"
#include "tvepi/errors.h"
#include "tvepi/random.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace tvepi
{

std::string_view to_string(ScenarioName name)
{
    switch (name) {
    case ScenarioName::ConstantSIRQ:
        return "constant-sirq";
    case ScenarioName::TimeVaryingSIR:
        return "tv-sir";
    case ScenarioName::TimeVaryingSIRQ:
        return "tv-sirq";
    }
    return "?";
}

ScenarioName parse_scenario_name(std::string_view name)
{
    for (auto s : {ScenarioName::ConstantSIRQ, ScenarioName::TimeVaryingSIR, ScenarioName::TimeVaryingSIRQ}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "' (expected constant-sirq, tv-sir or tv-sirq)");
}

std::vector<double> step_path(std::size_t n_steps, const std::vector<double>& levels,
                              const std::vector<std::size_t>& changes)
{
    if (levels.size() != changes.size() + 1) {
        throw ConfigError("a step path needs one more level than change points");
    }
    std::vector<double> values(n_steps);
    std::size_t segment = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        while (segment < changes.size() && k >= changes[segment]) {
            ++segment;
        }
        values[k] = levels[segment];
    }
    return values;
}

namespace
{

// evenly spaced at fractions 1/10, 2/10, ... of the horizon
void plan_evidence(ScenarioSpec& spec, EvidenceKind kind, std::size_t count, std::int64_t sample_size)
{
    const double span = spec.grid.horizon - spec.grid.t0;
    for (std::size_t j = 1; j <= count; ++j) {
        spec.plan.push_back({kind, spec.grid.t0 + span * static_cast<double>(j) / 10.0, sample_size});
    }
}

void sort_plan(ScenarioSpec& spec)
{
    std::stable_sort(spec.plan.begin(), spec.plan.end(), [](const auto& a, const auto& b) {
        return a.t < b.t || (a.t == b.t && static_cast<int>(a.kind) < static_cast<int>(b.kind));
    });
}

} // namespace

ScenarioSpec builtin_scenario(ScenarioName name, std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.name = name;
    spec.seed = seed;
    spec.grid = TimeGrid{0.0, 100.0, 100, 10};
    const auto n = spec.grid.n_steps;

    switch (name) {
    case ScenarioName::ConstantSIRQ:
        spec.model              = ModelKind::SIRQ;
        spec.population         = 1000.0;
        spec.initial_infectious = 10.0;
        spec.truth              = {{Rate::Beta, {0.3}}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
        plan_evidence(spec, EvidenceKind::Virulence, 9, 10);
        plan_evidence(spec, EvidenceKind::Surveillance, 8, 0);
        break;
    case ScenarioName::TimeVaryingSIR:
        spec.model              = ModelKind::SIR;
        spec.population         = 100000.0;
        spec.initial_infectious = 100.0;
        // rise (gatherings) then drop (awareness)
        spec.truth = {{Rate::Beta, step_path(n, {0.15, 0.24, 0.12}, {20, 40})}, {Rate::Gamma, {0.03}}};
        plan_evidence(spec, EvidenceKind::Virulence, 9, 1000);
        break;
    case ScenarioName::TimeVaryingSIRQ:
        spec.model              = ModelKind::SIRQ;
        spec.population         = 100000.0;
        spec.initial_infectious = 100.0;
        // lockdown drop in beta; delta plateau while a field hospital is open
        spec.truth = {{Rate::Beta, step_path(n, {0.2, 0.12}, {40})},
                      {Rate::Gamma, {0.03}},
                      {Rate::Delta, step_path(n, {0.03, 0.09, 0.03}, {30, 50})}};
        plan_evidence(spec, EvidenceKind::Virulence, 9, 1000);
        plan_evidence(spec, EvidenceKind::Surveillance, 8, 0);
        plan_evidence(spec, EvidenceKind::Serology, 9, 1000);
        break;
    }
    sort_plan(spec);
    return spec;
}

void ScenarioSpec::validate() const
{
    grid.validate();
    if (!(population > 0.0) || !(initial_infectious >= 0.0) || initial_infectious > population) {
        throw ConfigError("scenario needs 0 <= I0 <= N and N > 0");
    }
    for (auto rate : model_rates(model)) {
        const auto& path = find_path(truth, rate);
        if (path.values.size() != 1 && path.values.size() != grid.n_steps) {
            throw ArityError("truth path for " + std::string(to_string(rate)) + " has the wrong length");
        }
        for (double v : path.values) {
            if (!(v >= 0.0)) {
                throw ConfigError("truth rates must be non-negative");
            }
        }
    }
    double last = -1e300;
    for (const auto& p : plan) {
        if (p.t < grid.t0 || p.t > grid.horizon || p.t < last) {
            throw ConfigError("evidence plan must be sorted and lie within the grid");
        }
        last = p.t;
        if (p.kind != EvidenceKind::Surveillance && p.sample_size <= 0) {
            throw ConfigError("sampled evidence needs a positive sample size");
        }
        if (p.kind == EvidenceKind::Serology && model != ModelKind::SIRQ) {
            throw ConfigError("serology evidence requires the SIRQ model");
        }
    }
}

std::string canonical_text(const ScenarioSpec& spec)
{
    std::ostringstream os;
    os << "scenario=" << to_string(spec.name) << ";model=" << to_string(spec.model)
       << ";N=" << csv::format_double(spec.population) << ";I0=" << csv::format_double(spec.initial_infectious)
       << ";grid=" << csv::format_double(spec.grid.t0) << ',' << csv::format_double(spec.grid.horizon) << ','
       << spec.grid.n_steps << ',' << spec.grid.substeps_per_step << ";seed=" << spec.seed;
    for (const auto& p : spec.truth) {
        os << ';' << to_string(p.rate) << '=';
        for (std::size_t j = 0; j < p.values.size(); ++j) {
            os << (j ? "," : "") << csv::format_double(p.values[j]);
        }
    }
    for (const auto& e : spec.plan) {
        os << ";evidence=" << to_string(e.kind) << '@' << csv::format_double(e.t) << '/' << e.sample_size;
    }
    return os.str();
}

std::string spec_hash(const ScenarioSpec& spec)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

EvidenceRecord draw_record(const PlannedEvidence& planned, const Trajectory& traj, std::uint64_t seed,
                           std::uint64_t record_index)
{
    CounterRng rng(seed, record_index);
    const auto& x  = traj.at(traj.grid().nearest_node(planned.t));
    const double n = traj.population();

    EvidenceRecord rec{planned.kind, planned.t, planned.sample_size, 0};
    switch (planned.kind) {
    case EvidenceKind::Virulence:
        rec.count = sample_binomial(rng, planned.sample_size, std::clamp(x.i / n, 0.0, 1.0));
        break;
    case EvidenceKind::Serology:
        rec.count = sample_binomial(rng, planned.sample_size, std::clamp(x.r / n, 0.0, 1.0));
        break;
    case EvidenceKind::Surveillance:
        rec.sample_size = 0;
        rec.count = sample_poisson(rng, std::max(0.0, traj.kind() == ModelKind::SIRQ ? *x.q : x.r));
        break;
    }
    return rec;
}

SyntheticBundle synthesize(const ScenarioSpec& spec)
{
    spec.validate();
    auto traj = integrate(spec.model, spec.initial(), spec.truth, spec.grid);
    Dataset data;
    data.model = spec.model;
    data.records.reserve(spec.plan.size());
    for (std::size_t j = 0; j < spec.plan.size(); ++j) {
        data.records.push_back(draw_record(spec.plan[j], traj, spec.seed, j));
    }
    return SyntheticBundle{spec, std::move(traj), std::move(data), spec_hash(spec)};
}

void write_paths_csv(std::ostream& out, ModelKind model, const TimeGrid& grid, std::span<const ParameterPath> paths)
{
    auto rates = model_rates(model);
    out << 't';
    for (auto r : rates) {
        out << ',' << to_string(r);
    }
    out << '\n';
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        out << csv::format_double(grid.node_time(k));
        for (auto r : rates) {
            out << ',' << csv::format_double(find_path(paths, r).at(k));
        }
        out << '\n';
    }
}

std::vector<ParameterPath> read_paths_csv(std::istream& in, ModelKind model, const TimeGrid& grid)
{
    auto rates         = model_rates(model);
    std::string header = "t";
    for (auto r : rates) {
        header += ',';
        header += to_string(r);
    }
    auto rows = csv::read_table(in, header);
    if (rows.size() != grid.n_steps) {
        throw ParseError("paths file has " + std::to_string(rows.size()) + " rows, expected " +
                         std::to_string(grid.n_steps));
    }
    std::vector<ParameterPath> paths;
    for (auto r : rates) {
        paths.push_back({r, std::vector<double>(grid.n_steps)});
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t j = 0; j < rates.size(); ++j) {
            paths[j].values[k] = csv::parse_double(rows[k][j + 1]);
        }
    }
    return paths;
}

} // namespace tvepi
