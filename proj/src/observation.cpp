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
#include "tvepi/observation.h"
#include "tvepi/csv.h"
#include "tvepi/errors.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace tvepi
{

std::string_view to_string(EvidenceKind kind)
{
    switch (kind) {
    case EvidenceKind::Virulence:
        return "virulence";
    case EvidenceKind::Surveillance:
        return "surveillance";
    case EvidenceKind::Serology:
        return "serology";
    }
    return "?";
}

EvidenceKind parse_evidence_kind(std::string_view name)
{
    if (name == "virulence") {
        return EvidenceKind::Virulence;
    }
    if (name == "surveillance") {
        return EvidenceKind::Surveillance;
    }
    if (name == "serology") {
        return EvidenceKind::Serology;
    }
    throw ParseError("unknown evidence kind '" + std::string(name) + "'");
}

void ObservationConfig::validate() const
{
    if (!(variance_floor > 0.0)) {
        throw ConfigError("variance floor must be positive");
    }
}

void Dataset::validate(const TimeGrid& grid) const
{
    double last_t = -std::numeric_limits<double>::infinity();
    for (const auto& rec : records) {
        if (rec.t < last_t) {
            throw ConfigError("evidence records must be sorted by time");
        }
        last_t = rec.t;
        if (!(rec.t >= grid.t0 && rec.t <= grid.horizon)) {
            throw ConfigError("evidence time " + std::to_string(rec.t) + " outside the time grid");
        }
        if (rec.count < 0) {
            throw DomainError("negative evidence count");
        }
        if (rec.kind != EvidenceKind::Surveillance) {
            if (rec.sample_size <= 0) {
                throw DomainError("sample size must be positive");
            }
            if (rec.count > rec.sample_size) {
                throw DomainError("count exceeds sample size");
            }
        }
        if (rec.kind == EvidenceKind::Serology && model != ModelKind::SIRQ) {
            throw ConfigError("serology evidence requires the SIRQ model");
        }
    }
}

namespace
{

double log_choose(std::int64_t m, std::int64_t k)
{
    return std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(m - k) + 1.0);
}

// I/N or R/N can exceed [0, 1] by a rounding error
double clamp_probability(double p)
{
    constexpr double slack = 1e-12;
    if (!(p >= -slack && p <= 1.0 + slack)) {
        throw DomainError("probability " + std::to_string(p) + " outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
}

} // namespace

double binomial_loglik(std::int64_t k, std::int64_t m, double p)
{
    if (k < 0 || m < 0 || k > m) {
        throw DomainError("binomial outcome k=" + std::to_string(k) + " outside [0, m=" + std::to_string(m) + "]");
    }
    p = clamp_probability(p);
    if (p == 0.0) {
        return k == 0 ? 0.0 : impossible_log_density;
    }
    if (p == 1.0) {
        return k == m ? 0.0 : impossible_log_density;
    }
    return log_choose(m, k) + static_cast<double>(k) * std::log(p) + static_cast<double>(m - k) * std::log1p(-p);
}

double poisson_loglik(std::int64_t k, double mean)
{
    if (k < 0) {
        throw DomainError("negative Poisson outcome");
    }
    if (!(mean >= 0.0)) {
        throw DomainError("Poisson mean must be non-negative");
    }
    if (mean == 0.0) {
        return k == 0 ? 0.0 : impossible_log_density;
    }
    const double kd = static_cast<double>(k);
    return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

double gaussian_loglik(double y, double mean, double variance)
{
    if (!(variance > 0.0)) {
        throw DomainError("Gaussian variance must be positive");
    }
    const double resid = y - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - resid * resid / (2.0 * variance);
}

double record_loglik(const EvidenceRecord& rec, const Trajectory& traj, const ObservationConfig& cfg)
{
    const auto& x  = traj.at(traj.grid().nearest_node(rec.t));
    const double n = traj.population();

    auto sampled = [&](double level) {
        const double p = clamp_probability(level / n);
        if (cfg.virulence_family == SamplingFamily::Binomial) {
            return binomial_loglik(rec.count, rec.sample_size, p);
        }
        return poisson_loglik(rec.count, static_cast<double>(rec.sample_size) * p);
    };

    switch (rec.kind) {
    case EvidenceKind::Virulence:
        return sampled(x.i);
    case EvidenceKind::Serology:
        if (traj.kind() != ModelKind::SIRQ) {
            throw ConfigError("serology evidence requires the SIRQ model");
        }
        return sampled(x.r);
    case EvidenceKind::Surveillance: {
        const double level = traj.kind() == ModelKind::SIRQ ? *x.q : x.r;
        if (cfg.surveillance_family == CountFamily::Poisson) {
            return poisson_loglik(rec.count, std::max(level, 0.0));
        }
        return gaussian_loglik(static_cast<double>(rec.count), level, std::max(level, cfg.variance_floor));
    }
    }
    return impossible_log_density;
}

double dataset_loglik(const Dataset& data, const Trajectory& traj, const ObservationConfig& cfg)
{
    double total = 0.0;
    for (const auto& rec : data.records) {
        total += record_loglik(rec, traj, cfg);
    }
    return total;
}

void write_dataset_csv(std::ostream& out, const Dataset& data)
{
    out << "kind,t,m,k\n";
    for (const auto& rec : data.records) {
        out << to_string(rec.kind) << ',' << csv::format_double(rec.t) << ',';
        if (rec.kind != EvidenceKind::Surveillance) {
            out << rec.sample_size;
        }
        out << ',' << rec.count << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in, ModelKind model)
{
    Dataset data;
    data.model = model;
    for (const auto& row : csv::read_table(in, "kind,t,m,k")) {
        EvidenceRecord rec;
        rec.kind = parse_evidence_kind(row[0]);
        rec.t    = csv::parse_double(row[1]);
        if (rec.kind == EvidenceKind::Surveillance) {
            if (!row[2].empty()) {
                throw ParseError("surveillance rows must leave m empty");
            }
        }
        else {
            rec.sample_size = csv::parse_integer(row[2]);
        }
        rec.count = csv::parse_integer(row[3]);
        data.records.push_back(rec);
    }
    return data;
}

} // namespace tvepi
