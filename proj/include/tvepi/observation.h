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
#ifndef TVEPI_OBSERVATION_H
#define TVEPI_OBSERVATION_H

#include "tvepi/dynamics.h"

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace tvepi
{

/// Log-density returned for outcomes with probability zero. Kept finite so simplex vertices stay ordered.
inline constexpr double impossible_log_density = -1e12;

enum class EvidenceKind
{
    Virulence, ///< sampled people tested for the pathogen, informs I/N
    Surveillance, ///< confirmed case count, informs Q (SIRQ) or R (SIR)
    Serology, ///< sampled people tested for antibodies, informs R/N
};

std::string_view to_string(EvidenceKind kind);
EvidenceKind parse_evidence_kind(std::string_view name);

struct EvidenceRecord {
    EvidenceKind kind = EvidenceKind::Virulence;
    double t          = 0.0;
    std::int64_t sample_size = 0; ///< m, unused for surveillance
    std::int64_t count       = 0; ///< k

    bool operator==(const EvidenceRecord&) const = default;
};

enum class SamplingFamily
{
    Binomial,
    Poisson,
};

enum class CountFamily
{
    Poisson,
    Gaussian,
};

struct ObservationConfig {
    SamplingFamily virulence_family = SamplingFamily::Binomial; ///< also used for serology samples
    CountFamily surveillance_family = CountFamily::Poisson;
    double variance_floor           = 1.0; ///< Gaussian variance is max(level, variance_floor)

    void validate() const;
};

struct Dataset {
    ModelKind model = ModelKind::SIRQ;
    std::vector<EvidenceRecord> records;

    /// Throws ConfigError / DomainError if a record is inconsistent with the model or grid.
    void validate(const TimeGrid& grid) const;

    bool operator==(const Dataset&) const = default;
};

double binomial_loglik(std::int64_t k, std::int64_t m, double p);
double poisson_loglik(std::int64_t k, double mean);
double gaussian_loglik(double y, double mean, double variance);

/// Log-density of one record given the state at the grid node nearest to its time.
double record_loglik(const EvidenceRecord& rec, const Trajectory& traj, const ObservationConfig& cfg);

/// Sum of record log-densities, accumulated in record order.
double dataset_loglik(const Dataset& data, const Trajectory& traj, const ObservationConfig& cfg);

/// `kind,t,m,k`; m is empty for surveillance rows.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in, ModelKind model);

} // namespace tvepi

#endif // TVEPI_OBSERVATION_H
