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
#ifndef TVEPI_RECOVERY_H
#define TVEPI_RECOVERY_H

#include <cstddef>
#include <span>
#include <vector>

namespace tvepi
{

/// Step-path recovery of one time-varying parameter.
struct StepRecovery {
    std::vector<std::size_t> truth_changes;
    std::vector<std::size_t> estimated_changes;
    std::vector<std::size_t> location_errors; ///< grid steps, one per truth change point
    std::vector<double> truth_levels;
    std::vector<double> estimated_levels;
    std::vector<double> level_errors; ///< relative, one per plateau

    std::size_t max_location_error() const;
    double max_level_error() const;
};

/// Indices k > 0 where the path value changes.
std::vector<std::size_t> change_points(std::span<const double> path);

/**
 * @brief Compare an estimated path against a piecewise-constant truth.
 *
 * Each truth change point is located in the estimate by the best two-level least-squares split of the
 * estimate between the neighbouring truth change points. Each plateau level is estimated by the median of the
 * estimate over the plateau with `margin` steps trimmed at inner boundaries (untrimmed if that leaves nothing).
 */
StepRecovery assess_step_recovery(std::span<const double> truth, std::span<const double> estimate,
                                  std::size_t margin = 5);

double relative_error(double estimate, double truth);

} // namespace tvepi

#endif // TVEPI_RECOVERY_H
