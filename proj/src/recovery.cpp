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
#include "tvepi/recovery.h"
#include "tvepi/errors.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvepi
{

std::size_t StepRecovery::max_location_error() const
{
    return location_errors.empty() ? 0 : *std::max_element(location_errors.begin(), location_errors.end());
}

double StepRecovery::max_level_error() const
{
    return level_errors.empty() ? 0.0 : *std::max_element(level_errors.begin(), level_errors.end());
}

std::vector<std::size_t> change_points(std::span<const double> path)
{
    std::vector<std::size_t> changes;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path[k] != path[k - 1]) {
            changes.push_back(k);
        }
    }
    return changes;
}

double relative_error(double estimate, double truth)
{
    return std::abs(estimate - truth) / std::abs(truth);
}

namespace
{

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// split s in (lo, hi) minimizing the squared error of a two-level fit of x[lo, hi)
std::size_t best_split(std::span<const double> x, std::size_t lo, std::size_t hi)
{
    std::vector<double> prefix(hi - lo + 1, 0.0), prefix_sq(hi - lo + 1, 0.0);
    for (std::size_t k = lo; k < hi; ++k) {
        prefix[k - lo + 1]    = prefix[k - lo] + x[k];
        prefix_sq[k - lo + 1] = prefix_sq[k - lo] + x[k] * x[k];
    }
    auto sse = [&](std::size_t a, std::size_t b) {
        const double n   = static_cast<double>(b - a);
        const double sum = prefix[b - lo] - prefix[a - lo];
        return prefix_sq[b - lo] - prefix_sq[a - lo] - sum * sum / n;
    };
    std::size_t best = lo + 1;
    double best_sse  = std::numeric_limits<double>::infinity();
    for (std::size_t s = lo + 1; s < hi; ++s) {
        const double e = sse(lo, s) + sse(s, hi);
        if (e < best_sse) {
            best_sse = e;
            best     = s;
        }
    }
    return best;
}

} // namespace

StepRecovery assess_step_recovery(std::span<const double> truth, std::span<const double> estimate,
                                  std::size_t margin)
{
    if (truth.size() != estimate.size() || truth.empty()) {
        throw ConfigError("truth and estimate must be non-empty and of equal length");
    }
    const std::size_t n = truth.size();
    StepRecovery rec;
    rec.truth_changes = change_points(truth);

    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), rec.truth_changes.begin(), rec.truth_changes.end());
    bounds.push_back(n);

    for (std::size_t c = 0; c < rec.truth_changes.size(); ++c) {
        // search between the midpoints to the neighbouring truth changes
        const std::size_t lo = c == 0 ? 0 : (bounds[c] + bounds[c + 1]) / 2;
        const std::size_t hi = c + 1 == rec.truth_changes.size() ? n : (bounds[c + 1] + bounds[c + 2] + 1) / 2;
        const std::size_t s  = best_split(estimate, lo, hi);
        const std::size_t t  = rec.truth_changes[c];
        rec.estimated_changes.push_back(s);
        rec.location_errors.push_back(s > t ? s - t : t - s);
    }

    for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
        std::size_t a = bounds[p], b = bounds[p + 1];
        std::size_t ta = p > 0 ? a + margin : a;
        std::size_t tb = p + 2 < bounds.size() ? (b > margin ? b - margin : 0) : b;
        if (ta >= tb) {
            ta = a;
            tb = b;
        }
        std::vector<double> segment(estimate.begin() + static_cast<std::ptrdiff_t>(ta),
                                    estimate.begin() + static_cast<std::ptrdiff_t>(tb));
        const double level = median(segment);
        rec.truth_levels.push_back(truth[a]);
        rec.estimated_levels.push_back(level);
        rec.level_errors.push_back(relative_error(level, truth[a]));
    }
    return rec;
}

} // namespace tvepi
