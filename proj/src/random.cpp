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
#include "tvepi/random.h"
#include "tvepi/errors.h"

#include <cmath>

namespace tvepi
{

std::int64_t sample_binomial(CounterRng& rng, std::int64_t m, double p)
{
    if (m < 0 || !(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial sampling needs m >= 0 and p in [0, 1]");
    }
    std::int64_t k = 0;
    for (std::int64_t j = 0; j < m; ++j) {
        if (rng.uniform() < p) {
            ++k;
        }
    }
    return k;
}

std::int64_t sample_poisson(CounterRng& rng, double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("Poisson sampling needs a finite non-negative mean");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 10.0) {
        const double u = rng.uniform();
        std::int64_t k = 0;
        double p       = std::exp(-mean);
        double cdf     = p;
        while (u > cdf && p > 0.0) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    const double slam     = std::sqrt(mean);
    const double loglam   = std::log(mean);
    const double b        = 0.931 + 2.53 * slam;
    const double a        = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr       = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u  = rng.uniform() - 0.5;
        const double v  = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k  = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::int64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(k);
        }
    }
}

} // namespace tvepi
