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
#ifndef TVEPI_RANDOM_H
#define TVEPI_RANDOM_H

#include <cstdint>

namespace tvepi
{

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * @brief Counter-based random stream keyed by (seed, stream id).
 *
 * Draw n of a stream is a pure function of (seed, stream, n), so records can be generated in any order or
 * in parallel with identical results.
 */
class CounterRng
{
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : m_key(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL)))
    {
    }

    std::uint64_t next_u64()
    {
        return mix64(m_key ^ mix64(m_counter++));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t counter() const
    {
        return m_counter;
    }

private:
    std::uint64_t m_key;
    std::uint64_t m_counter = 0;
};

/// Sum of m Bernoulli(p) draws.
std::int64_t sample_binomial(CounterRng& rng, std::int64_t m, double p);

/// Inversion for small means, Hoermann's PTRS transformed rejection otherwise.
std::int64_t sample_poisson(CounterRng& rng, double mean);

} // namespace tvepi

#endif // TVEPI_RANDOM_H
