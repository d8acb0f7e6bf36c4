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
#ifndef TVEPI_ERRORS_H
#define TVEPI_ERRORS_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvepi
{

/// Wrong number of parameters for the model variant.
class ArityError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (k > m, zero denominators, ...).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Inconsistent model / data / objective setup.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter value not representable under its transform.
class EncodingError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file.
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite state.
class IntegrationError : public std::runtime_error
{
public:
    explicit IntegrationError(std::size_t step)
        : std::runtime_error("integration overflow at grid step " + std::to_string(step))
        , m_step(step)
    {
    }

    std::size_t step() const
    {
        return m_step;
    }

private:
    std::size_t m_step;
};

} // namespace tvepi

#endif // TVEPI_ERRORS_H
