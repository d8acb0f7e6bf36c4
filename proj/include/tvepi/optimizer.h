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
#ifndef TVEPI_OPTIMIZER_H
#define TVEPI_OPTIMIZER_H

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace tvepi
{

using ObjectiveFunction = std::function<double(std::span<const double>)>;

/// Value substituted for NaN or infinite objective values.
inline constexpr double worst_value = 1e12;

struct NelderMeadConfig {
    double reflection  = 1.0;
    double expansion   = 2.0;
    double contraction = 0.5;
    double shrink      = 0.5;
    std::size_t max_evals = 20000;
    double x_tol          = 1e-8;
    double f_tol          = 1e-8;
    /// Initial simplex edge per coordinate; a single entry applies to every coordinate.
    std::vector<double> initial_step{0.1};

    void validate(std::size_t dimension) const;
};

struct Vertex {
    std::vector<double> point;
    double value       = 0.0;
    std::uint64_t age = 0; ///< insertion stamp, older vertices win ties
};

/// D+1 vertices kept sorted best to worst, ties broken by age.
class Simplex
{
public:
    explicit Simplex(std::vector<Vertex> vertices);

    /// Axis-aligned simplex: vertex j is x0 + step[j] e_j.
    static Simplex axis_aligned(std::span<const double> x0, std::span<const double> step,
                                const ObjectiveFunction& f, std::uint64_t& age);

    std::size_t dimension() const
    {
        return m_vertices.size() - 1;
    }
    const std::vector<Vertex>& vertices() const
    {
        return m_vertices;
    }
    const Vertex& best() const
    {
        return m_vertices.front();
    }
    const Vertex& worst() const
    {
        return m_vertices.back();
    }

    /// Largest max-norm distance from the best vertex.
    double diameter() const;
    /// Value difference between worst and best vertex.
    double spread() const
    {
        return worst().value - best().value;
    }

    /// Mean of all vertices except the worst.
    std::vector<double> centroid() const;

    void replace_worst(Vertex v);
    /// Contract every vertex toward the best one by `factor` and re-evaluate.
    void shrink(double factor, const ObjectiveFunction& f, std::uint64_t& age);

private:
    void sort();
    void recompute_sum();

    std::vector<Vertex> m_vertices;
    std::vector<double> m_sum; ///< coordinate sums over all vertices
    std::size_t m_updates = 0;
};

/**
 * @brief One reflect / expand / contract / shrink move.
 * @return number of objective evaluations used (1 to D + 2).
 */
std::size_t nelder_mead_iteration(Simplex& simplex, const ObjectiveFunction& f, const NelderMeadConfig& cfg,
                                  std::uint64_t& age);

enum class Termination
{
    Converged,
    MaxRestarts,
    MaxEvals,
};

std::string_view to_string(Termination t);

struct TraceEntry {
    std::size_t restart = 0;
    std::size_t evals   = 0; ///< cumulative evaluations at the end of the restart
    double best_value   = 0.0;
};

struct OptResult {
    std::vector<double> point;
    double value            = 0.0;
    std::size_t evals       = 0;
    std::size_t restarts    = 0;
    Termination termination = Termination::MaxEvals;
    std::vector<TraceEntry> trace;
};

/// Called with the initial simplex of every Nelder-Mead run.
using SimplexObserver = std::function<void(const Simplex&)>;

/**
 * @brief Nelder-Mead downhill simplex minimizer started from an axis-aligned simplex at x0.
 *
 * Stops when the simplex diameter is below x_tol and the value spread below f_tol (Converged), or once the
 * evaluation budget is spent (MaxEvals). An iteration in progress may overrun max_evals by at most D + 1.
 */
OptResult nelder_mead(const ObjectiveFunction& f, std::span<const double> x0, const NelderMeadConfig& cfg,
                      const SimplexObserver& observer = {});

struct IteratedConfig {
    std::size_t max_restarts       = 20;
    double restart_improvement_tol = 1e-6;
    NelderMeadConfig inner;
    /// Edge of the simplex rebuilt at each restart. Empty: reuse inner.initial_step.
    std::vector<double> restart_step;

    void validate(std::size_t dimension) const;
};

/**
 * @brief Iterated Nelder-Mead: rerun Nelder-Mead from the last local optimum inside a freshly inflated
 * simplex until a rerun improves the best value by less than restart_improvement_tol, or max_restarts
 * runs have been made. The trace has one entry per run.
 */
OptResult iterated_nelder_mead(const ObjectiveFunction& f, std::span<const double> x0, const IteratedConfig& cfg,
                               const SimplexObserver& observer = {});

/// Independent iterated runs, one per start, evaluated on up to `threads` workers (0 = hardware).
std::vector<OptResult> run_starts(const ObjectiveFunction& f, std::span<const std::vector<double>> starts,
                                  const IteratedConfig& cfg, unsigned threads = 0);

/// Best of run_starts, ties resolved toward the lower start index.
OptResult multi_start(const ObjectiveFunction& f, std::span<const std::vector<double>> starts,
                      const IteratedConfig& cfg, unsigned threads = 0);

/// Index of the best result: minimum value, lowest index on ties.
std::size_t best_index(std::span<const OptResult> results);

/// `restart,eval,best_value`
void write_trace_csv(std::ostream& out, std::span<const TraceEntry> trace);

} // namespace tvepi

#endif // TVEPI_OPTIMIZER_H
