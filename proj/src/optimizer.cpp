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
#include "tvepi/optimizer.h"
#include "tvepi/csv.h"
#include "tvepi/errors.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

namespace tvepi
{

namespace
{

double safe_eval(const ObjectiveFunction& f, std::span<const double> x)
{
    double v = f(x);
    return std::isfinite(v) ? v : worst_value;
}

std::vector<double> expand_step(std::span<const double> step, std::size_t dimension)
{
    if (step.size() == 1) {
        return std::vector<double>(dimension, step.front());
    }
    return std::vector<double>(step.begin(), step.end());
}

void check_steps(std::span<const double> step, std::size_t dimension, const char* what)
{
    if (step.size() != 1 && step.size() != dimension) {
        throw ConfigError(std::string(what) + " must have 1 or " + std::to_string(dimension) + " entries");
    }
    for (double s : step) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw ConfigError(std::string(what) + " entries must be positive");
        }
    }
}

} // namespace

void NelderMeadConfig::validate(std::size_t dimension) const
{
    if (dimension == 0) {
        throw ConfigError("Nelder-Mead needs at least one dimension");
    }
    if (!(reflection > 0.0)) {
        throw ConfigError("reflection coefficient must be positive");
    }
    if (!(expansion > std::max(1.0, reflection))) {
        throw ConfigError("expansion coefficient must exceed max(1, reflection)");
    }
    if (!(contraction > 0.0 && contraction < 1.0)) {
        throw ConfigError("contraction coefficient must lie in (0, 1)");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) {
        throw ConfigError("shrink coefficient must lie in (0, 1)");
    }
    if (max_evals == 0 || !(x_tol > 0.0) || !(f_tol > 0.0)) {
        throw ConfigError("Nelder-Mead budget and tolerances must be positive");
    }
    check_steps(initial_step, dimension, "initial_step");
}

Simplex::Simplex(std::vector<Vertex> vertices)
    : m_vertices(std::move(vertices))
{
    if (m_vertices.size() < 2) {
        throw ConfigError("a simplex needs at least two vertices");
    }
    sort();
    recompute_sum();
}

void Simplex::recompute_sum()
{
    m_sum.assign(m_vertices.front().point.size(), 0.0);
    for (const auto& v : m_vertices) {
        for (std::size_t i = 0; i < m_sum.size(); ++i) {
            m_sum[i] += v.point[i];
        }
    }
    m_updates = 0;
}

std::vector<double> Simplex::centroid() const
{
    const auto& worst = m_vertices.back().point;
    const double d    = static_cast<double>(dimension());
    std::vector<double> c(m_sum.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = (m_sum[i] - worst[i]) / d;
    }
    return c;
}

Simplex Simplex::axis_aligned(std::span<const double> x0, std::span<const double> step, const ObjectiveFunction& f,
                              std::uint64_t& age)
{
    const auto d = x0.size();
    auto edges   = expand_step(step, d);
    std::vector<Vertex> vertices;
    vertices.reserve(d + 1);
    std::vector<double> base(x0.begin(), x0.end());
    vertices.push_back({base, safe_eval(f, base), age++});
    for (std::size_t j = 0; j < d; ++j) {
        auto p = base;
        p[j] += edges[j];
        double v = safe_eval(f, p);
        vertices.push_back({std::move(p), v, age++});
    }
    return Simplex(std::move(vertices));
}

double Simplex::diameter() const
{
    double diam      = 0.0;
    const auto& best = m_vertices.front().point;
    for (std::size_t j = 1; j < m_vertices.size(); ++j) {
        const auto& p = m_vertices[j].point;
        for (std::size_t i = 0; i < p.size(); ++i) {
            diam = std::max(diam, std::abs(p[i] - best[i]));
        }
    }
    return diam;
}

void Simplex::sort()
{
    std::sort(m_vertices.begin(), m_vertices.end(), [](const Vertex& a, const Vertex& b) {
        return a.value < b.value || (a.value == b.value && a.age < b.age);
    });
}

void Simplex::replace_worst(Vertex v)
{
    auto& old = m_vertices.back().point;
    for (std::size_t i = 0; i < m_sum.size(); ++i) {
        m_sum[i] += v.point[i] - old[i];
    }
    m_vertices.back() = std::move(v);
    // bound the round-off drift of the running sums
    if (++m_updates > 16 * m_vertices.size()) {
        recompute_sum();
    }
    // single insertion pass, the rest is already ordered
    for (std::size_t j = m_vertices.size() - 1; j > 0; --j) {
        auto& a = m_vertices[j - 1];
        auto& b = m_vertices[j];
        if (b.value < a.value || (b.value == a.value && b.age < a.age)) {
            std::swap(a, b);
        }
        else {
            break;
        }
    }
}

void Simplex::shrink(double factor, const ObjectiveFunction& f, std::uint64_t& age)
{
    const auto best = m_vertices.front().point;
    for (std::size_t j = 1; j < m_vertices.size(); ++j) {
        auto& p = m_vertices[j].point;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = best[i] + factor * (p[i] - best[i]);
        }
        m_vertices[j].value = safe_eval(f, p);
        m_vertices[j].age   = age++;
    }
    sort();
    recompute_sum();
}

std::size_t nelder_mead_iteration(Simplex& simplex, const ObjectiveFunction& f, const NelderMeadConfig& cfg,
                                  std::uint64_t& age)
{
    const auto d           = simplex.dimension();
    const auto& vertices   = simplex.vertices();
    const Vertex& worst    = vertices.back();
    const double f_best    = vertices.front().value;
    const double f_second  = vertices[d - 1].value;
    const double f_worst   = worst.value;

    const auto centroid = simplex.centroid();

    // centroid + coef * (centroid - worst)
    auto along = [&](double coef) {
        std::vector<double> p(d);
        for (std::size_t i = 0; i < d; ++i) {
            p[i] = centroid[i] + coef * (centroid[i] - worst.point[i]);
        }
        return p;
    };

    std::size_t evals = 0;
    auto reflected    = along(cfg.reflection);
    const double f_r  = safe_eval(f, reflected);
    ++evals;

    if (f_r < f_best) {
        auto expanded    = along(cfg.reflection * cfg.expansion);
        const double f_e = safe_eval(f, expanded);
        ++evals;
        if (f_e < f_r) {
            simplex.replace_worst({std::move(expanded), f_e, age++});
        }
        else {
            simplex.replace_worst({std::move(reflected), f_r, age++});
        }
        return evals;
    }
    if (f_r < f_second) {
        simplex.replace_worst({std::move(reflected), f_r, age++});
        return evals;
    }
    if (f_r < f_worst) {
        auto outside     = along(cfg.reflection * cfg.contraction);
        const double f_c = safe_eval(f, outside);
        ++evals;
        if (f_c <= f_r) {
            simplex.replace_worst({std::move(outside), f_c, age++});
            return evals;
        }
    }
    else {
        auto inside      = along(-cfg.contraction);
        const double f_c = safe_eval(f, inside);
        ++evals;
        if (f_c < f_worst) {
            simplex.replace_worst({std::move(inside), f_c, age++});
            return evals;
        }
    }
    simplex.shrink(cfg.shrink, f, age);
    return evals + d;
}

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::Converged:
        return "converged";
    case Termination::MaxRestarts:
        return "max_restarts";
    case Termination::MaxEvals:
        return "max_evals";
    }
    return "?";
}

OptResult nelder_mead(const ObjectiveFunction& f, std::span<const double> x0, const NelderMeadConfig& cfg,
                      const SimplexObserver& observer)
{
    cfg.validate(x0.size());
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw ConfigError("Nelder-Mead start point must be finite");
        }
    }
    std::uint64_t age = 0;
    auto simplex      = Simplex::axis_aligned(x0, cfg.initial_step, f, age);
    if (observer) {
        observer(simplex);
    }
    std::size_t evals = x0.size() + 1;

    OptResult result;
    while (true) {
        if (simplex.spread() < cfg.f_tol && simplex.diameter() < cfg.x_tol) {
            result.termination = Termination::Converged;
            break;
        }
        if (evals >= cfg.max_evals) {
            result.termination = Termination::MaxEvals;
            break;
        }
        evals += nelder_mead_iteration(simplex, f, cfg, age);
    }
    result.point    = simplex.best().point;
    result.value    = simplex.best().value;
    result.evals    = evals;
    result.restarts = 1;
    result.trace.push_back({0, evals, result.value});
    return result;
}

void IteratedConfig::validate(std::size_t dimension) const
{
    if (max_restarts == 0) {
        throw ConfigError("max_restarts must be at least 1");
    }
    if (!(restart_improvement_tol > 0.0)) {
        throw ConfigError("restart_improvement_tol must be positive");
    }
    inner.validate(dimension);
    if (!restart_step.empty()) {
        check_steps(restart_step, dimension, "restart_step");
    }
}

OptResult iterated_nelder_mead(const ObjectiveFunction& f, std::span<const double> x0, const IteratedConfig& cfg,
                               const SimplexObserver& observer)
{
    cfg.validate(x0.size());
    NelderMeadConfig run_cfg = cfg.inner;

    OptResult best;
    best.point.assign(x0.begin(), x0.end());
    best.termination = Termination::MaxRestarts;
    double previous  = 0.0;

    for (std::size_t restart = 0; restart < cfg.max_restarts; ++restart) {
        if (restart == 1 && !cfg.restart_step.empty()) {
            run_cfg.initial_step = cfg.restart_step;
        }
        auto run = nelder_mead(f, best.point, run_cfg, observer);
        best.evals += run.evals;
        best.restarts = restart + 1;
        if (restart == 0 || run.value < best.value) {
            best.point = std::move(run.point);
            best.value = run.value;
        }
        best.trace.push_back({restart, best.evals, best.value});

        if (restart > 0 && previous - best.value < cfg.restart_improvement_tol) {
            best.termination = Termination::Converged;
            break;
        }
        best.termination = run.termination == Termination::MaxEvals ? Termination::MaxEvals
                                                                      : Termination::MaxRestarts;
        previous = best.value;
    }
    return best;
}

std::vector<OptResult> run_starts(const ObjectiveFunction& f, std::span<const std::vector<double>> starts,
                                  const IteratedConfig& cfg, unsigned threads)
{
    if (starts.empty()) {
        throw ConfigError("multi-start needs at least one start");
    }
    std::vector<OptResult> results(starts.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(starts.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(starts.size());
    auto worker = [&]() {
        for (auto idx = next++; idx < starts.size(); idx = next++) {
            try {
                results[idx] = iterated_nelder_mead(f, starts[idx], cfg);
            }
            catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    }
    else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

std::size_t best_index(std::span<const OptResult> results)
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < results.size(); ++j) {
        if (results[j].value < results[best].value) {
            best = j;
        }
    }
    return best;
}

OptResult multi_start(const ObjectiveFunction& f, std::span<const std::vector<double>> starts,
                      const IteratedConfig& cfg, unsigned threads)
{
    auto results = run_starts(f, starts, cfg, threads);
    return std::move(results[best_index(results)]);
}

void write_trace_csv(std::ostream& out, std::span<const TraceEntry> trace)
{
    out << "restart,eval,best_value\n";
    for (const auto& e : trace) {
        out << e.restart << ',' << e.evals << ',' << csv::format_double(e.best_value) << '\n';
    }
}

} // namespace tvepi
