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
#include "tvepi/fit.h"
#include "tvepi/errors.h"
#include "tvepi/synthesis.h"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tvepi
{

using nlohmann::json;

namespace
{

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    }
    catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ConfigError(std::string("config field '") + key + "' is required");
    }
    return get_or<T>(j, key, T{});
}

std::vector<double> number_or_list(const json& j, const char* key, std::vector<double> fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    const auto& v = j.at(key);
    if (v.is_number()) {
        return {v.get<double>()};
    }
    if (v.is_array()) {
        try {
            return v.get<std::vector<double>>();
        }
        catch (const json::exception& e) {
            throw ConfigError(std::string("config field '") + key + "': " + e.what());
        }
    }
    throw ConfigError(std::string("config field '") + key + "' must be a number or a list");
}

json number_or_list(const std::vector<double>& v)
{
    if (v.size() == 1) {
        return v.front();
    }
    return v;
}

Transform parse_transform(const std::string& s)
{
    if (s == "log") {
        return Transform::Log;
    }
    if (s == "identity") {
        return Transform::Identity;
    }
    throw ConfigError("unknown transform '" + s + "'");
}

RegularizerKind parse_regularizer(const std::string& s)
{
    if (s == "none") {
        return RegularizerKind::None;
    }
    if (s == "tv") {
        return RegularizerKind::TotalVariation;
    }
    if (s == "qv") {
        return RegularizerKind::QuadraticVariation;
    }
    throw ConfigError("unknown regularizer '" + s + "'");
}

std::string regularizer_name(RegularizerKind k)
{
    switch (k) {
    case RegularizerKind::None:
        return "none";
    case RegularizerKind::TotalVariation:
        return "tv";
    case RegularizerKind::QuadraticVariation:
        return "qv";
    }
    return "?";
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    if (p.empty()) {
        return {};
    }
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace

ParameterEncoding FitConfig::encoding() const
{
    std::vector<ParameterSpec> specs;
    for (const auto& p : parameters) {
        specs.push_back(p.spec);
    }
    return ParameterEncoding(std::move(specs), grid.n_steps);
}

RegularizerSpec FitConfig::regularizer() const
{
    RegularizerSpec spec;
    for (const auto& p : parameters) {
        spec.terms.push_back({p.spec.rate, p.regularizer, p.weight});
    }
    return spec;
}

FitConfig FitConfig::with_penalty_weight(double weight) const
{
    FitConfig copy = *this;
    for (auto& p : copy.parameters) {
        if (p.regularizer != RegularizerKind::None) {
            p.weight = weight;
        }
    }
    return copy;
}

FitConfig fit_config_from_json(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    FitConfig cfg;
    cfg.model              = parse_model_kind(require<std::string>(j, "model"));
    cfg.population         = require<double>(j, "population");
    cfg.initial_infectious = require<double>(j, "initial_infectious");
    if (!(cfg.population > 0.0) || !(cfg.initial_infectious >= 0.0) || cfg.initial_infectious > cfg.population) {
        throw ConfigError("need population > 0 and 0 <= initial_infectious <= population");
    }

    const json grid = j.value("grid", json::object());
    cfg.grid.t0                = get_or<double>(grid, "t0", 0.0);
    cfg.grid.horizon           = get_or<double>(grid, "horizon", 100.0);
    cfg.grid.n_steps           = get_or<std::size_t>(grid, "n_steps", 100);
    cfg.grid.substeps_per_step = get_or<std::size_t>(grid, "substeps", 10);
    cfg.grid.validate();

    if (j.contains("parameters")) {
        for (const auto& pj : j.at("parameters")) {
            FitParameter p;
            p.spec.rate         = parse_rate(require<std::string>(pj, "name"));
            p.spec.time_varying = get_or<bool>(pj, "time_varying", false);
            p.spec.transform    = parse_transform(get_or<std::string>(pj, "transform", "log"));
            p.regularizer       = parse_regularizer(get_or<std::string>(pj, "regularizer", "none"));
            p.weight            = get_or<double>(pj, "weight", 0.0);
            cfg.parameters.push_back(p);
        }
    }
    else {
        for (auto rate : model_rates(cfg.model)) {
            cfg.parameters.push_back({{rate, false, Transform::Log}, RegularizerKind::None, 0.0});
        }
    }

    const json obs = j.value("observation", json::object());
    auto vf        = get_or<std::string>(obs, "virulence_family", "binomial");
    auto sf        = get_or<std::string>(obs, "surveillance_family", "poisson");
    if (vf != "binomial" && vf != "poisson") {
        throw ConfigError("virulence_family must be binomial or poisson");
    }
    if (sf != "poisson" && sf != "gaussian") {
        throw ConfigError("surveillance_family must be poisson or gaussian");
    }
    cfg.observation.virulence_family    = vf == "binomial" ? SamplingFamily::Binomial : SamplingFamily::Poisson;
    cfg.observation.surveillance_family = sf == "poisson" ? CountFamily::Poisson : CountFamily::Gaussian;
    cfg.observation.variance_floor      = get_or<double>(obs, "variance_floor", 1.0);
    cfg.observation.validate();

    cfg.dataset       = resolve(base_dir, require<std::string>(j, "dataset"));
    cfg.initial_paths = resolve(base_dir, get_or<std::string>(j, "initial_paths", ""));

    const json opt                          = j.value("optimizer", json::object());
    cfg.optimizer.max_restarts              = get_or<std::size_t>(opt, "max_restarts", 20);
    cfg.optimizer.restart_improvement_tol   = get_or<double>(opt, "restart_improvement_tol", 1e-6);
    cfg.optimizer.inner.max_evals           = get_or<std::size_t>(opt, "max_evals", 20000);
    cfg.optimizer.inner.x_tol               = get_or<double>(opt, "x_tol", 1e-8);
    cfg.optimizer.inner.f_tol               = get_or<double>(opt, "f_tol", 1e-8);
    cfg.optimizer.inner.reflection          = get_or<double>(opt, "reflection", 1.0);
    cfg.optimizer.inner.expansion           = get_or<double>(opt, "expansion", 2.0);
    cfg.optimizer.inner.contraction         = get_or<double>(opt, "contraction", 0.5);
    cfg.optimizer.inner.shrink              = get_or<double>(opt, "shrink", 0.5);
    cfg.optimizer.inner.initial_step        = number_or_list(opt, "initial_step", {0.1});
    cfg.optimizer.restart_step              = number_or_list(opt, "restart_step", {});
    cfg.search.coordinates = parse_search_coordinates(get_or<std::string>(opt, "coordinates", "alternating"));
    cfg.search.block_widths = get_or<std::vector<std::size_t>>(opt, "block_widths", {1});

    cfg.starts  = get_or<std::size_t>(j, "starts", 5);
    cfg.threads = get_or<unsigned>(j, "threads", 0);
    if (cfg.starts == 0) {
        throw ConfigError("starts must be at least 1");
    }

    auto enc = cfg.encoding();
    enc.check_model(cfg.model);
    cfg.regularizer().validate(enc);
    cfg.optimizer.validate(enc.dimension());
    cfg.search.validate(cfg.optimizer);
    return cfg;
}

json to_json(const FitConfig& cfg)
{
    json j;
    j["model"]              = std::string(to_string(cfg.model));
    j["population"]         = cfg.population;
    j["initial_infectious"] = cfg.initial_infectious;
    j["grid"]               = {{"t0", cfg.grid.t0},
                               {"horizon", cfg.grid.horizon},
                               {"n_steps", cfg.grid.n_steps},
                               {"substeps", cfg.grid.substeps_per_step}};
    j["parameters"]         = json::array();
    for (const auto& p : cfg.parameters) {
        j["parameters"].push_back({{"name", std::string(to_string(p.spec.rate))},
                                   {"time_varying", p.spec.time_varying},
                                   {"transform", p.spec.transform == Transform::Log ? "log" : "identity"},
                                   {"regularizer", regularizer_name(p.regularizer)},
                                   {"weight", p.weight}});
    }
    j["observation"] = {
        {"virulence_family",
         cfg.observation.virulence_family == SamplingFamily::Binomial ? "binomial" : "poisson"},
        {"surveillance_family", cfg.observation.surveillance_family == CountFamily::Poisson ? "poisson" : "gaussian"},
        {"variance_floor", cfg.observation.variance_floor}};
    j["dataset"] = cfg.dataset.generic_string();
    if (!cfg.initial_paths.empty()) {
        j["initial_paths"] = cfg.initial_paths.generic_string();
    }
    const auto& o    = cfg.optimizer;
    j["optimizer"]   = {{"max_restarts", o.max_restarts},
                        {"restart_improvement_tol", o.restart_improvement_tol},
                        {"max_evals", o.inner.max_evals},
                        {"x_tol", o.inner.x_tol},
                        {"f_tol", o.inner.f_tol},
                        {"reflection", o.inner.reflection},
                        {"expansion", o.inner.expansion},
                        {"contraction", o.inner.contraction},
                        {"shrink", o.inner.shrink},
                        {"initial_step", number_or_list(o.inner.initial_step)},
                        {"coordinates", std::string(to_string(cfg.search.coordinates))},
                        {"block_widths", cfg.search.block_widths}};
    if (!o.restart_step.empty()) {
        j["optimizer"]["restart_step"] = number_or_list(o.restart_step);
    }
    j["starts"] = cfg.starts;
    if (cfg.threads != 0) {
        j["threads"] = cfg.threads;
    }
    return j;
}

FitConfig load_fit_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot read config " + file.string());
    }
    json j;
    try {
        in >> j;
    }
    catch (const json::exception& e) {
        throw ConfigError("malformed config " + file.string() + ": " + e.what());
    }
    return fit_config_from_json(j, file.parent_path());
}

Objective make_objective(const FitConfig& cfg, Dataset data)
{
    data.model = cfg.model;
    return Objective(cfg.model, initial_state(cfg.model, cfg.population, cfg.initial_infectious), cfg.grid,
                     std::move(data), cfg.observation, cfg.encoding(), cfg.regularizer());
}

std::vector<ParameterPath> crude_rates(const Objective& objective)
{
    const auto& init = objective.initial();
    const double n   = init.total();
    const double t0  = objective.grid().t0;

    double growth = 0.1;
    for (const auto& rec : objective.data().records) {
        if (rec.kind == EvidenceKind::Virulence && rec.count > 0 && rec.t > t0 && init.i > 0.0) {
            const double prevalence = static_cast<double>(rec.count) / static_cast<double>(rec.sample_size);
            growth                  = std::log(prevalence * n / init.i) / (rec.t - t0);
            break;
        }
    }
    growth = std::clamp(growth, 0.02, 0.5);

    if (objective.kind() == ModelKind::SIR) {
        const double gamma = 0.1;
        return {{Rate::Beta, {growth + gamma}}, {Rate::Gamma, {gamma}}};
    }
    const double gamma = 0.05, delta = 0.05;
    return {{Rate::Beta, {growth + gamma + delta}}, {Rate::Gamma, {gamma}}, {Rate::Delta, {delta}}};
}

std::vector<ParameterPath> shape_for_encoding(const ParameterEncoding& encoding, std::span<const ParameterPath> paths)
{
    std::vector<ParameterPath> shaped;
    for (const auto& spec : encoding.specs()) {
        const auto& src = find_path(paths, spec.rate);
        ParameterPath p{spec.rate, {}};
        if (spec.time_varying) {
            p.values.resize(encoding.n_steps());
            for (std::size_t k = 0; k < encoding.n_steps(); ++k) {
                p.values[k] = src.at(k);
            }
        }
        else {
            p.values = {src.values.front()};
        }
        shaped.push_back(std::move(p));
    }
    return shaped;
}

std::vector<std::vector<double>> perturbed_starts(const ParameterEncoding& encoding,
                                                  std::span<const ParameterPath> base, std::size_t count)
{
    auto shaped = shape_for_encoding(encoding, base);
    std::vector<std::vector<double>> starts;
    starts.push_back(encoding.encode(shaped));
    for (std::size_t j = 1; j < count; ++j) {
        auto copy = shaped;
        for (std::size_t p = 0; p < copy.size(); ++p) {
            const double sign = ((j >> p) & 1U) ? 1.0 : -1.0;
            // cycle the amplitude so that starts beyond the first 2^P stay distinct
            const double amp = 0.25 * static_cast<double>(1 + (j - 1) / 4);
            for (auto& v : copy[p].values) {
                v *= std::exp(sign * amp);
            }
        }
        starts.push_back(encoding.encode(copy));
    }
    return starts;
}

std::string_view to_string(SearchCoordinates coords)
{
    switch (coords) {
    case SearchCoordinates::Values:
        return "values";
    case SearchCoordinates::Increments:
        return "increments";
    case SearchCoordinates::Alternating:
        return "alternating";
    }
    return "?";
}

SearchCoordinates parse_search_coordinates(std::string_view name)
{
    for (auto c : {SearchCoordinates::Values, SearchCoordinates::Increments, SearchCoordinates::Alternating}) {
        if (name == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("optimizer.coordinates must be values, increments or alternating");
}

namespace
{

// (offset, length) of every parameter block in a flat vector
using Blocks = std::vector<std::pair<std::size_t, std::size_t>>;

Blocks blocks_of(const ParameterEncoding& encoding, std::size_t width)
{
    Blocks blocks;
    std::size_t off = 0;
    for (std::size_t p = 0; p < encoding.specs().size(); ++p) {
        const auto len = (encoding.length(p) + width - 1) / width;
        blocks.emplace_back(off, len);
        off += len;
    }
    return blocks;
}

std::vector<double> to_search(const Blocks& blocks, SearchCoordinates coords, std::span<const double> x)
{
    std::vector<double> z(x.begin(), x.end());
    if (coords != SearchCoordinates::Values) {
        for (const auto& [off, len] : blocks) {
            for (std::size_t k = len; k-- > 1;) {
                z[off + k] = x[off + k] - x[off + k - 1];
            }
        }
    }
    return z;
}

std::vector<double> from_search(const Blocks& blocks, SearchCoordinates coords, std::span<const double> z)
{
    std::vector<double> x(z.begin(), z.end());
    if (coords != SearchCoordinates::Values) {
        for (const auto& [off, len] : blocks) {
            for (std::size_t k = 1; k < len; ++k) {
                x[off + k] = x[off + k - 1] + z[off + k];
            }
        }
    }
    return x;
}

// Maps between encoded points and their block-constant coarse versions.
class Resolution
{
public:
    Resolution(const ParameterEncoding& encoding, std::size_t width)
        : m_blocks(blocks_of(encoding, width))
    {
        for (std::size_t p = 0; p < encoding.specs().size(); ++p) {
            for (std::size_t k = 0; k < encoding.length(p); ++k) {
                m_coarse_of.push_back(m_blocks[p].first + k / width);
            }
        }
        m_members.assign(m_blocks.empty() ? 0 : m_blocks.back().first + m_blocks.back().second, 0);
        for (auto c : m_coarse_of) {
            ++m_members[c];
        }
    }

    const Blocks& blocks() const
    {
        return m_blocks;
    }

    std::vector<double> expand(std::span<const double> coarse) const
    {
        std::vector<double> x(m_coarse_of.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = coarse[m_coarse_of[i]];
        }
        return x;
    }

    std::vector<double> restrict(std::span<const double> x) const
    {
        std::vector<double> coarse(m_members.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            coarse[m_coarse_of[i]] += x[i];
        }
        for (std::size_t c = 0; c < coarse.size(); ++c) {
            coarse[c] /= static_cast<double>(m_members[c]);
        }
        return coarse;
    }

private:
    Blocks m_blocks;
    std::vector<std::size_t> m_coarse_of;
    std::vector<std::size_t> m_members;
};

bool has_time_varying_block(const ParameterEncoding& encoding)
{
    for (std::size_t p = 0; p < encoding.specs().size(); ++p) {
        if (encoding.length(p) > 1) {
            return true;
        }
    }
    return false;
}

// One multi-start round at one resolution and in one coordinate system; points come back encoded.
std::vector<OptResult> search_round(const Objective& objective, const Resolution& res,
                                    std::span<const std::vector<double>> starts, const IteratedConfig& optimizer,
                                    unsigned threads, SearchCoordinates coords)
{
    ObjectiveFunction f = [&objective, &res, coords](std::span<const double> z) {
        return objective(res.expand(from_search(res.blocks(), coords, z)));
    };
    std::vector<std::vector<double>> search_starts;
    for (const auto& x : starts) {
        search_starts.push_back(to_search(res.blocks(), coords, res.restrict(x)));
    }
    auto per_start = run_starts(f, search_starts, optimizer, threads);
    for (auto& r : per_start) {
        r.point = res.expand(from_search(res.blocks(), coords, r.point));
    }
    return per_start;
}

// Appends a follow-up run to `cur`, keeping the better point.
void absorb(OptResult& cur, OptResult next)
{
    for (auto e : next.trace) {
        e.restart += cur.restarts;
        e.evals += cur.evals;
        e.best_value = std::min(e.best_value, cur.value);
        cur.trace.push_back(e);
    }
    cur.evals += next.evals;
    cur.restarts += next.restarts;
    cur.termination = next.termination;
    if (next.value < cur.value) {
        cur.point = std::move(next.point);
        cur.value = next.value;
    }
}

std::vector<std::vector<double>> points_of(const std::vector<OptResult>& results)
{
    std::vector<std::vector<double>> points;
    for (const auto& r : results) {
        points.push_back(r.point);
    }
    return points;
}

} // namespace

std::vector<double> to_search(const ParameterEncoding& encoding, SearchCoordinates coords, std::span<const double> x)
{
    return to_search(blocks_of(encoding, 1), coords, x);
}

std::vector<double> from_search(const ParameterEncoding& encoding, SearchCoordinates coords,
                                std::span<const double> z)
{
    return from_search(blocks_of(encoding, 1), coords, z);
}

std::vector<double> coarsen(const ParameterEncoding& encoding, std::size_t width, std::span<const double> x)
{
    if (width == 0) {
        throw ConfigError("block width must be at least 1");
    }
    Resolution res(encoding, width);
    return res.expand(res.restrict(x));
}

void SearchPlan::validate(const IteratedConfig& optimizer) const
{
    if (block_widths.empty() || block_widths.back() != 1) {
        throw ConfigError("optimizer.block_widths must end at 1");
    }
    for (std::size_t i = 0; i < block_widths.size(); ++i) {
        if (block_widths[i] == 0 || (i > 0 && !(block_widths[i] < block_widths[i - 1]))) {
            throw ConfigError("optimizer.block_widths must be positive and strictly decreasing");
        }
    }
    if (block_widths.size() > 1 && (optimizer.inner.initial_step.size() > 1 || optimizer.restart_step.size() > 1)) {
        throw ConfigError("coarse-to-fine search needs scalar simplex steps");
    }
}

FitOutcome run_fit(const Objective& objective, std::span<const std::vector<double>> starts,
                   const IteratedConfig& optimizer, unsigned threads, const SearchPlan& plan)
{
    plan.validate(optimizer);
    const auto& enc      = objective.encoding();
    const bool varying   = has_time_varying_block(enc);
    const bool alternate = plan.coordinates == SearchCoordinates::Alternating && varying;
    const auto first     = alternate ? SearchCoordinates::Increments : plan.coordinates;

    std::vector<OptResult> per_start;
    for (std::size_t width : plan.block_widths) {
        if (width > 1 && !varying) {
            continue;
        }
        const Resolution res(enc, width);
        auto level = search_round(objective, res, per_start.empty() ? starts : points_of(per_start), optimizer,
                                  threads, first);
        if (alternate) {
            auto coords = SearchCoordinates::Values;
            for (std::size_t round = 1; round < max_alternations; ++round) {
                auto next     = search_round(objective, res, points_of(level), optimizer, threads, coords);
                bool improved = false;
                for (std::size_t i = 0; i < level.size(); ++i) {
                    improved |= level[i].value - next[i].value >= optimizer.restart_improvement_tol;
                    absorb(level[i], std::move(next[i]));
                }
                if (!improved) {
                    break;
                }
                coords = coords == SearchCoordinates::Values ? SearchCoordinates::Increments
                                                             : SearchCoordinates::Values;
            }
        }
        if (per_start.empty()) {
            per_start = std::move(level);
        }
        else {
            for (std::size_t i = 0; i < level.size(); ++i) {
                absorb(per_start[i], std::move(level[i]));
            }
        }
    }
    auto best       = best_index(per_start);
    auto result     = per_start[best];
    auto paths      = objective.encoding().decode(result.point);
    auto trajectory = integrate(objective.kind(), objective.initial(), paths, objective.grid());
    auto parts      = objective.evaluate(result.point);
    bool under      = objective.data().records.empty();
    return FitOutcome{std::move(result), std::move(per_start), best, parts, std::move(paths), std::move(trajectory),
                      under};
}

json fit_report(const Objective& objective, const FitOutcome& fit)
{
    json report;
    report["loss"]             = fit.result.value;
    report["neg_loglik"]       = fit.parts.neg_loglik;
    report["penalty"]          = fit.parts.penalty;
    report["evals"]            = fit.result.evals;
    report["restarts"]         = fit.result.restarts;
    report["termination"]      = std::string(to_string(fit.result.termination));
    report["warning"]          = fit.result.termination == Termination::MaxEvals
                                     ? json("evaluation budget exhausted before convergence")
                                     : json(nullptr);
    report["under_determined"] = fit.under_determined;
    report["best_start"]       = fit.best_start;
    json losses                = json::array();
    for (const auto& r : fit.per_start) {
        losses.push_back(r.value);
    }
    report["start_losses"] = losses;

    json estimates;
    for (const auto& p : fit.paths) {
        estimates[std::string(to_string(p.rate))] = p.is_constant() ? json(p.values.front()) : json(p.values);
    }
    report["estimates"] = estimates;
    report["total_variation"] = path_total_variation(fit.paths);

    const auto kind  = objective.kind();
    const auto steps = objective.grid().n_steps;
    std::vector<double> r0_unc(steps), r0_ctl;
    for (std::size_t k = 0; k < steps; ++k) {
        const double b = find_path(fit.paths, Rate::Beta).at(k);
        const double g = find_path(fit.paths, Rate::Gamma).at(k);
        r0_unc[k]      = g > 0.0 ? basic_reproduction_number(kind, b, g, std::nullopt, false) : 0.0;
        if (kind == ModelKind::SIRQ) {
            const double d = find_path(fit.paths, Rate::Delta).at(k);
            r0_ctl.push_back(g + d > 0.0 ? basic_reproduction_number(kind, b, g, d, true) : 0.0);
        }
    }
    bool varying = std::any_of(fit.paths.begin(), fit.paths.end(), [](const auto& p) {
        return !p.is_constant();
    });
    json r0;
    r0["uncontrolled"] = varying ? json(r0_unc) : json(r0_unc.front());
    if (kind == ModelKind::SIRQ) {
        r0["controlled"] = varying ? json(r0_ctl) : json(r0_ctl.front());
    }
    report["r0"] = r0;
    return report;
}

void write_fit_outputs(const std::filesystem::path& dir, const Objective& objective, const FitOutcome& fit)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        return out;
    };
    {
        auto out = open("fitted_paths.csv");
        write_paths_csv(out, objective.kind(), objective.grid(), fit.paths);
    }
    {
        auto out = open("fitted_trajectory.csv");
        write_trajectory_csv(out, fit.trajectory);
    }
    {
        auto out = open("trace.csv");
        write_trace_csv(out, fit.result.trace);
    }
    {
        auto out = open("report.json");
        out << fit_report(objective, fit).dump(2) << '\n';
    }
}

} // namespace tvepi
