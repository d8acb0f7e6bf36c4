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
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include "tvepi/commands.h"
#include "tvepi/csv.h"
#include "tvepi/dynamics.h"
#include "tvepi/objective.h"
#include "tvepi/observation.h"
#include "tvepi/optimizer.h"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tvepi;
using json = nlohmann::json;

namespace
{

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        notes.push_back((ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what)
    {
        notes.push_back("info " + what);
    }
};

std::string num(double v)
{
    return csv::format_double(v);
}

std::string slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the command line front end, returns the exit code and the wall time in seconds.
std::pair<int, double> cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "tvepi");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const auto begin = std::chrono::steady_clock::now();
    const int code   = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - begin;
    std::cout << out.str() << err.str();
    return {code, elapsed.count()};
}

Outcome reproduce(const fs::path& work, const std::string& experiment, double limit_seconds)
{
    Outcome o;
    const auto dir        = work / experiment;
    const auto [code, dt] = cli({"reproduce", experiment, "--out", dir.string()});
    o.check(code == exit_ok, "exit code " + std::to_string(code));
    if (code != exit_ok) {
        return o;
    }
    const auto verdict = json::parse(slurp(dir / "verdict.json"));
    for (const auto& c : verdict["checks"]) {
        o.check(c["pass"].get<bool>(), c["check"].get<std::string>() + " = " + num(c["value"].get<double>()) +
                                           " (limit " + num(c["limit"].get<double>()) + ")");
    }
    o.check(dt < limit_seconds, "runtime " + num(std::round(dt * 10) / 10) + " s (limit " + num(limit_seconds) + " s)");
    return o;
}

Outcome conservation()
{
    Outcome o;
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_int_distribution<int> pieces(1, 6);
    const TimeGrid grid{0, 100, 100, 10};
    const double n = 100000;
    for (auto kind : {ModelKind::SIR, ModelKind::SIRQ}) {
        double worst_drift = 0.0;
        std::size_t non_monotone = 0;
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<ParameterPath> paths;
            for (auto r : model_rates(kind)) {
                // piecewise-constant random path with random breakpoints
                std::vector<double> levels(static_cast<std::size_t>(pieces(gen)));
                for (auto& v : levels) {
                    v = rate(gen);
                }
                ParameterPath p{r, std::vector<double>(grid.n_steps)};
                for (std::size_t k = 0; k < grid.n_steps; ++k) {
                    p.values[k] = levels[k * levels.size() / grid.n_steps];
                }
                paths.push_back(p);
            }
            auto traj = integrate(kind, initial_state(kind, n, 10.0 + rep), paths, grid);
            for (std::size_t k = 0; k < traj.states().size(); ++k) {
                const auto& x = traj.at(k);
                worst_drift   = std::max(worst_drift, std::abs(x.total() - n));
                if (k > 0) {
                    const auto& prev = traj.at(k - 1);
                    non_monotone += x.r < prev.r || x.q.value_or(0.0) < prev.q.value_or(0.0);
                }
            }
        }
        const std::string model(to_string(kind));
        o.check(worst_drift <= 1e-9 * n, model + " max |sum - N| = " + num(worst_drift) + " (limit " + num(1e-9 * n) + ")");
        o.check(non_monotone == 0, model + " steps with R or Q decreasing = " + std::to_string(non_monotone));
    }
    return o;
}

Outcome likelihood_oracles()
{
    Outcome o;
    double binom_err = 0.0;
    for (int m = 0; m <= 12; ++m) {
        for (int j = 0; j <= 20; ++j) {
            double total = 0.0;
            for (int k = 0; k <= m; ++k) {
                const double ll = binomial_loglik(k, m, j / 20.0);
                total += ll == impossible_log_density ? 0.0 : std::exp(ll);
            }
            binom_err = std::max(binom_err, std::abs(total - 1.0));
        }
    }
    o.check(binom_err <= 1e-10, "binomial normalization, m <= 12, max error " + num(binom_err));

    double poisson_err = 0.0;
    for (double mean : {0.1, 1.0, 7.5, 50.0, 400.0, 10000.0}) {
        const auto upper = static_cast<std::int64_t>(mean + 20 * std::sqrt(mean) + 20);
        double total     = 0.0;
        for (std::int64_t k = 0; k <= upper; ++k) {
            total += std::exp(poisson_loglik(k, mean));
        }
        poisson_err = std::max(poisson_err, std::abs(total - 1.0));
    }
    o.check(poisson_err <= 1e-8, "Poisson truncated-sum normalization, max error " + num(poisson_err));

    // both approximations are compared over the central +-2 sd of the reference distribution
    auto max_gap = [](double mean, double sd, double width, const std::function<double(std::int64_t)>& gap) {
        double worst = 0.0;
        const auto lo = static_cast<std::int64_t>(std::ceil(std::max(0.0, mean - width * sd)));
        const auto hi = static_cast<std::int64_t>(std::floor(mean + width * sd));
        for (std::int64_t k = lo; k <= hi; ++k) {
            worst = std::max(worst, std::abs(gap(k)));
        }
        return worst;
    };
    const std::int64_t m = 1000;
    const double p       = 0.01;
    auto binom_vs_poisson = [&](std::int64_t k) {
        return binomial_loglik(k, m, p) - poisson_loglik(k, static_cast<double>(m) * p);
    };
    const double bp_sd = std::sqrt(static_cast<double>(m) * p * (1 - p));
    const double bp    = max_gap(static_cast<double>(m) * p, bp_sd, 2.0, binom_vs_poisson);
    o.check(bp <= 0.05, "binomial vs Poisson at m=1000, I/N=0.01, max |log-density gap| " + num(bp));
    o.info("same gap over +-3 sd: " + num(max_gap(static_cast<double>(m) * p, bp_sd, 3.0, binom_vs_poisson)));

    const double lambda   = 1e4;
    auto poisson_vs_gauss = [&](std::int64_t k) {
        return poisson_loglik(k, lambda) - gaussian_loglik(static_cast<double>(k), lambda, lambda);
    };
    const double pg = max_gap(lambda, std::sqrt(lambda), 2.0, poisson_vs_gauss);
    o.check(pg <= 0.01, "Poisson vs Gaussian at lambda=1e4, max |log-density gap| " + num(pg));
    o.info("same gap over +-3 sd: " + num(max_gap(lambda, std::sqrt(lambda), 3.0, poisson_vs_gauss)));
    return o;
}

// Supremum over all partitions, enumerated as index subsets, in exact integer units.
std::int64_t partition_supremum(const std::vector<std::int64_t>& v)
{
    std::int64_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << v.size()); ++mask) {
        std::int64_t sum = 0;
        int last         = -1;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (mask & (1u << j)) {
                if (last >= 0) {
                    sum += std::abs(v[j] - v[static_cast<std::size_t>(last)]);
                }
                last = static_cast<int>(j);
            }
        }
        best = std::max(best, sum);
    }
    return best;
}

Outcome tv_oracle()
{
    Outcome o;
    // real values on the 2^-40 grid below 8 in magnitude: every difference and sum is exact in double
    const double unit = std::ldexp(1.0, -40);
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::int64_t> draw(-(std::int64_t(1) << 43), std::int64_t(1) << 43);
    int mismatches = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<std::int64_t> ticks(static_cast<std::size_t>(1 + rep % 6));
        std::vector<double> v(ticks.size());
        for (std::size_t j = 0; j < ticks.size(); ++j) {
            ticks[j] = draw(gen);
            v[j]     = static_cast<double>(ticks[j]) * unit;
        }
        mismatches += total_variation(v) != static_cast<double>(partition_supremum(ticks)) * unit;
    }
    o.check(mismatches == 0, "1000 paths of length 1..6, exact mismatches = " + std::to_string(mismatches));
    return o;
}

Outcome optimizer_suite()
{
    Outcome o;
    NelderMeadConfig tight;
    tight.max_evals = 20000;
    tight.x_tol     = 1e-10;
    tight.f_tol     = 1e-14;

    std::vector<double> x1{0.0};
    auto quad = nelder_mead([](std::span<const double> x) { return (x[0] - 1) * (x[0] - 1); }, x1, tight);
    o.check(std::abs(quad.point[0] - 1.0) <= 1e-6, "quadratic minimum error " + num(std::abs(quad.point[0] - 1.0)));

    std::vector<double> x2{-1.2, 1.0};
    auto rosen = nelder_mead(
        [](std::span<const double> x) {
            return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
        },
        x2, tight);
    const double rerr = std::max(std::abs(rosen.point[0] - 1), std::abs(rosen.point[1] - 1));
    o.check(rerr <= 1e-4, "Rosenbrock minimum error " + num(rerr));

    std::mt19937_64 gen(17);
    std::normal_distribution<double> nd;
    int worsened = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t dim = 1 + static_cast<std::size_t>(rep % 5);
        std::vector<double> center(dim), weight(dim), x0(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            center[j] = nd(gen);
            weight[j] = std::exp(nd(gen));
            x0[j]     = nd(gen);
        }
        const double wobble = std::abs(nd(gen));
        ObjectiveFunction f = [&](std::span<const double> x) {
            double v = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                v += weight[j] * std::abs(x[j] - center[j]) + wobble * std::sin(5 * x[j]);
            }
            return v;
        };
        NelderMeadConfig short_run = tight;
        short_run.max_evals        = 500;
        IteratedConfig it;
        it.inner        = short_run;
        it.max_restarts = 3;
        worsened += nelder_mead(f, x0, short_run).value > f(x0);
        worsened += iterated_nelder_mead(f, x0, it).value > f(x0);
    }
    o.check(worsened == 0, "runs ending worse than their start on 100 random objectives = " + std::to_string(worsened));

    // two basins: a shallow one at 5 next to the start, the global one at 0
    auto staircase = [](std::span<const double> x) { return std::min(x[0] * x[0], (x[0] - 5) * (x[0] - 5) + 0.5); };
    std::vector<double> x3{4.0};
    NelderMeadConfig small = tight;
    small.initial_step     = {0.1};
    auto plain             = nelder_mead(staircase, x3, small);
    IteratedConfig it;
    it.inner        = small;
    it.restart_step = {5.0};
    it.max_restarts = 10;
    auto iterated   = iterated_nelder_mead(staircase, x3, it);
    o.check(std::abs(plain.point[0] - 5.0) < 1e-3, "single small-step run stays in the shallow basin at " +
                                                      num(plain.point[0]));
    o.check(std::abs(iterated.point[0]) < 1e-3, "iterated run escapes to " + num(iterated.point[0]));
    return o;
}

Outcome lambda_regimes(const fs::path& work)
{
    Outcome o;
    const auto dir        = work / "lambda-sweep";
    const auto [code, dt] = cli({"lambda-sweep", "--scenario", "tv-sir", "--out", dir.string()});
    o.check(code == exit_ok, "exit code " + std::to_string(code));
    if (code != exit_ok) {
        return o;
    }
    o.info("runtime " + num(std::round(dt * 10) / 10) + " s");
    std::ifstream in(dir / "sweep.csv");
    auto rows = csv::read_table(in, "lambda,best_loss,data_misfit,penalty,tv,loss_sd,regime");
    std::vector<double> lambda, tv, sd;
    std::size_t well = rows.size();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        lambda.push_back(csv::parse_double(rows[j][0]));
        tv.push_back(csv::parse_double(rows[j][4]));
        sd.push_back(csv::parse_double(rows[j][5]));
        if (rows[j][6] == "well") {
            well = j;
        }
    }
    bool monotone = true;
    for (std::size_t j = 1; j < tv.size(); ++j) {
        monotone = monotone && tv[j] <= tv[j - 1];
    }
    std::string tvs;
    for (double v : tv) {
        tvs += (tvs.empty() ? "" : " ") + num(v);
    }
    o.check(monotone, "TV non-increasing in lambda: " + tvs);
    o.check(!tv.empty() && tv.back() < 1e-3, "TV at the largest lambda " + num(tv.empty() ? 0.0 : tv.back()));
    const bool has_zero = !lambda.empty() && lambda.front() == 0.0;
    o.check(has_zero && well < rows.size() && sd.front() > sd[well],
            "loss sd at lambda=0 " + num(sd.empty() ? 0.0 : sd.front()) + " > loss sd at selected lambda " +
                (well < rows.size() ? num(lambda[well]) + " " + num(sd[well]) : std::string("none")));
    return o;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
        }
    }
    return files;
}

Outcome determinism(const fs::path& work)
{
    Outcome o;
    const auto root = work / "determinism";
    fs::create_directories(root);
    cli({"simulate", "--scenario", "constant-sirq", "--out", (root / "data").string()});

    // a small time-varying fit so fit and sweep stay quick
    json cfg = to_json(reproduction_config(ScenarioName::ConstantSIRQ));
    cfg["dataset"]                       = (root / "data" / "dataset.csv").generic_string();
    cfg["parameters"][0]["time_varying"] = true;
    cfg["parameters"][0]["regularizer"]  = "tv";
    cfg["parameters"][0]["weight"]       = 1.0;
    cfg["optimizer"]["max_restarts"]     = 2;
    cfg["optimizer"]["max_evals"]        = 2000;
    cfg["optimizer"]["block_widths"]     = json::array({1});
    cfg["starts"]                        = 2;
    std::ofstream(root / "small.json") << cfg.dump(2);
    const auto small = (root / "small.json").string();

    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"simulate constant-sirq", {"simulate", "--scenario", "constant-sirq", "--seed", "11"}},
        {"simulate tv-sir", {"simulate", "--scenario", "tv-sir", "--seed", "11"}},
        {"simulate tv-sirq", {"simulate", "--scenario", "tv-sirq", "--seed", "11"}},
        {"fit", {"fit", "--config", small}},
        {"reproduce constant-sirq", {"reproduce", "constant-sirq", "--seed", "11"}},
        {"lambda-sweep", {"lambda-sweep", "--config", small, "--lambda", "0,1,100"}},
    };
    for (std::size_t c = 0; c < commands.size(); ++c) {
        const auto& [name, args] = commands[c];
        std::map<std::string, std::string> runs[2];
        bool ran = true;
        for (int r = 0; r < 2; ++r) {
            auto a         = args;
            const auto dir = root / ("run" + std::to_string(c) + "_" + std::to_string(r));
            a.insert(a.end(), {"--out", dir.string()});
            ran = ran && cli(a).first == exit_ok;
            runs[r] = directory_bytes(dir);
        }
        o.check(ran && !runs[0].empty() && runs[0] == runs[1],
                name + ": " + std::to_string(runs[0].size()) + " files, identical = " + (runs[0] == runs[1] ? "yes" : "no"));
    }
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    fs::path work = fs::temp_directory_path() / "tvepi-acceptance";
    std::vector<int> only;
    app.add_option("--work", work, "scratch directory for command outputs");
    app.add_option("--only", only, "criteria to run (default all)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"constant SIRQ recovery", [&] { return reproduce(work, "constant-sirq", 30); }},
        {"time-varying SIR recovery", [&] { return reproduce(work, "tv-sir", 600); }},
        {"time-varying SIRQ recovery", [&] { return reproduce(work, "tv-sirq", 1200); }},
        {"conservation suite", conservation},
        {"likelihood oracles", likelihood_oracles},
        {"total variation oracle", tv_oracle},
        {"optimizer suite", optimizer_suite},
        {"lambda-sweep regimes", [&] { return lambda_regimes(work); }},
        {"determinism", [&] { return determinism(work); }},
    };
    const std::set<int> selected(only.begin(), only.end());
    std::vector<std::string> summary;
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.contains(id)) {
            continue;
        }
        Outcome o;
        try {
            o = criteria[i].second();
        }
        catch (const std::exception& e) {
            o.check(false, std::string("error: ") + e.what());
        }
        all = all && o.pass;
        std::ostringstream block;
        block << (o.pass ? "PASS " : "FAIL ") << id << " " << criteria[i].first << '\n';
        for (const auto& n : o.notes) {
            block << "    " << n << '\n';
        }
        std::cout << block.str() << std::flush;
        summary.push_back(std::string(o.pass ? "PASS " : "FAIL ") + std::to_string(id) + " " + criteria[i].first);
    }
    std::cout << "\nsummary\n";
    for (const auto& s : summary) {
        std::cout << s << '\n';
    }
    return all ? 0 : 1;
}
