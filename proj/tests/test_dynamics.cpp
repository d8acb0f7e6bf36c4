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
#include "tvepi/dynamics.h"
#include "tvepi/errors.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace
{

using namespace tvepi;

std::vector<ParameterPath> constant_paths(std::vector<double> rates)
{
    std::vector<ParameterPath> paths;
    const Rate order[] = {Rate::Beta, Rate::Gamma, Rate::Delta};
    for (std::size_t j = 0; j < rates.size(); ++j) {
        paths.push_back({order[j], {rates[j]}});
    }
    return paths;
}

double max_abs_diff(const Trajectory& a, const Trajectory& b, std::size_t stride_b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.states().size(); ++k) {
        const auto& x = a.at(k);
        const auto& y = b.at(k * stride_b);
        d = std::max({d, std::abs(x.s - y.s), std::abs(x.i - y.i), std::abs(x.r - y.r),
                      std::abs(x.q.value_or(0) - y.q.value_or(0))});
    }
    return d;
}

} // namespace

TEST(TestDynamics, modelShapes)
{
    EXPECT_EQ(num_compartments(ModelKind::SIR), 3u);
    EXPECT_EQ(num_rates(ModelKind::SIR), 2u);
    EXPECT_EQ(num_compartments(ModelKind::SIRQ), 4u);
    EXPECT_EQ(num_rates(ModelKind::SIRQ), 3u);
    EXPECT_EQ(parse_model_kind(to_string(ModelKind::SIRQ)), ModelKind::SIRQ);
    EXPECT_THROW(parse_model_kind("SEIR"), ConfigError);
}

TEST(TestDynamics, derivativeSir)
{
    StateVector x{990, 10, 0, {}};
    std::vector<double> p{0.3, 0.03};
    auto d = derivative(ModelKind::SIR, x, p);
    EXPECT_NEAR(d.s, -2.97, 1e-12);
    EXPECT_NEAR(d.i, 2.67, 1e-12);
    EXPECT_NEAR(d.r, 0.3, 1e-12);
    EXPECT_FALSE(d.q.has_value());
}

TEST(TestDynamics, derivativeZeroRates)
{
    StateVector x{412.5, 77.25, 510.25, {}};
    std::vector<double> p{0.0, 0.0};
    auto d = derivative(ModelKind::SIR, x, p);
    EXPECT_EQ(d.s, 0.0);
    EXPECT_EQ(d.i, 0.0);
    EXPECT_EQ(d.r, 0.0);
}

TEST(TestDynamics, derivativeSirq)
{
    StateVector x{990, 10, 0, 0.0};
    std::vector<double> p{0.3, 0.03, 0.07};
    auto d = derivative(ModelKind::SIRQ, x, p);
    EXPECT_NEAR(d.s, -2.97, 1e-12);
    EXPECT_NEAR(d.i, 1.97, 1e-12);
    EXPECT_NEAR(d.r, 0.3, 1e-12);
    EXPECT_NEAR(*d.q, 0.7, 1e-12);
}

TEST(TestDynamics, derivativeArity)
{
    StateVector x{990, 10, 0, 0.0};
    std::vector<double> two{0.3, 0.03};
    std::vector<double> three{0.3, 0.03, 0.07};
    EXPECT_THROW(derivative(ModelKind::SIRQ, x, two), ArityError);
    EXPECT_THROW(derivative(ModelKind::SIR, StateVector{990, 10, 0, {}}, three), ArityError);
}

TEST(TestDynamics, derivativeFlowsCancel)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        StateVector x{1000 * u(gen), 1000 * u(gen), 1000 * u(gen), 1000 * u(gen)};
        std::vector<double> p{u(gen), u(gen), u(gen)};
        auto d       = derivative(ModelKind::SIRQ, x, p);
        double scale = std::abs(d.s) + std::abs(d.i) + std::abs(d.r) + std::abs(*d.q);
        // equal up to the rounding of the four additions
        EXPECT_LE(std::abs(d.total()), 4 * std::numeric_limits<double>::epsilon() * scale);
    }
}

TEST(TestDynamics, zeroRatesFixedPoint)
{
    auto init = initial_state(ModelKind::SIRQ, 1000, 10);
    TimeGrid grid{0, 20, 20, 10};
    auto traj = integrate(ModelKind::SIRQ, init, constant_paths({0, 0, 0}), grid);
    for (const auto& x : traj.states()) {
        EXPECT_EQ(x, init);
    }
}

TEST(TestDynamics, singleEulerStep)
{
    TimeGrid grid{0, 1, 1, 1};
    auto traj = integrate(ModelKind::SIR, StateVector{990, 10, 0, {}}, constant_paths({0.3, 0.03}), grid);
    ASSERT_EQ(traj.states().size(), 2u);
    EXPECT_NEAR(traj.at(1).s, 987.03, 1e-12);
    EXPECT_NEAR(traj.at(1).i, 12.67, 1e-12);
    EXPECT_NEAR(traj.at(1).r, 0.3, 1e-12);
}

TEST(TestDynamics, quarantineOvertakesRemoval)
{
    TimeGrid grid{0, 100, 100, 10};
    auto traj = integrate(ModelKind::SIRQ, initial_state(ModelKind::SIRQ, 1000, 10), constant_paths({0.3, 0.03, 0.07}),
                          grid);
    const auto& last = traj.states().back();
    EXPECT_GT(*last.q, last.r);
}

TEST(TestDynamics, initialStatePreserved)
{
    TimeGrid grid{0, 10, 10, 3};
    StateVector init{900, 60, 40, {}};
    auto traj = integrate(ModelKind::SIR, init, constant_paths({0.4, 0.1}), grid);
    EXPECT_EQ(traj.at(0), init);
    EXPECT_EQ(traj.population(), 1000.0);
}

TEST(TestDynamics, timeVaryingPathUsesStepValue)
{
    // beta is zero on the first step, so nothing happens there
    TimeGrid grid{0, 2, 2, 4};
    std::vector<ParameterPath> paths{{Rate::Beta, {0.0, 0.5}}, {Rate::Gamma, {0.0}}};
    auto traj = integrate(ModelKind::SIR, StateVector{990, 10, 0, {}}, paths, grid);
    EXPECT_EQ(traj.at(1).s, 990.0);
    EXPECT_LT(traj.at(2).s, 990.0);
}

TEST(TestDynamics, pathArity)
{
    TimeGrid grid{0, 10, 10, 1};
    auto init = initial_state(ModelKind::SIRQ, 1000, 10);
    EXPECT_THROW(integrate(ModelKind::SIRQ, init, constant_paths({0.3, 0.03}), grid), ArityError);
    std::vector<ParameterPath> bad_length{{Rate::Beta, {0.3, 0.3}}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
    EXPECT_THROW(integrate(ModelKind::SIRQ, init, bad_length, grid), ArityError);
}

TEST(TestDynamics, overflowNamesStep)
{
    TimeGrid grid{0, 10, 10, 1};
    std::vector<ParameterPath> paths{{Rate::Beta, {0.3}}, {Rate::Gamma, {-1e300}}};
    try {
        integrate(ModelKind::SIR, StateVector{990, 10, 0, {}}, paths, grid);
        FAIL() << "expected IntegrationError";
    }
    catch (const IntegrationError& e) {
        EXPECT_LT(e.step(), 10u);
    }
}

TEST(TestDynamics, largeStepsStayNonNegative)
{
    // beta*h far above 1 overshoots plain Euler; the clamp keeps every compartment at or above 0
    TimeGrid grid{0, 10, 10, 1};
    auto traj = integrate(ModelKind::SIRQ, initial_state(ModelKind::SIRQ, 1000, 10), constant_paths({5.0, 2.0, 3.0}),
                          grid);
    for (const auto& x : traj.states()) {
        EXPECT_GE(x.s, 0.0);
        EXPECT_GE(x.i, 0.0);
        EXPECT_GE(x.r, 0.0);
        EXPECT_GE(*x.q, 0.0);
        EXPECT_NEAR(x.total(), 1000.0, 1e-9 * 1000);
    }
}

TEST(TestDynamics, reproductionNumbers)
{
    EXPECT_NEAR(basic_reproduction_number(ModelKind::SIR, 0.3, 0.03, {}, false), 10.0, 1e-12);
    EXPECT_NEAR(basic_reproduction_number(ModelKind::SIRQ, 0.3, 0.03, 0.07, false), 10.0, 1e-12);
    EXPECT_NEAR(basic_reproduction_number(ModelKind::SIRQ, 0.3, 0.03, 0.07, true), 3.0, 1e-12);
    EXPECT_EQ(basic_reproduction_number(ModelKind::SIR, 0.17, 0.17, {}, false), 1.0);
    EXPECT_THROW(basic_reproduction_number(ModelKind::SIR, 0.3, 0.0, {}, false), DomainError);
    EXPECT_THROW(basic_reproduction_number(ModelKind::SIRQ, 0.3, 0.0, 0.0, true), DomainError);
}

TEST(TestDynamics, conservationAndMonotonicity)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> rate(0.0, 0.8);
    TimeGrid grid{0, 60, 60, 5};
    for (auto kind : {ModelKind::SIR, ModelKind::SIRQ}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<ParameterPath> paths;
            for (auto r : model_rates(kind)) {
                ParameterPath p{r, std::vector<double>(grid.n_steps)};
                for (auto& v : p.values) {
                    v = rate(gen);
                }
                paths.push_back(p);
            }
            auto traj = integrate(kind, initial_state(kind, 5000, 25), paths, grid);
            for (std::size_t k = 0; k < traj.states().size(); ++k) {
                const auto& x = traj.at(k);
                EXPECT_LE(std::abs(x.total() - 5000.0), 1e-9 * 5000);
                if (k > 0) {
                    const auto& prev = traj.at(k - 1);
                    EXPECT_LE(x.s, prev.s);
                    EXPECT_GE(x.r, prev.r);
                    EXPECT_GE(x.q.value_or(0), prev.q.value_or(0));
                }
            }
        }
    }
}

TEST(TestDynamics, refinementConvergence)
{
    auto init  = initial_state(ModelKind::SIRQ, 1000, 10);
    auto paths = constant_paths({0.3, 0.03, 0.07});
    auto ref   = integrate(ModelKind::SIRQ, init, paths, TimeGrid{0, 100, 100, 1000});
    for (std::size_t sub : {5u, 10u, 20u, 40u}) {
        auto coarse = integrate(ModelKind::SIRQ, init, paths, TimeGrid{0, 100, 100, sub});
        auto fine   = integrate(ModelKind::SIRQ, init, paths, TimeGrid{0, 100, 100, 2 * sub});
        double ratio = max_abs_diff(fine, ref, 1) / max_abs_diff(coarse, ref, 1);
        EXPECT_GE(ratio, 0.4) << sub;
        EXPECT_LE(ratio, 0.6) << sub;
    }
}

TEST(TestDynamics, gridNodes)
{
    TimeGrid grid{0, 10, 5, 1};
    EXPECT_EQ(grid.step_width(), 2.0);
    EXPECT_EQ(grid.nearest_node(4.0), 2u);
    EXPECT_EQ(grid.nearest_node(4.9), 2u);
    EXPECT_EQ(grid.nearest_node(5.0), 2u); // tie goes to the earlier node
    EXPECT_EQ(grid.nearest_node(5.1), 3u);
    EXPECT_THROW((TimeGrid{0, 0, 5, 1}.validate()), ConfigError);
    EXPECT_THROW((TimeGrid{0, 10, 0, 1}.validate()), ConfigError);
    EXPECT_THROW((TimeGrid{0, 10, 5, 0}.validate()), ConfigError);
}

TEST(TestDynamics, trajectoryCsvRoundTrip)
{
    TimeGrid grid{0, 30, 30, 10};
    auto traj = integrate(ModelKind::SIRQ, initial_state(ModelKind::SIRQ, 1000, 10), constant_paths({0.3, 0.03, 0.07}),
                          grid);
    std::stringstream ss;
    write_trajectory_csv(ss, traj);
    auto back = read_trajectory_csv(ss, ModelKind::SIRQ, grid);
    EXPECT_EQ(back.states(), traj.states());
}
