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
#include "tvepi/errors.h"
#include "tvepi/objective.h"
#include "tvepi/synthesis.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{

using namespace tvepi;

// Supremum over every partition of the index set, enumerated as subsets of indices, in exact integer units.
std::int64_t partition_supremum(const std::vector<std::int64_t>& v)
{
    const std::size_t n = v.size();
    std::int64_t best   = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::int64_t sum = 0;
        int last         = -1;
        for (std::size_t j = 0; j < n; ++j) {
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

double partition_supremum(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    double best         = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        int last   = -1;
        for (std::size_t j = 0; j < n; ++j) {
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

Objective constant_sirq_objective(double beta_weight = 0.0, bool time_varying = false)
{
    auto bundle = synthesize(builtin_scenario(ScenarioName::ConstantSIRQ, 7));
    const auto& spec = bundle.spec;
    ParameterEncoding enc({{Rate::Beta, time_varying, Transform::Log},
                           {Rate::Gamma, false, Transform::Log},
                           {Rate::Delta, false, Transform::Log}},
                          spec.grid.n_steps);
    RegularizerSpec reg;
    if (time_varying) {
        reg.terms.push_back({Rate::Beta, RegularizerKind::TotalVariation, beta_weight});
    }
    return Objective(spec.model, spec.initial(), spec.grid, bundle.dataset, ObservationConfig{}, enc, reg);
}

} // namespace

TEST(TestObjective, variationExamples)
{
    std::vector<double> flat{0.3, 0.3, 0.3};
    std::vector<double> bump{1, 3, 2};
    EXPECT_EQ(total_variation(flat), 0.0);
    EXPECT_EQ(total_variation(bump), 3.0);
    EXPECT_EQ(quadratic_variation(flat), 0.0);
    EXPECT_EQ(quadratic_variation(bump), 5.0);
    std::vector<double> single{4.0};
    EXPECT_EQ(total_variation(single), 0.0);
}

TEST(TestObjective, variationSymmetries)
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> a(1 + rep % 17), b(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] = nd(gen);
            b[j] = nd(gen);
        }
        std::vector<double> rev(a.rbegin(), a.rend());
        EXPECT_NEAR(total_variation(rev), total_variation(a), 1e-12);

        std::vector<double> sum(a.size()), shifted(a.size()), scaled(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            sum[j]     = a[j] + b[j];
            shifted[j] = a[j] + 2.5;
            scaled[j]  = -3.0 * a[j];
        }
        EXPECT_LE(total_variation(sum), total_variation(a) + total_variation(b) + 1e-12);
        EXPECT_NEAR(total_variation(shifted), total_variation(a), 1e-12);
        EXPECT_NEAR(quadratic_variation(shifted), quadratic_variation(a), 1e-10);
        EXPECT_NEAR(quadratic_variation(scaled), 9.0 * quadratic_variation(a), 1e-10);
    }
}

TEST(TestObjective, variationMatchesPartitionSupremum)
{
    // values are multiples of 2^-40 below 8 in magnitude, so every difference and sum is exact in double
    const double unit = std::ldexp(1.0, -40);
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::int64_t> draw(-(std::int64_t(1) << 43), std::int64_t(1) << 43);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<std::int64_t> ticks(1 + rep % 6);
        std::vector<double> v(ticks.size());
        for (std::size_t j = 0; j < ticks.size(); ++j) {
            ticks[j] = draw(gen);
            v[j]     = static_cast<double>(ticks[j]) * unit;
        }
        EXPECT_EQ(total_variation(v), static_cast<double>(partition_supremum(ticks)) * unit);
    }
}

TEST(TestObjective, variationMatchesSupremumForArbitraryDoubles)
{
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> v(1 + rep % 6);
        for (auto& x : v) {
            x = nd(gen);
        }
        const double tv = total_variation(v);
        EXPECT_NEAR(partition_supremum(v), tv, 16 * std::numeric_limits<double>::epsilon() * std::max(tv, 1.0));
    }
}

TEST(TestObjective, encodeConcatenates)
{
    ParameterEncoding enc({{Rate::Beta, false, Transform::Identity},
                           {Rate::Gamma, false, Transform::Identity},
                           {Rate::Delta, false, Transform::Identity}},
                          100);
    std::vector<ParameterPath> truth{{Rate::Beta, {0.3}}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
    EXPECT_EQ(enc.encode(truth), (std::vector<double>{0.3, 0.03, 0.07}));
    EXPECT_EQ(enc.decode(enc.encode(truth)), truth);

    auto log_enc = ParameterEncoding::all_constant(ModelKind::SIRQ, 100);
    auto x       = log_enc.encode(truth);
    auto back    = log_enc.decode(x);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(back[j].values[0], truth[j].values[0], 1e-15);
    }

    std::vector<ParameterPath> unit{{Rate::Beta, {1.0}}, {Rate::Gamma, {0.5}}, {Rate::Delta, {0.5}}};
    EXPECT_EQ(log_enc.encode(unit)[0], 0.0);
}

TEST(TestObjective, encodeMixedLayout)
{
    ParameterEncoding enc({{Rate::Beta, true, Transform::Log}, {Rate::Gamma, false, Transform::Log}}, 4);
    EXPECT_EQ(enc.dimension(), 5u);
    EXPECT_EQ(enc.offset(1), 4u);
    std::vector<ParameterPath> paths{{Rate::Beta, {0.1, 0.2, 0.2, 0.4}}, {Rate::Gamma, {0.05}}};
    auto back = enc.decode(enc.encode(paths));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(back[0].values[k], paths[0].values[k], 1e-15);
    }
    EXPECT_EQ(back[1].values.size(), 1u);
}

TEST(TestObjective, encodeErrors)
{
    auto enc = ParameterEncoding::all_constant(ModelKind::SIR, 10);
    std::vector<ParameterPath> negative{{Rate::Beta, {-0.1}}, {Rate::Gamma, {0.1}}};
    EXPECT_THROW(enc.encode(negative), EncodingError);
    std::vector<ParameterPath> zero{{Rate::Beta, {0.1}}, {Rate::Gamma, {0.0}}};
    EXPECT_THROW(enc.encode(zero), EncodingError);
    std::vector<ParameterPath> missing{{Rate::Beta, {0.1}}};
    EXPECT_THROW(enc.encode(missing), ArityError);
    EXPECT_THROW(enc.check_model(ModelKind::SIRQ), ConfigError);
}

TEST(TestObjective, regularizerValidation)
{
    auto enc = ParameterEncoding::all_constant(ModelKind::SIR, 10);
    RegularizerSpec on_constant{{{Rate::Beta, RegularizerKind::TotalVariation, 1.0}}};
    EXPECT_THROW(on_constant.validate(enc), ConfigError);
    ParameterEncoding tv({{Rate::Beta, true, Transform::Log}, {Rate::Gamma, false, Transform::Log}}, 10);
    RegularizerSpec negative{{{Rate::Beta, RegularizerKind::TotalVariation, -1.0}}};
    EXPECT_THROW(negative.validate(tv), ConfigError);
    RegularizerSpec ok{{{Rate::Beta, RegularizerKind::QuadraticVariation, 2.0}}};
    EXPECT_NO_THROW(ok.validate(tv));
}

TEST(TestObjective, zeroWeightIsNegativeLogLikelihood)
{
    auto obj  = constant_sirq_objective();
    auto x    = obj.encoding().encode(builtin_scenario(ScenarioName::ConstantSIRQ).truth);
    auto traj = obj.trajectory(x);
    EXPECT_EQ(neg_log_posterior(x, obj), -dataset_loglik(obj.data(), traj, obj.observation()));
    EXPECT_EQ(obj.evaluate(x).penalty, 0.0);
}

TEST(TestObjective, constantPathsAreFreeOfPenalty)
{
    auto obj = constant_sirq_objective(1e6, true);
    std::vector<ParameterPath> flat{{Rate::Beta, std::vector<double>(100, 0.3)}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
    auto parts = obj.evaluate(obj.encoding().encode(flat));
    EXPECT_EQ(parts.penalty, 0.0);
    EXPECT_EQ(parts.total, parts.neg_loglik);
}

TEST(TestObjective, truthBeatsDoubledTransmission)
{
    auto obj = constant_sirq_objective();
    std::vector<double> truth{std::log(0.3), std::log(0.03), std::log(0.07)};
    std::vector<double> wrong{std::log(0.6), std::log(0.03), std::log(0.07)};
    EXPECT_LT(obj(truth), obj(wrong));
}

TEST(TestObjective, strictlyIncreasingInWeight)
{
    std::vector<ParameterPath> bumpy{{Rate::Beta, std::vector<double>(100, 0.3)}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
    for (std::size_t k = 40; k < 60; ++k) {
        bumpy[0].values[k] = 0.2;
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (double w : {0.0, 0.5, 1.0, 10.0, 100.0}) {
        auto obj          = constant_sirq_objective(w, true);
        const double loss = obj(obj.encoding().encode(bumpy));
        EXPECT_GT(loss, prev);
        prev = loss;
    }
}

TEST(TestObjective, penaltyOnNaturalScale)
{
    auto obj = constant_sirq_objective(2.0, true);
    std::vector<ParameterPath> step{{Rate::Beta, std::vector<double>(100, 0.3)}, {Rate::Gamma, {0.03}}, {Rate::Delta, {0.07}}};
    for (std::size_t k = 50; k < 100; ++k) {
        step[0].values[k] = 0.1;
    }
    EXPECT_NEAR(obj.evaluate(obj.encoding().encode(step)).penalty, 2.0 * 0.2, 1e-12);
}

TEST(TestObjective, deterministic)
{
    auto obj = constant_sirq_objective(3.0, true);
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd(-1.5, 0.3);
    std::vector<double> x(obj.dimension());
    for (auto& v : x) {
        v = nd(gen);
    }
    const double a = obj(x);
    const double b = obj(x);
    EXPECT_EQ(a - b, 0.0);
}

TEST(TestObjective, overflowGivesSentinel)
{
    auto enc = ParameterEncoding({{Rate::Beta, false, Transform::Identity},
                                  {Rate::Gamma, false, Transform::Identity},
                                  {Rate::Delta, false, Transform::Identity}},
                                 100);
    auto bundle = synthesize(builtin_scenario(ScenarioName::ConstantSIRQ, 7));
    Objective obj(ModelKind::SIRQ, bundle.spec.initial(), bundle.spec.grid, bundle.dataset, ObservationConfig{}, enc,
                  RegularizerSpec{});
    std::vector<double> x{0.3, -1e300, 0.07};
    auto parts = obj.evaluate(x);
    EXPECT_TRUE(parts.overflow);
    EXPECT_EQ(parts.total, overflow_loss);
    EXPECT_THROW(obj.trajectory(x), IntegrationError);
}
