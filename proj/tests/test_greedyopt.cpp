// SPDX-License-Identifier: Apache-2.0
//
// rislocus - RIS-aided localization, sensing and testbed emulation
// Copyright (C) 2026 rislocus contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "doctest.h"

#include "rislocus/greedyopt.hpp"

#include <cmath>
#include <random>

using namespace rislocus;

// |hd + sum_e g_e exp(j theta_e)|^2 with theta from the bit states
static PowerOracle cascade_oracle(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<cdouble> g(rows * cols);
    for (auto &x : g)
        x = {nd(rng), nd(rng)};
    const cdouble hd(nd(rng), nd(rng));
    return [g, hd, cols](const BitMatrix &m) {
        cdouble acc = hd;
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                acc += g[r * cols + c] * std::polar(1.0, m.get(r, c) ? pi / 2 : -pi / 2);
        return std::norm(acc);
    };
}

TEST_CASE("bit matrix")
{
    BitMatrix m(2, 4);
    CHECK(m.size() == 8);
    CHECK(m.count_ones() == 0);
    m.flip_column(1);
    CHECK(m.get(0, 1));
    CHECK(m.get(1, 1));
    m.flip_row(0);
    CHECK(!m.get(0, 1));
    CHECK(m.count_ones() == 4);
    m.set(1, 3, false);
    CHECK(!m.get(1, 3));
    BitMatrix n = m;
    CHECK(n == m);
    n.flip(0, 0);
    CHECK(!(n == m));
    CHECK_THROWS(m.get(2, 0));
}

TEST_CASE("constant oracle accepts nothing")
{
    const auto r = greedy_optimize([](const BitMatrix &) { return 1.0; }, 3, 2, 2);
    CHECK(r.config.count_ones() == 0);
    CHECK(r.trace.accepted() == 0);
    CHECK(r.trace.probes() == 1 + 2 * (2 + 3));
    CHECK(r.trace.final_power() == 1.0);
}

TEST_CASE("greedy trace invariants")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const std::size_t rows = 3, cols = 4;
        const auto oracle = cascade_oracle(rows, 2 * cols, seed);
        const auto r = greedy_optimize(oracle, rows, cols, 3);
        const auto &st = r.trace.steps;
        REQUIRE(st.size() == 1 + 3 * (cols + rows));
        CHECK(st[0].kind == StepKind::baseline);
        CHECK(st[0].power == oracle(BitMatrix(rows, 2 * cols)));
        double best = st[0].power;
        for (std::size_t i = 1; i < st.size(); ++i)
        {
            const std::size_t k = (i - 1) % (cols + rows);
            CHECK(st[i].iteration == (i - 1) / (cols + rows));
            CHECK(st[i].kind == (k < cols ? StepKind::column_pair : StepKind::row));
            CHECK(st[i].index == (k < cols ? k : k - cols));
            CHECK(st[i].accepted == (st[i].power > best));
            if (st[i].accepted)
                best = st[i].power;
            CHECK(r.trace.timeline[i] == best);
            CHECK(r.trace.timeline[i] >= r.trace.timeline[i - 1]);
        }
        CHECK(r.trace.final_power() == best);
        CHECK(oracle(r.config) == best);
        CHECK(r.trace.iteration_power.size() == 3);
        CHECK(second_iteration_gain(r.trace, r.trace) == 0.0);

        // deterministic oracle: pure function of the inputs
        CHECK(greedy_optimize(oracle, rows, cols, 3).config == r.config);

        // two separate one-iteration sessions chained through resume match one two-iteration run
        const auto a = greedy_optimize(oracle, rows, cols, 1);
        const auto b = greedy_optimize(oracle, rows, cols, 1, &a);
        const auto ab = greedy_optimize(oracle, rows, cols, 2);
        CHECK(b.config == ab.config);
        CHECK(b.trace.final_power() == ab.trace.final_power());
        CHECK(b.trace.probes() == ab.trace.probes());
        CHECK(second_iteration_gain(a.trace, b.trace) >= 0.0);
    }
}

TEST_CASE("greedy against exhaustive search")
{
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {1, 2}, {2, 2}})
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            const auto oracle = cascade_oracle(rows, 2 * cols, 100 + seed);
            const auto [best, p] = exhaustive_best(oracle, rows, cols);
            // brute-force reference in the test
            double ref = -1.0;
            for (std::size_t code = 0; code < (std::size_t(1) << (rows * 2 * cols)); ++code)
            {
                BitMatrix m(rows, 2 * cols);
                for (std::size_t b = 0; b < m.size(); ++b)
                    m.set(b / m.cols(), b % m.cols(), (code >> b) & 1);
                ref = std::max(ref, oracle(m));
            }
            CHECK(p == ref);
            CHECK(oracle(best) == p);
            const auto g = greedy_optimize(oracle, rows, cols, 2);
            CHECK(g.trace.final_power() <= p);
        }
}

TEST_CASE("exhaustive search rules")
{
    // 1x1 dual-pol favouring H=1, V=0
    const auto [m, p] = exhaustive_best([](const BitMatrix &b) { return b.get(0, 0) && !b.get(0, 1) ? 2.0 : 1.0; }, 1, 1);
    CHECK(m.get(0, 0));
    CHECK(!m.get(0, 1));
    CHECK(p == 2.0);

    const auto [z, pz] = exhaustive_best([](const BitMatrix &) { return 0.5; }, 2, 2);
    CHECK(z.count_ones() == 0);
    CHECK(pz == 0.5);

    // two elements: co-phasing picks equal bits when the element responses point the same way
    for (double rel : {0.2, 1.0, 2.5, -2.9})
    {
        const cdouble a1(1.0, 0.0), a2 = std::polar(0.8, rel);
        const auto [c, pc] = exhaustive_best(
            [&](const BitMatrix &b) {
                return std::norm(a1 * std::polar(1.0, b.get(0, 0) ? pi / 2 : -pi / 2) +
                                 a2 * std::polar(1.0, b.get(0, 1) ? pi / 2 : -pi / 2));
            },
            1, 1);
        const bool same = std::cos(rel) > 0.0;
        CHECK((c.get(0, 0) == c.get(0, 1)) == same);
        CHECK(pc == doctest::Approx(same ? std::norm(a1 + a2) : std::norm(a1 - a2)));
    }
    CHECK_THROWS_AS(exhaustive_best([](const BitMatrix &) { return 0.0; }, 3, 3), std::invalid_argument);
}

TEST_CASE("aborted session keeps the partial trace")
{
    int calls = 0;
    const PowerOracle flaky = [&](const BitMatrix &m) {
        if (++calls == 4)
            throw std::runtime_error("instrument timeout");
        return double(m.count_ones());
    };
    try
    {
        greedy_optimize(flaky, 2, 2, 1);
        CHECK(false);
    }
    catch (const OptimizationAborted &e)
    {
        CHECK(e.partial().trace.probes() == 3);
        CHECK(e.partial().trace.accepted() == 2);
        CHECK(e.partial().config.count_ones() == 4);
    }
}

TEST_CASE("bits to configuration")
{
    BitMatrix m(2, 4);
    m.set(0, 0, true);
    m.set(1, 3, true);
    const auto c = bits_to_config(m);
    CHECK(c.layout() == Layout::dualpol_model2);
    REQUIRE(c.size() == 8);
    // H half first, element index = row * 2 + physical column
    const std::vector<double> want = {pi / 2, -pi / 2, -pi / 2, -pi / 2, -pi / 2, -pi / 2, -pi / 2, pi / 2};
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(c.phases()[i] == doctest::Approx(want[i]));
    CHECK(c.bits() == 1);
    const auto c2 = bits_to_config(m, {-pi, 0.0});
    CHECK(c2.phases()[0] == doctest::Approx(0.0));
    CHECK(angular_distance(c2.phases()[1], -pi) < 1e-12);
}
