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

#pragma once

#include "rislocus/phasecfg.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rislocus
{
    // N_x x 2N_y control matrix; column 2k is the H state and 2k+1 the V state of physical column k
    class BitMatrix
    {
    public:
        BitMatrix() = default;
        BitMatrix(std::size_t rows, std::size_t cols);

        std::size_t rows() const { return nr; }
        std::size_t cols() const { return nc; }
        std::size_t size() const { return bits.size(); }

        bool get(std::size_t r, std::size_t c) const { return bits.at(r * nc + c) != 0; }
        void set(std::size_t r, std::size_t c, bool v) { bits.at(r * nc + c) = v ? 1 : 0; }
        void flip(std::size_t r, std::size_t c) { bits.at(r * nc + c) ^= 1; }
        void flip_column(std::size_t c);
        void flip_row(std::size_t r);
        std::size_t count_ones() const;

        const std::vector<std::uint8_t> &data() const { return bits; }
        bool operator==(const BitMatrix &o) const = default;

    private:
        std::size_t nr = 0, nc = 0;
        std::vector<std::uint8_t> bits;
    };

    using PowerOracle = std::function<double(const BitMatrix &)>;

    enum class StepKind
    {
        baseline,
        column_pair,
        row
    };

    std::string to_string(StepKind k);

    struct OptStep
    {
        StepKind kind = StepKind::baseline;
        std::size_t iteration = 0;
        std::size_t index = 0; // physical column or row
        double power = 0.0;    // measured for this probe (linear)
        bool accepted = false;
    };

    struct OptTrace
    {
        std::vector<OptStep> steps;
        std::vector<double> timeline;         // best power after each step
        std::vector<double> iteration_power;  // best power at the end of each iteration

        double final_power() const { return timeline.empty() ? 0.0 : timeline.back(); }
        std::size_t probes() const { return steps.size(); }
        std::size_t accepted() const;
    };

    struct GreedyResult
    {
        BitMatrix config;
        OptTrace trace;
    };

    class OptimizationAborted : public std::runtime_error
    {
    public:
        OptimizationAborted(const std::string &what, GreedyResult partial)
            : std::runtime_error(what), state(std::move(partial))
        {
        }
        const GreedyResult &partial() const { return state; }

    private:
        GreedyResult state;
    };

    // Column-pair flips then row flips per iteration, kept on strict improvement. P_max carries over
    // between iterations. Pass `resume` to continue a previous session from its matrix and trace.
    GreedyResult greedy_optimize(const PowerOracle &oracle, std::size_t rows, std::size_t physical_cols,
                                 std::size_t iterations, const GreedyResult *resume = nullptr);

    // Full enumeration over rows x 2 physical_cols bits (at most 16); first maximum wins ties.
    // Bit b of the enumeration counter is flat entry b (row-major).
    std::pair<BitMatrix, double> exhaustive_best(const PowerOracle &oracle, std::size_t rows, std::size_t physical_cols);

    // 10 log10(final2 / final1)
    double second_iteration_gain(const OptTrace &first, const OptTrace &second);

    struct BitPhases
    {
        double zero = -0.5 * pi;
        double one = 0.5 * pi;
    };

    // Dual-pol PhaseConfig (H-major, element index = row * n_cols + col) from the control matrix
    PhaseConfig bits_to_config(const BitMatrix &m, const BitPhases &states = {},
                               Layout layout = Layout::dualpol_model2);
}
