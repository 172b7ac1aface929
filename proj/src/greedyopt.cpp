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

#include "rislocus/greedyopt.hpp"

#include <cmath>

namespace rislocus
{
    BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : nr(rows), nc(cols), bits(rows * cols, 0)
    {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("BitMatrix: dimensions must be positive");
    }

    void BitMatrix::flip_column(std::size_t c)
    {
        for (std::size_t r = 0; r < nr; ++r)
            flip(r, c);
    }

    void BitMatrix::flip_row(std::size_t r)
    {
        for (std::size_t c = 0; c < nc; ++c)
            flip(r, c);
    }

    std::size_t BitMatrix::count_ones() const
    {
        std::size_t n = 0;
        for (auto b : bits)
            n += b;
        return n;
    }

    std::string to_string(StepKind k)
    {
        switch (k)
        {
        case StepKind::baseline: return "baseline";
        case StepKind::column_pair: return "column_pair";
        case StepKind::row: return "row";
        }
        return "unknown";
    }

    std::size_t OptTrace::accepted() const
    {
        std::size_t n = 0;
        for (const auto &s : steps)
            n += s.accepted && s.kind != StepKind::baseline;
        return n;
    }

    GreedyResult greedy_optimize(const PowerOracle &oracle, std::size_t rows, std::size_t physical_cols,
                                 std::size_t iterations, const GreedyResult *resume)
    {
        if (iterations < 1)
            throw std::invalid_argument("greedy_optimize: iterations must be >= 1");
        GreedyResult st;
        if (resume)
        {
            if (resume->config.rows() != rows || resume->config.cols() != 2 * physical_cols)
                throw std::invalid_argument("greedy_optimize: resumed session has different dimensions");
            st = *resume;
        }
        else
            st.config = BitMatrix(rows, 2 * physical_cols);

        auto probe = [&](StepKind kind, std::size_t it, std::size_t index) {
            try
            {
                return oracle(st.config);
            }
            catch (const std::exception &e)
            {
                throw OptimizationAborted(std::string("greedy_optimize: measurement failed during ") + to_string(kind) +
                                              " " + std::to_string(index) + " of iteration " + std::to_string(it) +
                                              ": " + e.what(),
                                          st);
            }
        };

        double p_max = st.trace.final_power();
        std::size_t it0 = st.trace.iteration_power.size();
        if (!resume)
        {
            p_max = probe(StepKind::baseline, 0, 0);
            st.trace.steps.push_back({StepKind::baseline, 0, 0, p_max, true});
            st.trace.timeline.push_back(p_max);
        }

        auto try_flip = [&](StepKind kind, std::size_t it, std::size_t index, auto &&flip) {
            flip();
            const double p = probe(kind, it, index);
            const bool keep = p > p_max;
            if (keep)
                p_max = p;
            else
                flip();
            st.trace.steps.push_back({kind, it, index, p, keep});
            st.trace.timeline.push_back(p_max);
        };

        for (std::size_t k = 0; k < iterations; ++k)
        {
            const std::size_t it = it0 + k;
            for (std::size_t c = 0; c < physical_cols; ++c)
                try_flip(StepKind::column_pair, it, c, [&] {
                    st.config.flip_column(2 * c);
                    st.config.flip_column(2 * c + 1);
                });
            for (std::size_t r = 0; r < rows; ++r)
                try_flip(StepKind::row, it, r, [&] { st.config.flip_row(r); });
            st.trace.iteration_power.push_back(p_max);
        }
        return st;
    }

    std::pair<BitMatrix, double> exhaustive_best(const PowerOracle &oracle, std::size_t rows, std::size_t physical_cols)
    {
        const std::size_t nbits = rows * 2 * physical_cols;
        if (nbits == 0 || nbits > 16)
            throw std::invalid_argument("exhaustive_best: dimension too large (" + std::to_string(nbits) +
                                        " bits, at most 16 supported)");
        BitMatrix best(rows, 2 * physical_cols);
        double best_p = 0.0;
        const std::size_t cols = 2 * physical_cols;
        for (std::uint32_t k = 0; k < (1u << nbits); ++k)
        {
            BitMatrix m(rows, cols);
            for (std::size_t b = 0; b < nbits; ++b)
                m.set(b / cols, b % cols, (k >> b) & 1u);
            const double p = oracle(m);
            if (k == 0 || p > best_p)
            {
                best = m;
                best_p = p;
            }
        }
        return {best, best_p};
    }

    double second_iteration_gain(const OptTrace &first, const OptTrace &second)
    {
        return 10.0 * std::log10(second.final_power() / first.final_power());
    }

    PhaseConfig bits_to_config(const BitMatrix &m, const BitPhases &states, Layout layout)
    {
        const std::size_t ncol = m.cols() / 2;
        const std::size_t n = m.rows() * ncol;
        std::vector<double> ph(2 * n);
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < ncol; ++c)
            {
                const std::size_t e = r * ncol + c;
                ph[e] = m.get(r, 2 * c) ? states.one : states.zero;
                ph[n + e] = m.get(r, 2 * c + 1) ? states.one : states.zero;
            }
        const bool antipodal = angular_distance(states.one, states.zero + pi) < 1e-12;
        return PhaseConfig(std::move(ph), antipodal ? Bits(1) : std::nullopt, layout);
    }
}
