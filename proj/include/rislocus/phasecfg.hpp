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

#include "rislocus/arraygeom.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rislocus
{
    // Quantization level; std::nullopt is the continuous (infinite-bit) case
    using Bits = std::optional<int>;

    enum class Layout
    {
        unipolar,
        dualpol_model1, // alternating H/V elements
        dualpol_model2  // co-located H/V elements
    };

    enum class Polarization
    {
        h,
        v
    };

    std::string to_string(Layout layout);
    Layout layout_from_string(const std::string &s);
    std::string bits_to_string(Bits bits);

    class QuantizationGrid
    {
    public:
        explicit QuantizationGrid(Bits bits, double offset = 0.0);

        static QuantizationGrid continuous() { return QuantizationGrid(std::nullopt); }
        static QuantizationGrid one_bit_quadrature() { return QuantizationGrid(1, -0.5 * pi); } // {-pi/2, pi/2}
        static QuantizationGrid one_bit_binary() { return QuantizationGrid(1, -pi); }           // {-pi, 0}

        Bits bits() const { return b; }
        double offset() const { return off; }
        std::vector<double> points() const; // index order k = 0..2^b-1

        // Nearest grid point under wrapped distance; ties go to the lower index k
        double nearest(double theta) const;

    private:
        Bits b;
        double off;
    };

    class PhaseConfig
    {
    public:
        PhaseConfig(std::vector<double> phases, Bits bits = std::nullopt, Layout layout = Layout::unipolar);

        static PhaseConfig uniform(std::size_t n, double phase, Bits bits = std::nullopt,
                                   Layout layout = Layout::unipolar);

        const std::vector<double> &phases() const { return th; }
        Bits bits() const { return b; }
        Layout layout() const { return lay; }
        std::size_t size() const { return th.size(); }
        bool dual_polarized() const { return lay != Layout::unipolar; }
        std::size_t elements_per_polarization() const { return dual_polarized() ? th.size() / 2 : th.size(); }

        CVec coefficients() const; // e^{j theta_n}
        PhaseConfig polarization(Polarization pol) const;
        PhaseConfig rotated(double global_phase) const;
        PhaseConfig negated() const; // theta -> theta + pi

    private:
        std::vector<double> th;
        Bits b;
        Layout lay;
    };

    PhaseConfig quantize(const PhaseConfig &config, const QuantizationGrid &grid);

    // Diagonal operator Phi. Dual-pol configs need an explicit polarization selection.
    Eigen::DiagonalMatrix<cdouble, Eigen::Dynamic> as_diagonal(const PhaseConfig &config,
                                                               std::optional<Polarization> pol = std::nullopt);

    // Per-element coefficients for the chosen chain (same selection rules as as_diagonal)
    CVec chain_coefficients(const PhaseConfig &config, std::optional<Polarization> pol = std::nullopt);

    // (H, V) ULAs along local y. Model 1: n_elements alternating at pol_spacing; model 2: n_elements
    // co-located pairs at pol_spacing.
    std::pair<ArrayGeometry, ArrayGeometry> dualpol_layout(int model, int n_elements, double pol_spacing,
                                                           const Pose &pose = {});

    PhaseConfig combine_dualpol(const PhaseConfig &h, const PhaseConfig &v, Layout layout);
}
