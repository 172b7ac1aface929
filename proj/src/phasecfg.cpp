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

#include "rislocus/phasecfg.hpp"

#include <cmath>
#include <stdexcept>

namespace rislocus
{
    std::string to_string(Layout layout)
    {
        switch (layout)
        {
        case Layout::unipolar: return "unipolar";
        case Layout::dualpol_model1: return "dualpol_model1";
        case Layout::dualpol_model2: return "dualpol_model2";
        }
        return "unipolar";
    }

    Layout layout_from_string(const std::string &s)
    {
        if (s == "unipolar")
            return Layout::unipolar;
        if (s == "dualpol_model1")
            return Layout::dualpol_model1;
        if (s == "dualpol_model2")
            return Layout::dualpol_model2;
        throw std::invalid_argument("unknown layout '" + s + "'");
    }

    std::string bits_to_string(Bits bits)
    {
        return bits ? std::to_string(*bits) : std::string("inf");
    }

    static void check_bits(Bits bits)
    {
        if (bits && (*bits < 1 || *bits > 16))
            throw std::invalid_argument("quantization bits must be in 1..16 or infinite");
    }

    QuantizationGrid::QuantizationGrid(Bits bits, double offset) : b(bits), off(wrap_angle(offset))
    {
        check_bits(bits);
    }

    std::vector<double> QuantizationGrid::points() const
    {
        if (!b)
            return {};
        const std::size_t levels = std::size_t(1) << *b;
        std::vector<double> p(levels);
        for (std::size_t k = 0; k < levels; ++k)
            p[k] = wrap_angle(off + 2.0 * pi * double(k) / double(levels));
        return p;
    }

    double QuantizationGrid::nearest(double theta) const
    {
        if (!b)
            return wrap_angle(theta);
        const auto pts = points();
        double best = pts[0];
        double best_d = angular_distance(theta, pts[0]);
        for (std::size_t k = 1; k < pts.size(); ++k)
        {
            const double d = angular_distance(theta, pts[k]);
            if (d < best_d - 1e-12)
            {
                best_d = d;
                best = pts[k];
            }
        }
        return best;
    }

    PhaseConfig::PhaseConfig(std::vector<double> phases, Bits bits, Layout layout)
        : th(std::move(phases)), b(bits), lay(layout)
    {
        check_bits(bits);
        if (th.empty())
            throw std::invalid_argument("PhaseConfig: empty phase vector");
        if (dual_polarized() && th.size() % 2 != 0)
            throw std::invalid_argument("PhaseConfig: dual-pol config needs an even phase count (H then V)");
        for (auto &t : th)
            t = wrap_angle(t);
        if (b)
        {
            const double step = 2.0 * pi / double(std::size_t(1) << *b);
            for (double t : th)
            {
                const double q = (t - th[0]) / step;
                if (std::abs(q - std::nearbyint(q)) > 1e-9)
                    throw std::invalid_argument("PhaseConfig: phase " + std::to_string(t) + " is off the " +
                                                std::to_string(*b) + "-bit grid");
            }
        }
    }

    PhaseConfig PhaseConfig::uniform(std::size_t n, double phase, Bits bits, Layout layout)
    {
        return PhaseConfig(std::vector<double>(n, phase), bits, layout);
    }

    CVec PhaseConfig::coefficients() const
    {
        CVec c(Eigen::Index(th.size()));
        for (std::size_t n = 0; n < th.size(); ++n)
            c[Eigen::Index(n)] = unit_phasor(th[n]);
        return c;
    }

    PhaseConfig PhaseConfig::polarization(Polarization pol) const
    {
        if (!dual_polarized())
            throw std::invalid_argument("PhaseConfig: polarization selection on a unipolar config");
        const std::size_t half = th.size() / 2;
        const auto first = th.begin() + std::ptrdiff_t(pol == Polarization::h ? 0 : half);
        return PhaseConfig(std::vector<double>(first, first + std::ptrdiff_t(half)), b, Layout::unipolar);
    }

    PhaseConfig PhaseConfig::rotated(double global_phase) const
    {
        auto p = th;
        for (auto &t : p)
            t += global_phase;
        return PhaseConfig(std::move(p), b, lay);
    }

    PhaseConfig PhaseConfig::negated() const { return rotated(pi); }

    PhaseConfig quantize(const PhaseConfig &config, const QuantizationGrid &grid)
    {
        if (!grid.bits())
            return config;
        std::vector<double> q(config.size());
        for (std::size_t n = 0; n < q.size(); ++n)
            q[n] = grid.nearest(config.phases()[n]);
        return PhaseConfig(std::move(q), grid.bits(), config.layout());
    }

    CVec chain_coefficients(const PhaseConfig &config, std::optional<Polarization> pol)
    {
        if (config.dual_polarized())
        {
            if (!pol)
                throw std::invalid_argument(
                    "layout mismatch: dual-pol config applied to a unipolar channel without a polarization selection");
            return config.polarization(*pol).coefficients();
        }
        return config.coefficients();
    }

    Eigen::DiagonalMatrix<cdouble, Eigen::Dynamic> as_diagonal(const PhaseConfig &config,
                                                               std::optional<Polarization> pol)
    {
        return Eigen::DiagonalMatrix<cdouble, Eigen::Dynamic>(chain_coefficients(config, pol));
    }

    std::pair<ArrayGeometry, ArrayGeometry> dualpol_layout(int model, int n_elements, double pol_spacing,
                                                           const Pose &pose)
    {
        if (!(pol_spacing > 0.0))
            throw std::invalid_argument("dualpol_layout: spacing must be positive");
        if (model == 1)
        {
            if (n_elements < 2 || n_elements % 2 != 0)
                throw std::invalid_argument("dualpol_layout: model 1 needs an even element count");
            const auto h = ArrayGeometry::ula(n_elements / 2, 2.0 * pol_spacing, pose);
            return {h, h.shifted(Vec3(0.0, pol_spacing, 0.0))};
        }
        if (model == 2)
        {
            if (n_elements < 1)
                throw std::invalid_argument("dualpol_layout: element count must be >= 1");
            const auto h = ArrayGeometry::ula(n_elements, pol_spacing, pose);
            return {h, h};
        }
        throw std::invalid_argument("dualpol_layout: model must be 1 or 2");
    }

    PhaseConfig combine_dualpol(const PhaseConfig &h, const PhaseConfig &v, Layout layout)
    {
        if (layout == Layout::unipolar)
            throw std::invalid_argument("combine_dualpol: layout must be dual-polarized");
        if (h.size() != v.size())
            throw std::invalid_argument("combine_dualpol: H and V configs differ in size");
        if (h.bits() != v.bits())
            throw std::invalid_argument("combine_dualpol: H and V configs differ in quantization");
        std::vector<double> p = h.phases();
        p.insert(p.end(), v.phases().begin(), v.phases().end());
        return PhaseConfig(std::move(p), h.bits(), layout);
    }
}
