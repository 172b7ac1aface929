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

#include "rislocus/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rislocus
{
    PhaseConfig optimal_config(const SteeringTask &task, const ArrayGeometry &geom, const CarrierSpec &carrier,
                               PatternForm form)
    {
        const CVec a_in = steering_far(geom, carrier, task.incident);
        const CVec a_out = steering_far(geom, carrier, task.target);
        std::vector<double> th(geom.size());
        for (std::size_t n = 0; n < th.size(); ++n)
        {
            const auto i = Eigen::Index(n);
            const cdouble g = form == PatternForm::reflect ? a_in[i] * std::conj(a_out[i]) : a_in[i] * a_out[i];
            th[n] = -std::arg(g);
        }
        return PhaseConfig(std::move(th), std::nullopt, Layout::unipolar);
    }

    static double response_power(const CVec &w, const CVec &a_in, const CVec &a_eval, bool conjugate)
    {
        cdouble acc = 0.0;
        for (Eigen::Index n = 0; n < w.size(); ++n)
            acc += w[n] * a_in[n] * (conjugate ? std::conj(a_eval[n]) : a_eval[n]);
        return std::norm(acc);
    }

    static void check_unipolar(const PhaseConfig &config, const ArrayGeometry &geom)
    {
        if (config.dual_polarized())
            throw std::invalid_argument("pattern: dual-pol config passed to a single-polarization pattern");
        if (config.size() != geom.size())
            throw std::invalid_argument("pattern: size mismatch between config (" + std::to_string(config.size()) +
                                        ") and geometry (" + std::to_string(geom.size()) + ")");
    }

    double pattern_reflect(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                           const CarrierSpec &carrier, const Direction &eval)
    {
        check_unipolar(config, geom);
        return response_power(config.coefficients(), steering_far(geom, carrier, incident),
                              steering_far(geom, carrier, eval), true);
    }

    double pattern_dualpol(const PhaseConfig &config_h, const PhaseConfig &config_v, const Direction &incident,
                           const ArrayGeometry &geom_h, const ArrayGeometry &geom_v, const CarrierSpec &carrier,
                           const Direction &eval)
    {
        check_unipolar(config_h, geom_h);
        check_unipolar(config_v, geom_v);
        return response_power(config_h.coefficients(), steering_far(geom_h, carrier, incident),
                              steering_far(geom_h, carrier, eval), false) +
               response_power(config_v.coefficients(), steering_far(geom_v, carrier, incident),
                              steering_far(geom_v, carrier, eval), false);
    }

    static void check_grid(const std::vector<double> &g)
    {
        if (g.empty())
            throw std::invalid_argument("sweep: empty evaluation grid");
    }

    Spectrum sweep_reflect(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                           const CarrierSpec &carrier, const std::vector<double> &azimuths, double elevation)
    {
        check_grid(azimuths);
        check_unipolar(config, geom);
        const CVec w = config.coefficients();
        const CVec a_in = steering_far(geom, carrier, incident);
        std::vector<double> v(azimuths.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = response_power(w, a_in, steering_far(geom, carrier, Direction(azimuths[i], elevation)), true);
        return Spectrum(azimuths, std::move(v));
    }

    Spectrum sweep_dualpol(const PhaseConfig &config_h, const PhaseConfig &config_v, const Direction &incident,
                           const ArrayGeometry &geom_h, const ArrayGeometry &geom_v, const CarrierSpec &carrier,
                           const std::vector<double> &azimuths, double elevation)
    {
        check_grid(azimuths);
        check_unipolar(config_h, geom_h);
        check_unipolar(config_v, geom_v);
        const CVec wh = config_h.coefficients(), wv = config_v.coefficients();
        const CVec ah = steering_far(geom_h, carrier, incident), av = steering_far(geom_v, carrier, incident);
        std::vector<double> v(azimuths.size());
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            const Direction d(azimuths[i], elevation);
            v[i] = response_power(wh, ah, steering_far(geom_h, carrier, d), false) +
                   response_power(wv, av, steering_far(geom_v, carrier, d), false);
        }
        return Spectrum(azimuths, std::move(v));
    }

    Spectrum sweep_reflect_2d(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                              const CarrierSpec &carrier, const std::vector<double> &azimuths,
                              const std::vector<double> &elevations)
    {
        check_grid(azimuths);
        check_grid(elevations);
        check_unipolar(config, geom);
        const CVec w = config.coefficients();
        const CVec a_in = steering_far(geom, carrier, incident);
        std::vector<double> v;
        v.reserve(azimuths.size() * elevations.size());
        for (double az : azimuths)
            for (double el : elevations)
                v.push_back(response_power(w, a_in, steering_far(geom, carrier, Direction(az, el)), true));
        return Spectrum(azimuths, elevations, std::move(v));
    }

    std::vector<double> default_azimuth_grid(std::size_t points)
    {
        return linspace(-0.5 * pi, 0.5 * pi, points);
    }

    Codebook::Codebook(Direction incident, std::vector<CodebookEntry> entries) : inc(incident), ent(std::move(entries))
    {
        if (ent.empty())
            throw std::invalid_argument("Codebook: no entries");
        for (std::size_t i = 0; i < ent.size(); ++i)
        {
            if (ent[i].config.bits() != ent[0].config.bits() || ent[i].config.layout() != ent[0].config.layout())
                throw std::invalid_argument("Codebook: entries must share bits and layout");
            if (ent[i].config.size() != ent[0].config.size())
                throw std::invalid_argument("Codebook: entries must share the element count");
            if (i > 0 && !(ent[i].target.azimuth() > ent[i - 1].target.azimuth()))
                throw std::invalid_argument("Codebook: targets must be strictly increasing in azimuth");
        }
    }

    double Codebook::resolution() const
    {
        if (ent.size() < 2)
            return 0.0;
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < ent.size(); ++i)
            r = std::min(r, ent[i].target.azimuth() - ent[i - 1].target.azimuth());
        return r;
    }

    Codebook Codebook::rotated(double global_phase) const
    {
        std::vector<CodebookEntry> e;
        e.reserve(ent.size());
        for (const auto &x : ent)
            e.push_back({x.target, x.config.rotated(global_phase)});
        return Codebook(inc, std::move(e));
    }

    Codebook build_codebook(const Direction &incident, const std::vector<double> &target_azimuths,
                            const ArrayGeometry &geom, const CarrierSpec &carrier, const QuantizationGrid &grid,
                            double target_elevation, PatternForm form)
    {
        if (target_azimuths.empty())
            throw std::invalid_argument("build_codebook: no targets");
        std::vector<CodebookEntry> entries;
        entries.reserve(target_azimuths.size());
        for (double az : target_azimuths)
        {
            const Direction target(az, target_elevation);
            entries.push_back({target, quantize(optimal_config({incident, target}, geom, carrier, form), grid)});
        }
        return Codebook(incident, std::move(entries));
    }

    std::vector<double> grating_directions(const CarrierSpec &carrier, double same_pol_pitch, double target_azimuth)
    {
        if (!(same_pol_pitch > 0.0))
            throw std::invalid_argument("grating_directions: pitch must be positive");
        const double ratio = carrier.wavelength() / same_pol_pitch;
        const double s0 = std::sin(target_azimuth);
        std::vector<double> out;
        const int mmax = int(std::ceil(2.0 / ratio)) + 1;
        for (int m = -mmax; m <= mmax; ++m)
        {
            if (m == 0)
                continue;
            const double s = s0 + double(m) * ratio;
            if (s < -1.0 - 1e-12 || s > 1.0 + 1e-12)
                continue;
            const double g = std::asin(std::clamp(s, -1.0, 1.0));
            out.push_back(g);
            const double back = wrap_angle(pi - g);
            if (angular_distance(back, g) > 1e-12)
                out.push_back(back);
        }
        return out;
    }

    LobeReport analyze_lobes(const Spectrum &s, const CarrierSpec &carrier, double same_pol_pitch,
                             const Direction & /*incident*/, const Direction &target)
    {
        if (s.dims() != 1)
            throw std::invalid_argument("analyze_lobes: azimuth spectrum expected");
        const auto &ax = s.axis();
        const auto &v = s.values();
        const std::size_t n = v.size();

        std::vector<std::size_t> maxima;
        for (std::size_t i = 0; i < n; ++i)
        {
            const bool left = i == 0 ? (n > 1 && v[0] > v[1]) : v[i] > v[i - 1];
            const bool right = i + 1 == n ? true : v[i] >= v[i + 1];
            if (left && right && (i > 0 || n > 1))
                maxima.push_back(i);
        }

        // Among (numerically) tied maxima prefer the one nearest the steering target
        const double vmax = s.peak_value();
        std::size_t main = s.peak_index();
        double best_dist = angular_distance(ax[main], target.azimuth());
        for (std::size_t i : maxima)
        {
            if (v[i] >= vmax * (1.0 - 1e-9))
            {
                const double d = angular_distance(ax[i], target.azimuth());
                if (d < best_dist)
                {
                    best_dist = d;
                    main = i;
                }
            }
        }

        LobeReport rep;
        rep.main_lobe = {Direction(ax[main]), 0.0, main};
        if (!(vmax > 0.0))
            return rep;

        const auto grating = grating_directions(carrier, same_pol_pitch, target.azimuth());
        const double bin = s.resolution();
        for (std::size_t i : maxima)
        {
            if (i == main)
                continue;
            const double rel = 10.0 * std::log10(v[i] / v[main]);
            if (!(rel > -120.0))
                continue;
            const Lobe lobe{Direction(ax[i]), std::min(rel, 0.0), i};
            rep.sidelobes.push_back(lobe);
            for (double g : grating)
                if (angular_distance(ax[i], g) <= bin * (1.0 + 1e-9))
                {
                    rep.grating_lobes.push_back(lobe);
                    break;
                }
        }
        return rep;
    }

    double beamwidth_3db(const Spectrum &s, std::size_t index)
    {
        if (s.dims() != 1)
            throw std::invalid_argument("beamwidth_3db: azimuth spectrum expected");
        const auto &a = s.axis();
        const auto &v = s.values();
        if (index >= v.size())
            throw std::out_of_range("beamwidth_3db: index out of range");
        const double half = 0.5 * v[index];

        std::size_t i = index;
        while (i > 0 && v[i - 1] >= half)
            --i;
        double left = a[i];
        if (i > 0)
            left = a[i - 1] + (half - v[i - 1]) / (v[i] - v[i - 1]) * (a[i] - a[i - 1]);

        std::size_t j = index;
        while (j + 1 < v.size() && v[j + 1] >= half)
            ++j;
        double right = a[j];
        if (j + 1 < v.size())
            right = a[j] + (v[j] - half) / (v[j] - v[j + 1]) * (a[j + 1] - a[j]);
        return right - left;
    }
}
