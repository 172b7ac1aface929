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
#include "rislocus/phasecfg.hpp"
#include "rislocus/spectrum.hpp"

#include <vector>

namespace rislocus
{
    // Directions are in the array's local frame
    struct SteeringTask
    {
        Direction incident;
        Direction target;
    };

    // reflect:      A = |w^T (a(AoA) .* conj(a(phi)))|^2
    // array_factor: A = |w^T (a(AoA) .* a(phi))|^2   (dual-pol power-domain form)
    enum class PatternForm
    {
        reflect,
        array_factor
    };

    // Maximum-ratio phases: every element contribution co-phased at the target
    PhaseConfig optimal_config(const SteeringTask &task, const ArrayGeometry &geom, const CarrierSpec &carrier,
                               PatternForm form = PatternForm::reflect);

    double pattern_reflect(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                           const CarrierSpec &carrier, const Direction &eval);

    double pattern_dualpol(const PhaseConfig &config_h, const PhaseConfig &config_v, const Direction &incident,
                           const ArrayGeometry &geom_h, const ArrayGeometry &geom_v, const CarrierSpec &carrier,
                           const Direction &eval);

    // Sweeps over azimuth at a fixed elevation
    Spectrum sweep_reflect(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                           const CarrierSpec &carrier, const std::vector<double> &azimuths, double elevation = 0.0);

    Spectrum sweep_dualpol(const PhaseConfig &config_h, const PhaseConfig &config_v, const Direction &incident,
                           const ArrayGeometry &geom_h, const ArrayGeometry &geom_v, const CarrierSpec &carrier,
                           const std::vector<double> &azimuths, double elevation = 0.0);

    // Azimuth x elevation product grid (axis 0 = azimuth)
    Spectrum sweep_reflect_2d(const PhaseConfig &config, const Direction &incident, const ArrayGeometry &geom,
                              const CarrierSpec &carrier, const std::vector<double> &azimuths,
                              const std::vector<double> &elevations);

    // 721 points over [-pi/2, pi/2]
    std::vector<double> default_azimuth_grid(std::size_t points = 721);

    struct CodebookEntry
    {
        Direction target;
        PhaseConfig config;
    };

    class Codebook
    {
    public:
        Codebook(Direction incident, std::vector<CodebookEntry> entries);

        const Direction &incident() const { return inc; }
        Bits bits() const { return ent.front().config.bits(); }
        Layout layout() const { return ent.front().config.layout(); }
        const std::vector<CodebookEntry> &entries() const { return ent; }
        std::size_t size() const { return ent.size(); }
        const CodebookEntry &operator[](std::size_t i) const { return ent.at(i); }

        // Smallest azimuth spacing between consecutive targets (0 for one entry)
        double resolution() const;

        Codebook rotated(double global_phase) const;

    private:
        Direction inc;
        std::vector<CodebookEntry> ent;
    };

    Codebook build_codebook(const Direction &incident, const std::vector<double> &target_azimuths,
                            const ArrayGeometry &geom, const CarrierSpec &carrier, const QuantizationGrid &grid,
                            double target_elevation = 0.0, PatternForm form = PatternForm::reflect);

    struct Lobe
    {
        Direction direction;
        double level_db = 0.0; // relative to the main lobe
        std::size_t index = 0; // grid index in the source spectrum
    };

    struct LobeReport
    {
        Lobe main_lobe;
        std::vector<Lobe> sidelobes;
        std::vector<Lobe> grating_lobes; // subset of sidelobes
    };

    // Azimuth spectrum only. Lobes more than 120 dB below the main lobe are ignored. A sidelobe
    // is grating when sin(phi) = sin(target) + m lambda / d for some m != 0 within one grid bin.
    LobeReport analyze_lobes(const Spectrum &s, const CarrierSpec &carrier, double same_pol_pitch,
                             const Direction &incident, const Direction &target);

    // Analytic grating directions (azimuth) inside (-pi, pi] for a steered target
    std::vector<double> grating_directions(const CarrierSpec &carrier, double same_pol_pitch, double target_azimuth);

    // 3 dB width of the lobe containing `index`, linearly interpolated between samples
    double beamwidth_3db(const Spectrum &s, std::size_t index);
    inline double beamwidth_3db(const Spectrum &s) { return beamwidth_3db(s, s.peak_index()); }
}
