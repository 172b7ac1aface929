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

#include "rislocus/channel.hpp"
#include "rislocus/pattern.hpp"
#include "rislocus/spectral.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rislocus
{
    // Power oracle driving the sweep: applies a RIS config and returns the received block
    class MeasurementFn
    {
    public:
        virtual ~MeasurementFn() = default;
        virtual SignalBlock measure(const PhaseConfig &config) = 0;
        double power(const PhaseConfig &config) { return measure(config).power(); }
        std::size_t count() const { return calls; }

    protected:
        std::size_t calls = 0;
    };

    // Simulated scene. Each call draws fresh noise from (seed, call counter).
    class SceneMeasurement : public MeasurementFn
    {
    public:
        SceneMeasurement(const Scene &scene, CMat pilots, std::optional<Polarization> pol = std::nullopt);

        SignalBlock measure(const PhaseConfig &config) override;
        ReceivedParts parts(const PhaseConfig &config) const; // noiseless components

        const ChannelMatrix &h1() const { return H1; }
        const ChannelMatrix &h2() const { return H2; }
        const ChannelMatrix &hd() const { return Hd; }
        const CMat &pilots() const { return x; }
        const Scene &scene() const { return sc; }

    private:
        Scene sc;
        ChannelMatrix H1, H2, Hd;
        CMat x;
        std::optional<Polarization> pol;
    };

    // Unit-norm principal right singular vector of the collapsed channel (maximum ratio transmission)
    CVec mrt_precoder(const ChannelMatrix &h);

    // N_T x N_s block: precoder times seeded unit-power QPSK symbols
    CMat make_pilots(const CVec &precoder, std::size_t n_symbols, std::uint64_t seed);

    class MeasurementError : public std::runtime_error
    {
    public:
        MeasurementError(std::size_t entry, const std::string &what)
            : std::runtime_error("measurement failed at codebook entry " + std::to_string(entry) + ": " + what),
              index(entry)
        {
        }
        std::size_t entry() const { return index; }

    private:
        std::size_t index;
    };

    struct SweepResult
    {
        std::size_t best = 0; // first maximum
        std::vector<double> powers;
    };

    SweepResult beam_sweep(const Codebook &cb, MeasurementFn &measure);

    // (r1 + r2) / 2 under Phi = +jI and Phi = -jI
    SignalBlock onoff_direct(MeasurementFn &measure, std::size_t config_size, Layout layout = Layout::unipolar);

    // Rank-1 LoS RIS -> UE channel (N_R x N_RIS). `bearing` is the global azimuth from the RIS to the
    // UE and `elevation` the corresponding elevation.
    CMat los_channel_estimate(double bearing, double tau, const ArrayGeometry &rx, const ArrayGeometry &ris,
                              const CarrierSpec &carrier, double elevation = 0.0);

    // r_nlos[n] = r_tot[n] - r_los[n - floor(tau F_s)]
    CMat cancel_los(const CMat &r_tot, const CMat &r_los, double tau, double sampling_hz);

    struct LocalizeOptions
    {
        bool use_music = true;
        bool front_facing = true; // restrict the UE search to its front half-plane
        std::size_t grid_points = 1801;
    };

    // UE-local azimuth grid used by the MUSIC step
    std::vector<double> ue_search_grid(const LocalizeOptions &opt);

    struct LocalizationResult
    {
        std::size_t sweep_index = 0;
        std::vector<double> sweep_powers;
        double phi_sweep = 0.0; // bearing RIS -> UE implied by the selected entry (global)
        double aoa_est = 0.0;   // azimuth at the UE toward the RIS (global)
        double phi_est = 0.0;   // bearing RIS -> UE (global)
        double tau_est = 0.0;
        double r_est = 0.0;
        double z = 0.0;         // UE height
        Vec3 relative = Vec3::Zero(); // position_from_measurements(phi_est, z - z_ris, r_est)
        Vec3 position = Vec3::Zero(); // global
        std::size_t measurements = 0;
    };

    // Sweep, ON/OFF residual, single-source MUSIC at the UE, then ranging. Only the orientation and
    // layout of `rx` are used; its position is what is being estimated.
    LocalizationResult localize(MeasurementFn &measure, const Codebook &cb, const ArrayGeometry &ris,
                                const ArrayGeometry &rx, const CarrierSpec &carrier, double tau, double z,
                                const LocalizeOptions &opt = {});

    struct RayHit
    {
        Vec3 point = Vec3::Zero();
        double s = 0.0; // distance along the first ray
        double t = 0.0; // distance along the second ray
    };

    enum class RayStatus
    {
        hit,
        parallel,
        behind_first,
        behind_second
    };

    // Intersection of two azimuth-plane rays p + s (cos a, sin a). The z of the hit is p1.z().
    RayStatus intersect_rays(const Vec3 &p1, double az1, const Vec3 &p2, double az2, RayHit &hit);

    struct ScattererEstimate
    {
        Vec3 position = Vec3::Zero();
        std::size_t entry = 0;
        double nlos_aoa = 0.0;        // global azimuth at the UE
        double residual_power = 0.0;  // after ON/OFF and LoS cancellation
    };

    enum class EntryStatus
    {
        detected,
        los_only,
        parallel,
        behind_ris,
        behind_ue
    };

    struct EntryDiagnostic
    {
        std::size_t entry = 0;
        double nlos_aoa = 0.0;
        double residual_power = 0.0;
        EntryStatus status = EntryStatus::los_only;
    };

    struct MapResult
    {
        std::vector<ScattererEstimate> scatterers;
        std::vector<EntryDiagnostic> diagnostics;
        std::size_t measurements = 0;

        // Detection with the largest residual power, or nullptr
        const ScattererEstimate *strongest() const;
    };

    struct MappingContext
    {
        ArrayGeometry ris;
        ArrayGeometry rx;
        ChannelMatrix h1_los; // known AP -> RIS line of sight
        CMat pilots;
        CarrierSpec carrier;
        double sampling_hz;
        LocalizeOptions music{};
    };

    MapResult map_scatterers(MeasurementFn &measure, const Codebook &cb, const LocalizationResult &loc,
                             const MappingContext &ctx);

    std::string to_string(EntryStatus s);
}
