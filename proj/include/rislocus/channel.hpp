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

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rislocus
{
    enum class Link
    {
        tx_ris,
        ris_rx,
        tx_rx
    };

    struct Scatterer
    {
        Vec3 position = Vec3::Zero();
        double gain = 1.0;                                        // linear amplitude in (0, 1]
        std::vector<Link> links = {Link::tx_ris, Link::ris_rx, Link::tx_rx}; // links it contributes a bounce to
    };

    // Arrays carry their global pose. Directions in paths are global.
    struct Scene
    {
        ArrayGeometry tx = ArrayGeometry::ula(1, 0.5 * speed_of_light / 3.5e9);
        ArrayGeometry rx = ArrayGeometry::ula(1, 0.5 * speed_of_light / 3.5e9);
        ArrayGeometry ris = ArrayGeometry::ula(1, 0.5 * speed_of_light / 3.5e9);
        std::vector<Scatterer> scatterers;
        bool blocked_direct = false; // removes the Tx -> Rx line of sight
        double carrier_hz = 3.5e9;
        double sampling_hz = 100e6;
        double noise_power = 0.0;
        std::uint64_t seed = 0;
        double depolarization = 0.0;         // depolarized power fraction a
        double dispersion_deg_per_mhz = 0.0; // element phase slope for the emulator

        CarrierSpec carrier() const { return CarrierSpec(carrier_hz); }
        void validate() const;
    };

    enum class PathKind
    {
        los,
        nlos
    };

    struct PropagationPath
    {
        double gain = 0.0;  // linear amplitude
        double delay = 0.0; // s
        Direction aoa;      // at the receiver, toward the previous point
        Direction aod;      // at the transmitter, toward the next point
        PathKind kind = PathKind::los;
        std::optional<Vec3> bounce;
        double length = 0.0; // m
    };

    // Free-space amplitude lambda / (4 pi r)
    double freespace_amplitude(double r, const CarrierSpec &carrier);
    double freespace_loss_db(double r, const CarrierSpec &carrier);

    std::vector<PropagationPath> synth_paths(const Scene &scene, Link link);

    // Far-field response to a global direction, phase-referenced to the array centroid
    CVec array_response(const ArrayGeometry &geom, const CarrierSpec &carrier, const Direction &global_dir);

    std::size_t tap_index(double delay, double sampling_hz);

    struct ChannelMatrix
    {
        std::vector<CMat> taps; // taps[n] is rx x tx
        double sampling_hz = 0.0;

        static ChannelMatrix zero(Eigen::Index rows, Eigen::Index cols, double sampling_hz);

        Eigen::Index rows() const { return taps.front().rows(); }
        Eigen::Index cols() const { return taps.front().cols(); }
        std::size_t length() const { return taps.size(); }
        CMat sum() const; // narrowband (all taps collapsed)
    };

    ChannelMatrix channel_matrix(const std::vector<PropagationPath> &paths, const ArrayGeometry &tx_geom,
                                 const ArrayGeometry &rx_geom, const CarrierSpec &carrier, double sampling_hz);

    // Channel for one link of a scene; a zero single-tap channel when no path exists
    ChannelMatrix link_channel(const Scene &scene, Link link);

    struct SignalBlock
    {
        CMat samples; // antennas x time
        double noise_power = 0.0;

        SignalBlock() = default;
        SignalBlock(CMat s, double sigma2 = 0.0);

        std::size_t pilots() const { return std::size_t(samples.cols()); }
        double power() const; // mean |r|^2 over all entries
    };

    // Full linear convolution; output has x.cols() + H.length() - 1 columns
    CMat convolve(const ChannelMatrix &h, const CMat &x);

    CMat complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, std::mt19937_64 &rng);

    // r_tot = H2 * (Phi (H1 * x)) + Hd * x + w
    SignalBlock received(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                         const PhaseConfig &config, const SignalBlock &x, double noise_power, std::uint64_t seed,
                         std::optional<Polarization> pol = std::nullopt);

    // Noise-free components, padded to a common length
    struct ReceivedParts
    {
        CMat ris;
        CMat direct;
    };
    ReceivedParts received_parts(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                                 const PhaseConfig &config, const CMat &x,
                                 std::optional<Polarization> pol = std::nullopt);

    CMat narrowband_response(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                             const PhaseConfig &config, std::optional<Polarization> pol = std::nullopt);

    // (1 - a) / a; +inf at a = 0
    double xpd_ratio(double a);
}
