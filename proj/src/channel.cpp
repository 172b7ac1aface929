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

#include "rislocus/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rislocus
{
    void Scene::validate() const
    {
        CarrierSpec c(carrier_hz);
        (void)c;
        if (!(sampling_hz > 0.0))
            throw std::invalid_argument("Scene: sampling rate must be positive");
        if (!(noise_power >= 0.0))
            throw std::invalid_argument("Scene: noise power must be non-negative");
        if (!(depolarization >= 0.0 && depolarization < 1.0))
            throw std::invalid_argument("Scene: depolarization fraction must be in [0, 1)");
        std::vector<Vec3> pts = {tx.global_centroid(), rx.global_centroid(), ris.global_centroid()};
        for (const auto &s : scatterers)
        {
            if (!(s.gain > 0.0 && s.gain <= 1.0))
                throw std::invalid_argument("Scene: scatterer gain must be in (0, 1]");
            pts.push_back(s.position);
        }
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if ((pts[i] - pts[j]).norm() < 1e-9)
                    throw std::invalid_argument("Scene: node positions must be distinct");
    }

    double freespace_amplitude(double r, const CarrierSpec &carrier)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("freespace: range must be positive");
        return carrier.wavelength() / (4.0 * pi * r);
    }

    double freespace_loss_db(double r, const CarrierSpec &carrier)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("freespace_loss_db: range must be positive");
        return 20.0 * std::log10(4.0 * pi * r / carrier.wavelength());
    }

    static bool has_link(const Scatterer &s, Link l)
    {
        for (Link x : s.links)
            if (x == l)
                return true;
        return false;
    }

    std::vector<PropagationPath> synth_paths(const Scene &scene, Link link)
    {
        const CarrierSpec carrier = scene.carrier();
        const ArrayGeometry *a = nullptr, *b = nullptr;
        switch (link)
        {
        case Link::tx_ris: a = &scene.tx, b = &scene.ris; break;
        case Link::ris_rx: a = &scene.ris, b = &scene.rx; break;
        case Link::tx_rx: a = &scene.tx, b = &scene.rx; break;
        }
        const Vec3 pa = a->global_centroid(), pb = b->global_centroid();

        std::vector<PropagationPath> paths;
        if (!(link == Link::tx_rx && scene.blocked_direct))
        {
            PropagationPath p;
            p.length = (pb - pa).norm();
            p.gain = freespace_amplitude(p.length, carrier);
            p.delay = p.length / speed_of_light;
            p.aod = Direction::from_vector(pb - pa);
            p.aoa = Direction::from_vector(pa - pb);
            p.kind = PathKind::los;
            paths.push_back(p);
        }
        for (const auto &s : scene.scatterers)
        {
            if (!has_link(s, link))
                continue;
            PropagationPath p;
            p.length = (s.position - pa).norm() + (pb - s.position).norm();
            p.gain = s.gain * freespace_amplitude(p.length, carrier);
            p.delay = p.length / speed_of_light;
            p.aod = Direction::from_vector(s.position - pa);
            p.aoa = Direction::from_vector(s.position - pb);
            p.kind = PathKind::nlos;
            p.bounce = s.position;
            paths.push_back(p);
        }
        return paths;
    }

    CVec array_response(const ArrayGeometry &geom, const CarrierSpec &carrier, const Direction &global_dir)
    {
        const Direction local = geom.pose().to_local(global_dir);
        const double ref = wave_vector(carrier, local).dot(geom.centroid());
        return steering_far(geom, carrier, local) * std::polar(1.0, ref);
    }

    std::size_t tap_index(double delay, double sampling_hz)
    {
        if (!(delay >= 0.0))
            throw std::invalid_argument("tap_index: negative delay");
        return std::size_t(std::floor(delay * sampling_hz));
    }

    ChannelMatrix ChannelMatrix::zero(Eigen::Index rows, Eigen::Index cols, double sampling_hz)
    {
        ChannelMatrix h;
        h.taps.push_back(CMat::Zero(rows, cols));
        h.sampling_hz = sampling_hz;
        return h;
    }

    CMat ChannelMatrix::sum() const
    {
        CMat s = CMat::Zero(rows(), cols());
        for (const auto &t : taps)
            s += t;
        return s;
    }

    ChannelMatrix channel_matrix(const std::vector<PropagationPath> &paths, const ArrayGeometry &tx_geom,
                                 const ArrayGeometry &rx_geom, const CarrierSpec &carrier, double sampling_hz)
    {
        if (paths.empty())
            throw std::invalid_argument("channel_matrix: no paths");
        if (!(sampling_hz > 0.0))
            throw std::invalid_argument("channel_matrix: sampling rate must be positive");
        std::size_t len = 0;
        for (const auto &p : paths)
            len = std::max(len, tap_index(p.delay, sampling_hz) + 1);

        const auto nr = Eigen::Index(rx_geom.size()), nt = Eigen::Index(tx_geom.size());
        ChannelMatrix h;
        h.sampling_hz = sampling_hz;
        h.taps.assign(len, CMat::Zero(nr, nt));
        for (const auto &p : paths)
        {
            const cdouble g = p.gain * std::polar(1.0, -2.0 * pi * std::fmod(p.delay * carrier.frequency(), 1.0));
            const CVec ar = array_response(rx_geom, carrier, p.aoa);
            const CVec at = array_response(tx_geom, carrier, p.aod);
            h.taps[tap_index(p.delay, sampling_hz)] += g * ar * at.adjoint();
        }
        return h;
    }

    ChannelMatrix link_channel(const Scene &scene, Link link)
    {
        const ArrayGeometry &a = link == Link::ris_rx ? scene.ris : scene.tx;
        const ArrayGeometry &b = link == Link::tx_ris ? scene.ris : scene.rx;
        const auto paths = synth_paths(scene, link);
        if (paths.empty())
            return ChannelMatrix::zero(Eigen::Index(b.size()), Eigen::Index(a.size()), scene.sampling_hz);
        return channel_matrix(paths, a, b, scene.carrier(), scene.sampling_hz);
    }

    SignalBlock::SignalBlock(CMat s, double sigma2) : samples(std::move(s)), noise_power(sigma2)
    {
        if (samples.cols() < 1 || samples.rows() < 1)
            throw std::invalid_argument("SignalBlock: needs at least one antenna and one sample");
    }

    double SignalBlock::power() const
    {
        if (samples.size() == 0)
            return 0.0;
        return samples.squaredNorm() / double(samples.size());
    }

    CMat convolve(const ChannelMatrix &h, const CMat &x)
    {
        if (h.cols() != x.rows())
            throw std::invalid_argument("convolve: dimension mismatch (" + std::to_string(h.cols()) + " tx vs " +
                                        std::to_string(x.rows()) + " signal rows)");
        const Eigen::Index L = Eigen::Index(h.length()), T = x.cols();
        CMat y = CMat::Zero(h.rows(), T + L - 1);
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const CMat &tap = h.taps[std::size_t(l)];
            if (tap.isZero(0.0))
                continue;
            y.middleCols(l, T).noalias() += tap * x;
        }
        return y;
    }

    CMat complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
        CMat w(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                w(r, c) = {re, im};
            }
        return w;
    }

    static CMat pad_cols(const CMat &m, Eigen::Index cols)
    {
        CMat out = CMat::Zero(m.rows(), cols);
        out.leftCols(m.cols()) = m;
        return out;
    }

    ReceivedParts received_parts(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                                 const PhaseConfig &config, const CMat &x, std::optional<Polarization> pol)
    {
        const CVec phi = chain_coefficients(config, pol);
        if (phi.size() != h1.rows() || phi.size() != h2.cols())
            throw std::invalid_argument("received: RIS config size does not match the cascaded channels");
        if (h2.rows() != hd.rows() || h1.cols() != hd.cols())
            throw std::invalid_argument("received: direct channel dimensions do not match the cascade");
        CMat u = convolve(h1, x);
        u = phi.asDiagonal() * u;
        CMat r_ris = convolve(h2, u);
        CMat r_d = convolve(hd, x);
        const Eigen::Index len = std::max(r_ris.cols(), r_d.cols());
        return {pad_cols(r_ris, len), pad_cols(r_d, len)};
    }

    SignalBlock received(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                         const PhaseConfig &config, const SignalBlock &x, double noise_power, std::uint64_t seed,
                         std::optional<Polarization> pol)
    {
        if (!(noise_power >= 0.0))
            throw std::invalid_argument("received: noise power must be non-negative");
        const auto parts = received_parts(h1, h2, hd, config, x.samples, pol);
        CMat r = parts.ris + parts.direct;
        if (noise_power > 0.0)
        {
            std::mt19937_64 rng(seed);
            r += complex_gaussian(r.rows(), r.cols(), noise_power, rng);
        }
        return SignalBlock(std::move(r), noise_power);
    }

    CMat narrowband_response(const ChannelMatrix &h1, const ChannelMatrix &h2, const ChannelMatrix &hd,
                             const PhaseConfig &config, std::optional<Polarization> pol)
    {
        const CVec phi = chain_coefficients(config, pol);
        if (phi.size() != h1.rows() || phi.size() != h2.cols())
            throw std::invalid_argument("narrowband_response: RIS config size does not match the cascaded channels");
        return hd.sum() + h2.sum() * phi.asDiagonal() * h1.sum();
    }

    double xpd_ratio(double a)
    {
        if (!(a >= 0.0 && a < 1.0))
            throw std::invalid_argument("xpd_ratio: depolarized fraction must lie in [0, 1)");
        if (a == 0.0)
            return std::numeric_limits<double>::infinity();
        return (1.0 - a) / a;
    }
}
