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

#include "rislocus/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rislocus
{
    SceneMeasurement::SceneMeasurement(const Scene &scene, CMat pilots, std::optional<Polarization> pol_)
        : sc(scene), H1(link_channel(scene, Link::tx_ris)), H2(link_channel(scene, Link::ris_rx)),
          Hd(link_channel(scene, Link::tx_rx)), x(std::move(pilots)), pol(pol_)
    {
        sc.validate();
        if (x.rows() != Eigen::Index(sc.tx.size()) || x.cols() < 1)
            throw std::invalid_argument("SceneMeasurement: pilot block must be N_T x N_s with N_s >= 1");
    }

    SignalBlock SceneMeasurement::measure(const PhaseConfig &config)
    {
        const std::uint64_t stream = mix_seed(sc.seed, calls);
        ++calls;
        return received(H1, H2, Hd, config, SignalBlock(x), sc.noise_power, stream, pol);
    }

    ReceivedParts SceneMeasurement::parts(const PhaseConfig &config) const
    {
        return received_parts(H1, H2, Hd, config, x, pol);
    }

    CVec mrt_precoder(const ChannelMatrix &h)
    {
        const CMat g = h.sum();
        const CMat gram = g.adjoint() * g;
        if (gram.norm() == 0.0)
        {
            CVec w = CVec::Constant(g.cols(), 1.0);
            return w / w.norm();
        }
        Eigen::SelfAdjointEigenSolver<CMat> es(gram);
        CVec w = es.eigenvectors().col(g.cols() - 1);
        // Fix the arbitrary global phase so that the first nonzero entry is real positive
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (std::abs(w[i]) > 1e-12)
            {
                w *= std::polar(1.0, -std::arg(w[i]));
                break;
            }
        return w / w.norm();
    }

    CMat make_pilots(const CVec &precoder, std::size_t n_symbols, std::uint64_t seed)
    {
        if (n_symbols < 1)
            throw std::invalid_argument("make_pilots: need at least one symbol");
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> q(0, 3);
        const double s = 1.0 / std::sqrt(2.0);
        CVec sym(Eigen::Index(n_symbols), 1);
        for (Eigen::Index k = 0; k < sym.size(); ++k)
        {
            const int v = q(rng);
            sym[k] = {(v & 1) ? s : -s, (v & 2) ? s : -s};
        }
        return precoder * sym.transpose();
    }

    SweepResult beam_sweep(const Codebook &cb, MeasurementFn &measure)
    {
        SweepResult res;
        res.powers.reserve(cb.size());
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            double p = 0.0;
            try
            {
                p = measure.power(cb[i].config);
            }
            catch (const MeasurementError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw MeasurementError(i, e.what());
            }
            res.powers.push_back(p);
            if (p > res.powers[res.best])
                res.best = i;
        }
        return res;
    }

    SignalBlock onoff_direct(MeasurementFn &measure, std::size_t config_size, Layout layout)
    {
        const auto on = PhaseConfig::uniform(config_size, 0.5 * pi, 1, layout);
        const auto off = PhaseConfig::uniform(config_size, -0.5 * pi, 1, layout);
        const SignalBlock r1 = measure.measure(on);
        const SignalBlock r2 = measure.measure(off);
        if (r1.samples.rows() != r2.samples.rows() || r1.samples.cols() != r2.samples.cols())
            throw std::runtime_error("onoff_direct: measurement blocks differ in shape");
        return SignalBlock(CMat((r1.samples + r2.samples) * 0.5), 0.5 * r1.noise_power);
    }

    CMat los_channel_estimate(double bearing, double tau, const ArrayGeometry &rx, const ArrayGeometry &ris,
                              const CarrierSpec &carrier, double elevation)
    {
        if (!(tau > 0.0))
            throw std::invalid_argument("los_channel_estimate: delay must be positive");
        const double r = speed_of_light * tau;
        const double h = freespace_amplitude(r, carrier);
        const double phi2 = std::fmod(-2.0 * pi * std::fmod(carrier.frequency() * tau, 1.0) + 2.0 * pi, 2.0 * pi);
        const CVec a_ue = array_response(rx, carrier, Direction(bearing + pi, -elevation));
        const CVec a_ris = array_response(ris, carrier, Direction(bearing, elevation));
        return (h * std::polar(1.0, phi2)) * a_ue * a_ris.adjoint();
    }

    CMat cancel_los(const CMat &r_tot, const CMat &r_los, double tau, double sampling_hz)
    {
        if (r_tot.rows() != r_los.rows())
            throw std::invalid_argument("cancel_los: antenna count mismatch");
        const Eigen::Index shift = Eigen::Index(tap_index(tau, sampling_hz));
        CMat out = r_tot;
        for (Eigen::Index n = 0; n < out.cols(); ++n)
        {
            const Eigen::Index m = n - shift;
            if (m >= 0 && m < r_los.cols())
                out.col(n) -= r_los.col(m);
        }
        return out;
    }

    std::vector<double> ue_search_grid(const LocalizeOptions &opt)
    {
        if (opt.grid_points < 2)
            throw std::invalid_argument("ue_search_grid: need at least two points");
        if (opt.front_facing)
            return linspace(-0.5 * pi, 0.5 * pi, opt.grid_points);
        auto g = linspace(-pi, pi, opt.grid_points + 1);
        g.erase(g.begin()); // (-pi, pi]
        return g;
    }

    // Single-source MUSIC over the UE grid; returns the global azimuth
    static double ue_music_aoa(const CMat &snapshots, const ArrayGeometry &rx, const CarrierSpec &carrier,
                               const LocalizeOptions &opt)
    {
        const auto grid = make_steering_grid(rx, carrier, ue_search_grid(opt));
        const auto s = music(sample_covariance(snapshots), 1, grid);
        const double local = s.axis()[s.peak_index()];
        return rx.pose().to_global(Direction(local)).azimuth();
    }

    LocalizationResult localize(MeasurementFn &measure, const Codebook &cb, const ArrayGeometry &ris,
                                const ArrayGeometry &rx, const CarrierSpec &carrier, double tau, double z,
                                const LocalizeOptions &opt)
    {
        const std::size_t start = measure.count();
        LocalizationResult res;
        const SweepResult sw = beam_sweep(cb, measure);
        res.sweep_index = sw.best;
        res.sweep_powers = sw.powers;
        res.phi_sweep = ris.pose().to_global(cb[sw.best].target).azimuth();

        if (opt.use_music)
        {
            const SignalBlock r0 = measure.measure(cb[sw.best].config);
            const SignalBlock rd = onoff_direct(measure, cb[sw.best].config.size(), cb.layout());
            res.aoa_est = ue_music_aoa(r0.samples - rd.samples, rx, carrier, opt);
            res.phi_est = wrap_angle(res.aoa_est + pi);
        }
        else
        {
            res.phi_est = res.phi_sweep;
            res.aoa_est = wrap_angle(res.phi_est + pi);
        }

        res.tau_est = tau;
        res.r_est = speed_of_light * tau;
        res.z = z;
        const Vec3 p_ris = ris.global_centroid();
        res.relative = position_from_measurements(res.phi_est, z - p_ris.z(), res.r_est);
        res.position = p_ris + res.relative;
        res.measurements = measure.count() - start;
        return res;
    }

    RayStatus intersect_rays(const Vec3 &p1, double az1, const Vec3 &p2, double az2, RayHit &hit)
    {
        const double ux = std::cos(az1), uy = std::sin(az1);
        const double vx = std::cos(az2), vy = std::sin(az2);
        const double cross = ux * vy - uy * vx;
        if (std::abs(cross) < 1e-3)
            return RayStatus::parallel;
        const double dx = p2.x() - p1.x(), dy = p2.y() - p1.y();
        const double s = (dx * vy - dy * vx) / cross;
        const double t = (dx * uy - dy * ux) / cross;
        hit.s = s;
        hit.t = t;
        hit.point = Vec3(p1.x() + s * ux, p1.y() + s * uy, p1.z());
        if (!(s > 0.0))
            return RayStatus::behind_first;
        if (!(t > 0.0))
            return RayStatus::behind_second;
        return RayStatus::hit;
    }

    const ScattererEstimate *MapResult::strongest() const
    {
        const ScattererEstimate *best = nullptr;
        for (const auto &s : scatterers)
            if (!best || s.residual_power > best->residual_power)
                best = &s;
        return best;
    }

    MapResult map_scatterers(MeasurementFn &measure, const Codebook &cb, const LocalizationResult &loc,
                             const MappingContext &ctx)
    {
        const std::size_t start = measure.count();
        const Vec3 p_ris = ctx.ris.global_centroid();
        const Vec3 normal = ctx.ris.pose().rotation.col(0);
        const double elevation = std::asin(std::clamp(loc.relative.z() / loc.r_est, -1.0, 1.0));
        const CMat h2_los = los_channel_estimate(loc.phi_est, loc.tau_est, ctx.rx, ctx.ris, ctx.carrier, elevation);
        const CMat u_los = convolve(ctx.h1_los, ctx.pilots);
        const double bin = cb.resolution() > 0.0 ? cb.resolution() : 0.0;

        MapResult res;
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            const auto &entry = cb[i];
            const SignalBlock r = measure.measure(entry.config);
            const SignalBlock rd = onoff_direct(measure, entry.config.size(), cb.layout());
            const CVec phi = chain_coefficients(entry.config, std::nullopt);
            const CMat r_los = h2_los * (phi.asDiagonal() * u_los);
            const CMat r_nlos = cancel_los(r.samples - rd.samples, r_los, loc.tau_est, ctx.sampling_hz);

            EntryDiagnostic diag;
            diag.entry = i;
            diag.residual_power = r_nlos.squaredNorm() / double(r_nlos.size());
            diag.nlos_aoa = ue_music_aoa(r_nlos, ctx.rx, ctx.carrier, ctx.music);

            if (angular_distance(diag.nlos_aoa, loc.aoa_est) <= bin)
            {
                diag.status = EntryStatus::los_only;
                res.diagnostics.push_back(diag);
                continue;
            }
            const double beam = ctx.ris.pose().to_global(entry.target).azimuth();
            RayHit hit;
            switch (intersect_rays(p_ris, beam, loc.position, diag.nlos_aoa, hit))
            {
            case RayStatus::parallel: diag.status = EntryStatus::parallel; break;
            case RayStatus::behind_first: diag.status = EntryStatus::behind_ris; break;
            case RayStatus::behind_second: diag.status = EntryStatus::behind_ue; break;
            case RayStatus::hit:
                if ((hit.point - p_ris).dot(normal) <= 0.0)
                {
                    diag.status = EntryStatus::behind_ris;
                    break;
                }
                diag.status = EntryStatus::detected;
                res.scatterers.push_back({hit.point, i, diag.nlos_aoa, diag.residual_power});
                break;
            }
            res.diagnostics.push_back(diag);
        }
        res.measurements = measure.count() - start;
        return res;
    }

    std::string to_string(EntryStatus s)
    {
        switch (s)
        {
        case EntryStatus::detected: return "detected";
        case EntryStatus::los_only: return "los_only";
        case EntryStatus::parallel: return "parallel";
        case EntryStatus::behind_ris: return "behind_ris";
        case EntryStatus::behind_ue: return "behind_ue";
        }
        return "unknown";
    }
}
