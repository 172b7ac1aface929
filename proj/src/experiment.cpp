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

#include "rislocus/experiment.hpp"

#include "rislocus/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <filesystem>
#include <random>
#include <sstream>

namespace rislocus
{
    std::vector<Vec3> UeGrid::points(double z) const
    {
        if (nx < 1 || ny < 1)
            throw std::invalid_argument("UeGrid: counts must be >= 1");
        std::vector<Vec3> out;
        const auto xs = linspace(x_min, x_max, nx);
        const auto ys = linspace(y_min, y_max, ny);
        for (double y : ys)
            for (double x : xs)
                out.emplace_back(x, y, z);
        return out;
    }

    ExperimentConfig experiment_from_json(const nlohmann::json &j, const std::string &base_dir)
    {
        const auto &sj = j.at("scene");
        Scene scene = sj.is_string()
                          ? io::scene_from_json(io::read_json((std::filesystem::path(base_dir) / sj.get<std::string>()).string()))
                          : io::scene_from_json(sj);
        ExperimentConfig c{scene};
        if (j.contains("codebook"))
        {
            const auto &cb = j["codebook"];
            c.cb_min_deg = cb.value("min_deg", c.cb_min_deg);
            c.cb_max_deg = cb.value("max_deg", c.cb_max_deg);
            c.cb_step_deg = cb.value("step_deg", c.cb_step_deg);
        }
        c.snapshots = j.value("snapshots", c.snapshots);
        if (j.contains("noise_power"))
            c.noise_power = j["noise_power"].get<double>();
        c.seed = j.value("seed", c.seed);
        if (j.contains("z"))
            c.z = j["z"].get<double>();
        if (j.contains("tau"))
        {
            const auto &t = j["tau"];
            const std::string policy = t.value("policy", std::string("perfect"));
            if (policy != "perfect" && policy != "gaussian")
                throw std::invalid_argument("tau policy must be 'perfect' or 'gaussian'");
            c.tau.perfect = policy == "perfect";
            c.tau.sigma_s = t.value("sigma_s", 0.0);
        }
        if (j.contains("ue_grid"))
        {
            const auto &g = j["ue_grid"];
            c.grid.x_min = g.value("x_min", c.grid.x_min);
            c.grid.x_max = g.value("x_max", c.grid.x_max);
            c.grid.y_min = g.value("y_min", c.grid.y_min);
            c.grid.y_max = g.value("y_max", c.grid.y_max);
            c.grid.nx = g.value("nx", c.grid.nx);
            c.grid.ny = g.value("ny", c.grid.ny);
        }
        c.music.grid_points = j.value("music_grid_points", c.music.grid_points);
        if (!(c.cb_step_deg > 0.0) || c.cb_max_deg < c.cb_min_deg)
            throw std::invalid_argument("codebook range is empty");
        if (c.snapshots < 1)
            throw std::invalid_argument("snapshots must be >= 1");
        return c;
    }

    Scene scene_with_ue(const Scene &base, const Vec3 &ue)
    {
        Scene s = base;
        const Mat3 &r = base.rx.pose().rotation;
        s.rx = base.rx.placed(ue, std::atan2(r(1, 0), r(0, 0)));
        return s;
    }

    Direction ris_incident(const Scene &scene)
    {
        return scene.ris.pose().to_local(Direction::from_vector(scene.tx.global_centroid() - scene.ris.global_centroid()));
    }

    Codebook experiment_codebook(const ExperimentConfig &cfg, Bits bits)
    {
        std::vector<double> targets;
        const auto n = std::size_t(std::floor((cfg.cb_max_deg - cfg.cb_min_deg) / cfg.cb_step_deg + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i)
            targets.push_back(deg2rad(cfg.cb_min_deg + cfg.cb_step_deg * double(i)));
        const QuantizationGrid grid = !bits ? QuantizationGrid::continuous()
                                      : *bits == 1 ? QuantizationGrid::one_bit_quadrature()
                                                   : QuantizationGrid(bits);
        return build_codebook(ris_incident(cfg.scene), targets, cfg.scene.ris, cfg.scene.carrier(), grid);
    }

    double ErrorStats::stddev() const { return std::sqrt(variance); }

    ErrorStats error_stats(const std::vector<double> &e)
    {
        ErrorStats s;
        if (e.empty())
            return s;
        for (double x : e)
        {
            s.peak = std::max(s.peak, x);
            s.average += x;
        }
        s.average /= double(e.size());
        for (double x : e)
            s.variance += (x - s.average) * (x - s.average);
        s.variance /= double(e.size());
        return s;
    }

    namespace
    {
        struct Trial
        {
            Scene scene;
            CMat pilots;
            double tau;
            double truth;
        };

        Trial make_trial(const ExperimentConfig &cfg, std::size_t index, const Vec3 &ue)
        {
            Trial t{scene_with_ue(cfg.scene, ue), {}, 0.0, 0.0};
            t.scene.seed = mix_seed(cfg.seed, index);
            if (cfg.noise_power)
                t.scene.noise_power = *cfg.noise_power;
            t.pilots = make_pilots(mrt_precoder(link_channel(t.scene, Link::tx_ris)), cfg.snapshots,
                                   mix_seed(cfg.seed ^ 0x5eedULL, index));
            const Vec3 d = ue - t.scene.ris.global_centroid();
            t.truth = std::atan2(d.y(), d.x());
            t.tau = d.norm() / speed_of_light;
            if (!cfg.tau.perfect && cfg.tau.sigma_s > 0.0)
            {
                std::mt19937_64 rng(mix_seed(cfg.seed ^ 0x7a0ULL, index));
                std::normal_distribution<double> nd(0.0, cfg.tau.sigma_s);
                t.tau = std::max(1e-12, t.tau + nd(rng));
            }
            return t;
        }

        double ue_height(const ExperimentConfig &cfg)
        {
            return cfg.z ? *cfg.z : cfg.scene.rx.global_centroid().z();
        }
    }

    std::vector<StudyRow> run_localization_study(const ExperimentConfig &cfg)
    {
        const double z = ue_height(cfg);
        const auto ues = cfg.grid.points(z);
        std::vector<StudyRow> rows;
        for (Bits bits : {Bits(std::nullopt), Bits(1)})
        {
            const Codebook cb = experiment_codebook(cfg, bits);
            for (bool use_music : {false, true})
            {
                StudyRow row;
                row.bits = bits;
                row.music = use_music;
                row.method = std::string(bits ? "1-bit" : "continuous") + (use_music ? " sweep+MUSIC" : " sweep");
                LocalizeOptions opt = cfg.music;
                opt.use_music = use_music;
                for (std::size_t i = 0; i < ues.size(); ++i)
                {
                    Trial t = make_trial(cfg, i, ues[i]);
                    SceneMeasurement m(t.scene, t.pilots);
                    const auto loc = localize(m, cb, t.scene.ris, t.scene.rx, t.scene.carrier(), t.tau, z, opt);
                    row.errors_deg.push_back(rad2deg(angular_distance(loc.phi_est, t.truth)));
                }
                row.stats = error_stats(row.errors_deg);
                rows.push_back(std::move(row));
            }
        }
        return rows;
    }

    MappingStudy run_mapping_study(const ExperimentConfig &cfg, Bits bits)
    {
        const double z = ue_height(cfg);
        const auto ues = cfg.grid.points(z);
        const Codebook cb = experiment_codebook(cfg, bits);
        MappingStudy study;
        std::vector<double> errs;
        for (std::size_t i = 0; i < ues.size(); ++i)
        {
            Trial t = make_trial(cfg, i, ues[i]);
            SceneMeasurement m(t.scene, t.pilots);
            const CarrierSpec carrier = t.scene.carrier();
            const auto loc = localize(m, cb, t.scene.ris, t.scene.rx, carrier, t.tau, z, cfg.music);

            std::vector<PropagationPath> los;
            for (const auto &p : synth_paths(t.scene, Link::tx_ris))
                if (p.kind == PathKind::los)
                    los.push_back(p);
            const MappingContext ctx{t.scene.ris, t.scene.rx,
                                     channel_matrix(los, t.scene.tx, t.scene.ris, carrier, t.scene.sampling_hz),
                                     t.pilots, carrier, t.scene.sampling_hz, cfg.music};
            const auto map = map_scatterers(m, cb, loc, ctx);

            MappingOutcome o;
            o.ue = ues[i];
            o.detections = map.scatterers.size();
            o.measurements = loc.measurements + map.measurements;
            if (const auto *s = map.strongest())
            {
                o.detected = true;
                o.estimate = s->position;
                o.error_m = std::numeric_limits<double>::infinity();
                for (const auto &truth : t.scene.scatterers)
                    o.error_m = std::min(o.error_m, (s->position - truth.position).head<2>().norm());
                errs.push_back(o.error_m);
                ++study.detected;
            }
            study.outcomes.push_back(o);
        }
        study.stats = error_stats(errs);
        return study;
    }

    nlohmann::json to_json(const StudyRow &row)
    {
        return {{"method", row.method},
                {"bits", row.bits ? nlohmann::json(*row.bits) : nlohmann::json("inf")},
                {"music", row.music},
                {"peak_deg", row.stats.peak},
                {"average_deg", row.stats.average},
                {"variance_deg2", row.stats.variance},
                {"errors_deg", row.errors_deg}};
    }

    std::string study_csv(const std::vector<StudyRow> &rows)
    {
        std::ostringstream os;
        os.precision(10);
        os << "method,peak_deg,average_deg,variance_deg2\n";
        for (const auto &r : rows)
            os << r.method << ',' << r.stats.peak << ',' << r.stats.average << ',' << r.stats.variance << '\n';
        return os.str();
    }
}
