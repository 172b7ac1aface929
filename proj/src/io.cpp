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

#include "rislocus/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rislocus::io
{
    json to_json(const PhaseConfig &config)
    {
        json j;
        j["bits"] = config.bits() ? json(*config.bits()) : json("inf");
        j["layout"] = to_string(config.layout());
        j["phases_rad"] = config.phases();
        return j;
    }

    static Bits bits_from_json(const json &b)
    {
        if (b.is_string())
        {
            if (b.get<std::string>() != "inf")
                throw std::invalid_argument("bits must be an integer or \"inf\"");
            return std::nullopt;
        }
        return b.get<int>();
    }

    PhaseConfig config_from_json(const json &j)
    {
        return PhaseConfig(j.at("phases_rad").get<std::vector<double>>(), bits_from_json(j.at("bits")),
                           layout_from_string(j.value("layout", std::string("unipolar"))));
    }

    json to_json(const Codebook &cb)
    {
        json j;
        j["incident"] = {{"azimuth_rad", cb.incident().azimuth()}, {"elevation_rad", cb.incident().elevation()}};
        j["bits"] = cb.bits() ? json(*cb.bits()) : json("inf");
        j["entries"] = json::array();
        for (const auto &e : cb.entries())
            j["entries"].push_back({{"target_rad", e.target.azimuth()},
                                    {"target_elevation_rad", e.target.elevation()},
                                    {"config", to_json(e.config)}});
        return j;
    }

    Codebook codebook_from_json(const json &j)
    {
        const auto &inc = j.at("incident");
        const Direction incident(inc.at("azimuth_rad").get<double>(), inc.value("elevation_rad", 0.0));
        std::vector<CodebookEntry> entries;
        for (const auto &e : j.at("entries"))
            entries.push_back({Direction(e.at("target_rad").get<double>(), e.value("target_elevation_rad", 0.0)),
                               config_from_json(e.at("config"))});
        Codebook cb(incident, std::move(entries));
        if (j.contains("bits") && bits_from_json(j["bits"]) != cb.bits())
            throw std::invalid_argument("codebook: declared bits differ from entry configs");
        return cb;
    }

    static double pitch_from_json(const json &p, double lambda)
    {
        if (p.is_object())
            return p.at("lambda").get<double>() * lambda;
        return p.get<double>();
    }

    static Vec3 vec_from_json(const json &p)
    {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != 3)
            throw std::invalid_argument("position must have three components");
        return {v[0], v[1], v[2]};
    }

    static ArrayGeometry array_from_json(const json &j, double lambda)
    {
        const double dh = pitch_from_json(j.value("d_h", json({{"lambda", 0.5}})), lambda);
        const double dv = j.contains("d_v") ? pitch_from_json(j["d_v"], lambda) : dh;
        const ArrayGeometry g(j.value("n_h", 1), j.value("n_v", 1), dh, dv);
        return g.placed(vec_from_json(j.at("position")), deg2rad(j.value("yaw_deg", 0.0)));
    }

    static json array_to_json(const ArrayGeometry &g)
    {
        const Vec3 c = g.global_centroid();
        const Mat3 &r = g.pose().rotation;
        return {{"n_h", g.n_h()},
                {"n_v", g.n_v()},
                {"d_h", g.d_h()},
                {"d_v", g.d_v()},
                {"position", {c.x(), c.y(), c.z()}},
                {"yaw_deg", rad2deg(std::atan2(r(1, 0), r(0, 0)))}};
    }

    static Link link_from_string(const std::string &s)
    {
        if (s == "tx_ris")
            return Link::tx_ris;
        if (s == "ris_rx")
            return Link::ris_rx;
        if (s == "tx_rx")
            return Link::tx_rx;
        throw std::invalid_argument("unknown link '" + s + "'");
    }

    static std::string link_to_string(Link l)
    {
        switch (l)
        {
        case Link::tx_ris: return "tx_ris";
        case Link::ris_rx: return "ris_rx";
        case Link::tx_rx: return "tx_rx";
        }
        return "tx_rx";
    }

    Scene scene_from_json(const json &j)
    {
        const double fc = j.value("carrier_hz", 3.5e9);
        const double lambda = CarrierSpec(fc).wavelength();
        Scene s{array_from_json(j.at("tx"), lambda), array_from_json(j.at("rx"), lambda),
                array_from_json(j.at("ris"), lambda)};
        s.carrier_hz = fc;
        s.sampling_hz = j.value("sampling_hz", 100e6);
        s.noise_power = j.value("noise_power", 0.0);
        s.seed = j.value("seed", std::uint64_t(0));
        s.blocked_direct = j.value("blocked_direct", false);
        s.depolarization = j.value("depolarization", 0.0);
        s.dispersion_deg_per_mhz = j.value("dispersion_deg_per_mhz", 0.0);
        for (const auto &sj : j.value("scatterers", json::array()))
        {
            Scatterer sc;
            sc.position = vec_from_json(sj.at("position"));
            sc.gain = sj.value("gain", 1.0);
            if (sj.contains("links"))
            {
                sc.links.clear();
                for (const auto &l : sj["links"])
                    sc.links.push_back(link_from_string(l.get<std::string>()));
            }
            s.scatterers.push_back(sc);
        }
        s.validate();
        return s;
    }

    json to_json(const Scene &scene)
    {
        json j;
        j["carrier_hz"] = scene.carrier_hz;
        j["sampling_hz"] = scene.sampling_hz;
        j["noise_power"] = scene.noise_power;
        j["seed"] = scene.seed;
        j["blocked_direct"] = scene.blocked_direct;
        j["depolarization"] = scene.depolarization;
        j["dispersion_deg_per_mhz"] = scene.dispersion_deg_per_mhz;
        j["tx"] = array_to_json(scene.tx);
        j["rx"] = array_to_json(scene.rx);
        j["ris"] = array_to_json(scene.ris);
        j["scatterers"] = json::array();
        for (const auto &s : scene.scatterers)
        {
            json links = json::array();
            for (Link l : s.links)
                links.push_back(link_to_string(l));
            j["scatterers"].push_back(
                {{"position", {s.position.x(), s.position.y(), s.position.z()}}, {"gain", s.gain}, {"links", links}});
        }
        return j;
    }

    json read_json(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open '" + path + "'");
        try
        {
            return json::parse(in);
        }
        catch (const json::exception &e)
        {
            throw std::runtime_error("cannot parse '" + path + "': " + e.what());
        }
    }

    void write_text(const std::string &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write '" + path + "'");
        out << text;
        if (!out)
            throw std::runtime_error("write failed for '" + path + "'");
    }

    static std::string fmt(double v)
    {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    }

    std::string spectrum_csv(const Spectrum &s)
    {
        std::ostringstream os;
        const auto db = s.normalized_db();
        if (s.dims() == 1)
            os << "angle_rad,power_linear,power_db_normalized\n";
        else
            os << "angle_rad,delay_s,power_linear,power_db_normalized\n";
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            for (double c : s.coordinates(i))
                os << fmt(c) << ',';
            os << fmt(s.values()[i]) << ',' << (std::isfinite(db[i]) ? fmt(db[i]) : std::string("-inf")) << '\n';
        }
        return os.str();
    }

    std::string paths_csv(const std::vector<PropagationPath> &paths)
    {
        std::ostringstream os;
        os << "path,kind,gain_linear,loss_db,delay_s,aoa_azimuth_deg,aoa_elevation_deg,aod_azimuth_deg,"
              "aod_elevation_deg\n";
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            const auto &p = paths[i];
            os << i + 1 << ',' << (p.kind == PathKind::los ? "LoS" : "NLoS") << ',' << fmt(p.gain) << ','
               << fmt(-20.0 * std::log10(p.gain)) << ',' << fmt(p.delay) << ',' << fmt(rad2deg(p.aoa.azimuth()))
               << ',' << fmt(rad2deg(p.aoa.elevation())) << ',' << fmt(rad2deg(p.aod.azimuth())) << ','
               << fmt(rad2deg(p.aod.elevation())) << '\n';
        }
        return os.str();
    }

    std::string trace_csv(const OptTrace &trace)
    {
        std::ostringstream os;
        os << "step,kind,index,power_db,accepted\n";
        for (std::size_t i = 0; i < trace.steps.size(); ++i)
        {
            const auto &s = trace.steps[i];
            os << i << ',' << to_string(s.kind) << ',' << s.index << ',' << fmt(10.0 * std::log10(s.power)) << ','
               << (s.accepted ? 1 : 0) << '\n';
        }
        return os.str();
    }

    std::string sha256_hex(const std::string &data)
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 failed");
        std::ostringstream os;
        for (unsigned int i = 0; i < len; ++i)
            os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
        return os.str();
    }
}
