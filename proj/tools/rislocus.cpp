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


// Command-line front end: pattern, codebook, sweep, localize, map, greedy, emulate, characterize, paths

#include "rislocus/emulator.hpp"
#include "rislocus/experiment.hpp"
#include "rislocus/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace rislocus;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace
{
    std::atomic<bool> stop_requested{false};

    void on_signal(int) { stop_requested = true; }

    Bits parse_bits(const std::string &s)
    {
        if (s == "inf")
            return std::nullopt;
        int b = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), b);
        if (ec != std::errc() || end != s.data() + s.size() || b < 1 || b > 16)
            throw std::invalid_argument("--bits must be 'inf' or an integer in 1..16, got '" + s + "'");
        return b;
    }

    QuantizationGrid grid_for(Bits bits, const std::string &states)
    {
        if (!bits)
            return QuantizationGrid::continuous();
        if (*bits == 1)
        {
            if (states == "quadrature")
                return QuantizationGrid::one_bit_quadrature();
            if (states == "binary")
                return QuantizationGrid::one_bit_binary();
            throw std::invalid_argument("--states must be 'quadrature' or 'binary'");
        }
        return QuantizationGrid(bits);
    }

    std::string file_digest(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return io::sha256_hex(ss.str());
    }

    std::string eigen_version()
    {
        return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
    }

    // Shared run state: resolved seed, output directory, parameters and inputs for the manifest
    struct Run
    {
        std::string subcommand;
        std::uint64_t seed = 1;
        std::string seed_source = "default";
        std::string out_dir = ".";
        json params = json::object();
        json inputs = json::object();
        std::vector<std::string> outputs;

        void input(const std::string &key, const std::string &path)
        {
            inputs[key] = {{"path", path}, {"sha256", file_digest(path)}};
        }

        std::string out(const std::string &name)
        {
            fs::create_directories(out_dir);
            outputs.push_back(name);
            return (fs::path(out_dir) / name).string();
        }

        void write(const std::string &name, const std::string &text) { io::write_text(out(name), text); }

        void manifest()
        {
            const json config = {{"subcommand", subcommand}, {"params", params}, {"inputs", inputs}, {"seed", seed}};
            const json m = {{"tool", "rislocus"},
                            {"version", RISLOCUS_VERSION},
                            {"subcommand", subcommand},
                            {"config_sha256", io::sha256_hex(config.dump())},
                            {"seed", seed},
                            {"seed_source", seed_source},
                            {"params", params},
                            {"inputs", inputs},
                            {"outputs", outputs},
                            {"versions", {{"rislocus", RISLOCUS_VERSION}, {"eigen", eigen_version()}, {"nlohmann_json",
                                          std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
            fs::create_directories(out_dir);
            io::write_text((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
        }
    };

    Scene load_scene(Run &run, const std::string &path)
    {
        run.input("scene", path);
        return io::scene_from_json(io::read_json(path));
    }

    std::unique_ptr<EmulatorClient> connect(const std::string &endpoint)
    {
        const auto [host, port] = parse_endpoint(endpoint);
        return std::make_unique<EmulatorClient>(host, port);
    }

    std::string bit_rows(const BitMatrix &m, std::vector<std::string> &rows)
    {
        std::string all;
        for (std::size_t r = 0; r < m.rows(); ++r)
        {
            std::string s;
            for (std::size_t c = 0; c < m.cols(); ++c)
                s.push_back(m.get(r, c) ? '1' : '0');
            rows.push_back(s);
            all += s + '\n';
        }
        return all;
    }

    // ---- pattern ----
    struct PatternArgs
    {
        int n = 64;
        double pitch = 0.5; // wavelengths
        std::string bits = "inf";
        std::string states = "quadrature";
        double incident = 60.0, target = 22.5; // degrees
        std::size_t points = 721;
        double carrier = 3.5e9;
        std::string form = "reflect";
    };

    void run_pattern(Run &run, const PatternArgs &a)
    {
        run.params = {{"n", a.n},           {"pitch_lambda", a.pitch}, {"bits", a.bits},
                      {"states", a.states}, {"incident_deg", a.incident}, {"target_deg", a.target},
                      {"points", a.points}, {"carrier_hz", a.carrier}, {"form", a.form}};
        const CarrierSpec carrier(a.carrier);
        const auto geom = ArrayGeometry::ula(a.n, a.pitch * carrier.wavelength());
        const SteeringTask task{Direction(deg2rad(a.incident)), Direction(deg2rad(a.target))};
        PatternForm form = PatternForm::reflect;
        if (a.form == "array_factor")
            form = PatternForm::array_factor;
        else if (a.form != "reflect")
            throw std::invalid_argument("--form must be 'reflect' or 'array_factor'");
        const auto config = quantize(optimal_config(task, geom, carrier, form), grid_for(parse_bits(a.bits), a.states));
        const auto s = sweep_reflect(config, task.incident, geom, carrier, default_azimuth_grid(a.points));
        const auto rep = analyze_lobes(s, carrier, geom.d_h(), task.incident, task.target);

        run.write("pattern.csv", io::spectrum_csv(s));
        auto lobe = [](const Lobe &l) {
            return json{{"azimuth_deg", rad2deg(l.direction.azimuth())}, {"level_db", l.level_db}, {"index", l.index}};
        };
        json side = json::array(), grating = json::array();
        for (const auto &l : rep.sidelobes)
            side.push_back(lobe(l));
        for (const auto &l : rep.grating_lobes)
            grating.push_back(lobe(l));
        const json out = {{"main_lobe", lobe(rep.main_lobe)},
                          {"peak_value", s.peak_value()},
                          {"beamwidth_3db_deg", rad2deg(beamwidth_3db(s))},
                          {"sidelobes", side},
                          {"grating_lobes", grating},
                          {"config", io::to_json(config)}};
        run.write("lobes.json", out.dump(2) + "\n");
        std::cout << "main lobe " << rad2deg(rep.main_lobe.direction.azimuth()) << " deg, "
                  << rep.grating_lobes.size() << " grating lobe(s)\n";
    }

    // ---- codebook ----
    struct CodebookArgs
    {
        std::string scene;
        double incident = 15.0;
        int n_h = 32, n_v = 32;
        double pitch = 0.5;
        double carrier = 3.5e9;
        double min = -60, max = 60, step = 2;
        std::string bits = "inf";
        std::string states = "quadrature";
    };

    void run_codebook(Run &run, const CodebookArgs &a)
    {
        run.params = {{"incident_deg", a.incident}, {"n_h", a.n_h}, {"n_v", a.n_v}, {"pitch_lambda", a.pitch},
                      {"carrier_hz", a.carrier},   {"min_deg", a.min}, {"max_deg", a.max}, {"step_deg", a.step},
                      {"bits", a.bits},            {"states", a.states}};
        if (!(a.step > 0.0) || a.max < a.min)
            throw std::invalid_argument("codebook range is empty");
        Direction incident(deg2rad(a.incident));
        std::optional<ArrayGeometry> geom;
        CarrierSpec carrier(a.carrier);
        if (!a.scene.empty())
        {
            const Scene s = load_scene(run, a.scene);
            incident = ris_incident(s);
            geom = s.ris;
            carrier = s.carrier();
        }
        else
            geom = ArrayGeometry(a.n_h, a.n_v, a.pitch * carrier.wavelength(), a.pitch * carrier.wavelength());
        std::vector<double> targets;
        const auto n = std::size_t(std::floor((a.max - a.min) / a.step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i)
            targets.push_back(deg2rad(a.min + a.step * double(i)));
        const auto cb = build_codebook(incident, targets, *geom, carrier, grid_for(parse_bits(a.bits), a.states));
        run.write("codebook.json", io::to_json(cb).dump() + "\n");
        std::cout << cb.size() << " entries, incident " << rad2deg(incident.azimuth()) << " deg\n";
    }

    // ---- sweep ----
    struct SweepArgs
    {
        std::string codebook, scene, remote;
        std::size_t snapshots = 64;
        bool noiseless = false;
    };

    void run_sweep(Run &run, const SweepArgs &a)
    {
        run.params = {{"snapshots", a.snapshots}, {"noiseless", a.noiseless}, {"remote", a.remote}};
        run.input("codebook", a.codebook);
        const Codebook cb = io::codebook_from_json(io::read_json(a.codebook));
        SweepResult res;
        json extra = json::object();
        if (!a.remote.empty())
        {
            auto client = connect(a.remote);
            InstrumentMeasurement m(*client);
            res = beam_sweep(cb, m);
        }
        else
        {
            if (a.scene.empty())
                throw std::invalid_argument("sweep needs --scene or --remote");
            Scene s = load_scene(run, a.scene);
            s.seed = run.seed;
            if (a.noiseless)
                s.noise_power = 0.0;
            const CMat x = make_pilots(mrt_precoder(link_channel(s, Link::tx_ris)), a.snapshots, run.seed);
            SceneMeasurement m(s, x);
            res = beam_sweep(cb, m);
            const Direction truth = s.ris.pose().to_local(
                Direction::from_vector(s.rx.global_centroid() - s.ris.global_centroid()));
            extra["true_target_deg"] = rad2deg(truth.azimuth());
        }
        std::ostringstream csv;
        csv.precision(17);
        csv << "entry,target_deg,power_linear,power_db\n";
        for (std::size_t i = 0; i < res.powers.size(); ++i)
            csv << i << ',' << rad2deg(cb[i].target.azimuth()) << ',' << res.powers[i] << ','
                << 10.0 * std::log10(res.powers[i]) << '\n';
        run.write("sweep.csv", csv.str());
        extra["best_entry"] = res.best;
        extra["best_target_deg"] = rad2deg(cb[res.best].target.azimuth());
        run.write("sweep.json", extra.dump(2) + "\n");
        std::cout << "best entry " << res.best << " at " << rad2deg(cb[res.best].target.azimuth()) << " deg\n";
    }

    // ---- localize / map ----
    struct StudyArgs
    {
        std::string config;
        std::string bits = "inf"; // mapping codebook
    };

    ExperimentConfig load_experiment(Run &run, const std::string &path, bool seed_from_cli)
    {
        run.input("config", path);
        ExperimentConfig cfg = experiment_from_json(io::read_json(path), fs::path(path).parent_path().string());
        if (seed_from_cli)
            cfg.seed = run.seed;
        else
            run.seed = cfg.seed;
        return cfg;
    }

    void run_localize(Run &run, const StudyArgs &a, bool seed_given)
    {
        const auto cfg = load_experiment(run, a.config, seed_given);
        const auto t0 = std::chrono::steady_clock::now();
        const auto rows = run_localization_study(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.write("localization.csv", study_csv(rows));
        json j = json::array();
        for (const auto &r : rows)
            j.push_back(to_json(r));
        run.write("localization.json", json{{"rows", j}, {"runtime_s", secs}}.dump(2) + "\n");
        for (const auto &r : rows)
            std::cout << r.method << ": peak " << r.stats.peak << " deg, average " << r.stats.average
                      << " deg, variance " << r.stats.variance << '\n';
    }

    void run_map(Run &run, const StudyArgs &a, bool seed_given)
    {
        run.params = {{"bits", a.bits}};
        const auto cfg = load_experiment(run, a.config, seed_given);
        const auto study = run_mapping_study(cfg, parse_bits(a.bits));
        std::ostringstream csv;
        csv.precision(10);
        csv << "ue_x,ue_y,detected,estimate_x,estimate_y,error_m,detections,measurements\n";
        for (const auto &o : study.outcomes)
            csv << o.ue.x() << ',' << o.ue.y() << ',' << (o.detected ? 1 : 0) << ',' << o.estimate.x() << ','
                << o.estimate.y() << ',' << o.error_m << ',' << o.detections << ',' << o.measurements << '\n';
        run.write("mapping.csv", csv.str());
        const json j = {{"detected", study.detected},
                        {"trials", study.outcomes.size()},
                        {"average_error_m", study.stats.average},
                        {"stddev_error_m", study.stats.stddev()},
                        {"peak_error_m", study.stats.peak}};
        run.write("mapping.json", j.dump(2) + "\n");
        std::cout << "detected " << study.detected << "/" << study.outcomes.size() << ", average error "
                  << study.stats.average << " m, std " << study.stats.stddev() << " m\n";
    }

    // ---- greedy ----
    struct GreedyArgs
    {
        std::string scene, remote, pol = "hh";
        std::size_t iters = 2;
    };

    void run_greedy(Run &run, const GreedyArgs &a)
    {
        run.params = {{"iterations", a.iters}, {"pol", a.pol}, {"remote", a.remote}};
        const PolPair pol = pol_pair_from_string(a.pol);
        if (a.iters < 1)
            throw std::invalid_argument("--iters must be >= 1");
        std::unique_ptr<Instrument> inst;
        if (!a.remote.empty())
            inst = connect(a.remote);
        else if (!a.scene.empty())
            inst = std::make_unique<LocalInstrument>(std::make_shared<const EmulatorModel>(load_scene(run, a.scene)),
                                                     run.seed);
        else
            throw std::invalid_argument("greedy needs --scene or --remote");
        const auto res = greedy_optimize(instrument_oracle(*inst, pol), inst->rows(), inst->cols() / 2, a.iters);
        run.write("trace.csv", io::trace_csv(res.trace));
        std::vector<std::string> rows;
        bit_rows(res.config, rows);
        const json j = {{"rows", inst->rows()},
                        {"cols", inst->cols()},
                        {"final_power", res.trace.final_power()},
                        {"final_power_db", 10.0 * std::log10(res.trace.final_power())},
                        {"probes", res.trace.probes()},
                        {"accepted", res.trace.accepted()},
                        {"iteration_power", res.trace.iteration_power},
                        {"config", rows}};
        run.write("greedy.json", j.dump(2) + "\n");
        std::cout << "final power " << 10.0 * std::log10(res.trace.final_power()) << " dB after "
                  << res.trace.probes() << " probes\n";
    }

    // ---- emulate ----
    struct EmulateArgs
    {
        std::string scene, host = "127.0.0.1", port_file;
        int port = 7001;
        double latency_ms = 10.0;
        bool sleep = false;
    };

    void run_emulate(Run &run, const EmulateArgs &a)
    {
        run.params = {{"host", a.host}, {"port", a.port}, {"latency_ms", a.latency_ms}, {"sleep", a.sleep}};
        if (a.port < 0 || a.port > 65535)
            throw std::invalid_argument("--port out of range");
        auto model = std::make_shared<const EmulatorModel>(load_scene(run, a.scene));
        EmulatorServer srv(model, run.seed, {a.latency_ms, a.sleep});
        const auto port = srv.start(a.host, std::uint16_t(a.port));
        run.params["bound_port"] = port;
        run.manifest();
        if (!a.port_file.empty())
            io::write_text(a.port_file, std::to_string(port) + "\n");
        std::cout << "listening on " << a.host << ':' << port << std::endl;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!stop_requested)
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        srv.stop();
        std::cout << "served " << srv.requests() << " request(s)" << std::endl;
    }

    // ---- characterize ----
    struct CharacterizeArgs
    {
        std::string scene, remote;
        std::vector<std::string> pols{"hh"};
        double span_mhz = 160.0;
    };

    void run_characterize(Run &run, const CharacterizeArgs &a)
    {
        run.params = {{"pols", a.pols}, {"span_mhz", a.span_mhz}, {"remote", a.remote}};
        std::unique_ptr<Instrument> inst;
        if (!a.remote.empty())
            inst = connect(a.remote);
        else if (!a.scene.empty())
            inst = std::make_unique<LocalInstrument>(std::make_shared<const EmulatorModel>(load_scene(run, a.scene)),
                                                     run.seed);
        else
            throw std::invalid_argument("characterize needs --scene or --remote");
        json summary = json::object();
        for (const auto &p : a.pols)
        {
            const PolPair pol = pol_pair_from_string(p);
            const auto t = phase_characterization(*inst, pol);
            std::ostringstream csv;
            csv.precision(12);
            csv << "freq_hz,delta_phase_deg\n";
            const double f0 = 0.5 * (t.freqs.front() + t.freqs.back());
            double worst = 0.0;
            for (std::size_t k = 0; k < t.freqs.size(); ++k)
            {
                csv << t.freqs[k] << ',' << t.delta_deg[k] << '\n';
                if (std::abs(t.freqs[k] - f0) <= 0.5 * a.span_mhz * 1e6 + 1.0)
                    worst = std::max(worst, std::abs(t.delta_deg[k] - 180.0));
            }
            run.write("phase_" + p + ".csv", csv.str());
            summary[p] = {{"max_deviation_deg", worst}, {"span_mhz", a.span_mhz}};
            std::cout << p << ": max |dphi - 180| = " << worst << " deg over " << a.span_mhz << " MHz\n";
        }
        run.write("characterize.json", summary.dump(2) + "\n");
    }

    // ---- paths ----
    struct PathsArgs
    {
        std::string scene, link = "ris_rx";
    };

    void run_paths(Run &run, const PathsArgs &a)
    {
        run.params = {{"link", a.link}};
        const Scene s = load_scene(run, a.scene);
        Link link;
        if (a.link == "tx_ris")
            link = Link::tx_ris;
        else if (a.link == "ris_rx")
            link = Link::ris_rx;
        else if (a.link == "tx_rx")
            link = Link::tx_rx;
        else
            throw std::invalid_argument("--link must be tx_ris, ris_rx or tx_rx");
        const auto paths = synth_paths(s, link);
        run.write("paths.csv", io::paths_csv(paths));
        std::cout << paths.size() << " path(s)\n";
    }

    void print_error(const std::string &sub, const std::string &kind, const std::string &msg)
    {
        std::cerr << json{{"error", msg}, {"kind", kind}, {"subcommand", sub}}.dump() << std::endl;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"rislocus: RIS-aided localization, sensing and testbed emulation"};
    app.set_version_flag("--version", std::string(RISLOCUS_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    Run run;
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "RNG seed (falls back to RIS_LOCUS_SEED)")->envname("RIS_LOCUS_SEED");
    app.add_option("--out-dir", run.out_dir, "Directory for outputs and manifest.json");

    PatternArgs pa;
    auto *pattern = app.add_subcommand("pattern", "Reflection pattern of a steered ULA RIS");
    pattern->add_option("--n", pa.n, "Number of elements")->check(CLI::PositiveNumber);
    pattern->add_option("--pitch,--pitch-lambda", pa.pitch, "Element pitch in wavelengths")->check(CLI::PositiveNumber);
    pattern->add_option("--bits", pa.bits, "Phase resolution: inf or 1..16");
    pattern->add_option("--states", pa.states, "1-bit states: quadrature {-90,90} or binary {-180,0}");
    pattern->add_option("--incident", pa.incident, "Incident azimuth in degrees");
    pattern->add_option("--target", pa.target, "Target azimuth in degrees");
    pattern->add_option("--points", pa.points, "Azimuth grid points over [-90, 90]")->check(CLI::Range(2, 1000000));
    pattern->add_option("--carrier", pa.carrier, "Carrier frequency in Hz")->check(CLI::PositiveNumber);
    pattern->add_option("--form", pa.form, "reflect or array_factor");

    CodebookArgs ca;
    auto *codebook = app.add_subcommand("codebook", "Build a steering codebook");
    codebook->add_option("--scene", ca.scene, "Scene JSON (uses its RIS and incident direction)")->check(CLI::ExistingFile);
    codebook->add_option("--incident", ca.incident, "Incident azimuth in degrees (without --scene)");
    codebook->add_option("--n-h", ca.n_h, "Horizontal elements (without --scene)")->check(CLI::PositiveNumber);
    codebook->add_option("--n-v", ca.n_v, "Vertical elements (without --scene)")->check(CLI::PositiveNumber);
    codebook->add_option("--pitch,--pitch-lambda", ca.pitch, "Element pitch in wavelengths")->check(CLI::PositiveNumber);
    codebook->add_option("--min", ca.min, "First target azimuth in degrees");
    codebook->add_option("--max", ca.max, "Last target azimuth in degrees");
    codebook->add_option("--step", ca.step, "Target spacing in degrees");
    codebook->add_option("--bits", ca.bits, "Phase resolution: inf or 1..16");
    codebook->add_option("--states", ca.states, "1-bit states: quadrature or binary");

    SweepArgs sa;
    auto *sweep = app.add_subcommand("sweep", "Beam sweep against a scene or a remote emulator");
    sweep->add_option("--codebook", sa.codebook, "Codebook JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--scene", sa.scene, "Scene JSON")->check(CLI::ExistingFile);
    sweep->add_option("--remote", sa.remote, "Emulator endpoint host:port");
    sweep->add_option("--snapshots", sa.snapshots, "Pilot symbols per measurement")->check(CLI::PositiveNumber);
    sweep->add_flag("--noiseless", sa.noiseless, "Ignore the scene noise power");

    StudyArgs la;
    auto *localize = app.add_subcommand("localize", "Localization study over the experiment's UE grid");
    localize->add_option("--config", la.config, "Experiment JSON")->required()->check(CLI::ExistingFile);

    StudyArgs ma;
    auto *map = app.add_subcommand("map", "Scatterer mapping study over the experiment's UE grid");
    map->add_option("--config", ma.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    map->add_option("--bits", ma.bits, "Codebook phase resolution: inf or 1..16");

    GreedyArgs ga;
    auto *greedy = app.add_subcommand("greedy", "Measurement-driven 1-bit configuration search");
    greedy->add_option("--scene", ga.scene, "Scene JSON for an in-process emulator")->check(CLI::ExistingFile);
    greedy->add_option("--remote", ga.remote, "Emulator endpoint host:port");
    greedy->add_option("--iters", ga.iters, "Full column/row iterations")->check(CLI::PositiveNumber);
    greedy->add_option("--pol", ga.pol, "Polarization pair hh, vv, hv or vh");

    EmulateArgs ea;
    auto *emulate = app.add_subcommand("emulate", "Serve the testbed emulator over TCP");
    emulate->add_option("--scene", ea.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    emulate->add_option("--host", ea.host, "IPv4 bind address");
    emulate->add_option("--port", ea.port, "TCP port (0 picks a free one)");
    emulate->add_option("--port-file", ea.port_file, "Write the bound port to this file");
    emulate->add_option("--latency-ms", ea.latency_ms, "Reported configuration update latency");
    emulate->add_flag("--sleep", ea.sleep, "Actually wait the latency on every update");

    CharacterizeArgs cha;
    auto *characterize = app.add_subcommand("characterize", "Phase difference between the two element states");
    characterize->add_option("--scene", cha.scene, "Scene JSON for an in-process emulator")->check(CLI::ExistingFile);
    characterize->add_option("--remote", cha.remote, "Emulator endpoint host:port");
    characterize->add_option("--pol", cha.pols, "Polarization pairs (repeatable)");
    characterize->add_option("--span-mhz", cha.span_mhz, "Centred band used for the deviation summary");

    PathsArgs pth;
    auto *paths = app.add_subcommand("paths", "Export the propagation path table of a link");
    paths->add_option("--scene", pth.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    paths->add_option("--link", pth.link, "tx_ris, ris_rx or tx_rx");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        const auto subs = app.get_subcommands();
        print_error(subs.empty() ? "" : subs.front()->get_name(), "usage", e.what());
        return 2;
    }

    CLI::App *sub = app.get_subcommands().front();
    run.subcommand = sub->get_name();
    run.seed = seed;
    // CLI11 counts the environment fallback as an occurrence, so look at argv directly
    const bool seed_flag = std::any_of(argv + 1, argv + argc, [](const char *a) {
        const std::string_view v(a);
        return v == "--seed" || v.rfind("--seed=", 0) == 0;
    });
    if (seed_flag)
        run.seed_source = "flag";
    else if (std::getenv("RIS_LOCUS_SEED"))
        run.seed_source = "env";
    const bool seed_given = run.seed_source != "default";

    try
    {
        if (sub == pattern)
            run_pattern(run, pa);
        else if (sub == codebook)
            run_codebook(run, ca);
        else if (sub == sweep)
            run_sweep(run, sa);
        else if (sub == localize)
            run_localize(run, la, seed_given);
        else if (sub == map)
            run_map(run, ma, seed_given);
        else if (sub == greedy)
            run_greedy(run, ga);
        else if (sub == emulate)
        {
            run_emulate(run, ea);
            return 0; // manifest written before serving
        }
        else if (sub == characterize)
            run_characterize(run, cha);
        else if (sub == paths)
            run_paths(run, pth);
        run.manifest();
    }
    catch (const std::exception &e)
    {
        print_error(run.subcommand, "runtime", e.what());
        return 1;
    }
    return 0;
}
