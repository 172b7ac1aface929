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
#include "rislocus/greedyopt.hpp"
#include "rislocus/protocol.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rislocus
{
    struct FrequencyGrid
    {
        double start = 3.4e9;
        double stop = 3.6e9;
        std::size_t points = 801;

        double at(std::size_t k) const;
        std::vector<double> values() const;
    };

    enum class PolPair
    {
        hh,
        vv,
        hv,
        vh
    };

    std::string to_string(PolPair p);
    PolPair pol_pair_from_string(const std::string &s);

    // Frequency-swept S21 of a SISO link through a dual-polarized 1-bit RIS (co-located H/V elements)
    class EmulatorModel
    {
    public:
        explicit EmulatorModel(const Scene &scene, FrequencyGrid grid = {}, BitPhases states = {});

        std::size_t rows() const { return n_rows; }
        std::size_t cols() const { return 2 * n_cols; } // control columns
        const FrequencyGrid &grid() const { return fg; }
        const Scene &scene() const { return sc; }

        std::vector<cdouble> s21(const BitMatrix &config, PolPair pol = PolPair::hh) const;

        // Element phase for a bit state at frequency index k (dispersion applied)
        double element_phase(bool bit, std::size_t k) const;

    private:
        Scene sc;
        FrequencyGrid fg;
        BitPhases st;
        std::size_t n_rows, n_cols;
        double kappa; // rad / Hz
        std::vector<cdouble> hd;             // per frequency
        std::vector<std::vector<cdouble>> g; // per frequency, per element
    };

    double band_power(const std::vector<cdouble> &s21);

    // Anything that takes a control matrix and returns a frequency sweep
    class Instrument
    {
    public:
        virtual ~Instrument() = default;
        virtual std::size_t rows() const = 0;
        virtual std::size_t cols() const = 0;
        virtual std::size_t freq_points() const = 0;
        virtual void set_config(const BitMatrix &config) = 0;
        virtual std::vector<cdouble> measure(PolPair pol = PolPair::hh) = 0;
    };

    // In-process instrument. Noise is drawn from (seed, measure counter).
    class LocalInstrument : public Instrument
    {
    public:
        LocalInstrument(std::shared_ptr<const EmulatorModel> model, std::uint64_t seed);

        std::size_t rows() const override { return model->rows(); }
        std::size_t cols() const override { return model->cols(); }
        std::size_t freq_points() const override { return model->grid().points; }
        void set_config(const BitMatrix &config) override;
        std::vector<cdouble> measure(PolPair pol = PolPair::hh) override;

        const BitMatrix &config() const { return state; }

    private:
        std::shared_ptr<const EmulatorModel> model;
        BitMatrix state;
        std::uint64_t seed;
        std::uint64_t counter = 0;
    };

    // Base64 of a bit row packed MSB first
    std::string encode_row(const BitMatrix &m, std::size_t row);
    std::vector<bool> decode_row(const std::string &b64, std::size_t cols);

    struct EmulatorOptions
    {
        double latency_ms = 10.0;
        bool sleep = false; // actually wait latency_ms on set_config
    };

    class EmulatorServer
    {
    public:
        EmulatorServer(std::shared_ptr<const EmulatorModel> model, std::uint64_t seed, EmulatorOptions opt = {});
        ~EmulatorServer();

        EmulatorServer(const EmulatorServer &) = delete;
        EmulatorServer &operator=(const EmulatorServer &) = delete;

        // One newline-free JSON command in, one JSON response out (serialized)
        std::string handle(const std::string &line);

        // Binds and starts accepting; returns the bound port (pass 0 for an ephemeral port)
        std::uint16_t start(const std::string &host, std::uint16_t port);
        void stop();
        std::size_t requests() const { return n_requests; }

    private:
        LocalInstrument inst;
        EmulatorOptions opt;
        std::mutex mtx;
        std::size_t n_requests = 0;
        int listen_fd = -1;
        std::atomic<bool> running{false};
        std::thread acceptor;
        std::mutex conn_mtx;
        std::vector<std::thread> workers;
        std::vector<int> conn_fds;

        void accept_loop();
        void serve_connection(int fd);
    };

    class EmulatorClient : public Instrument
    {
    public:
        EmulatorClient(const std::string &host, std::uint16_t port);
        ~EmulatorClient() override;

        EmulatorClient(const EmulatorClient &) = delete;
        EmulatorClient &operator=(const EmulatorClient &) = delete;

        std::string request(const std::string &line); // raw round trip

        std::size_t rows() const override { return n_rows; }
        std::size_t cols() const override { return n_cols; }
        std::size_t freq_points() const override { return n_freq; }
        void set_config(const BitMatrix &config) override;
        std::vector<cdouble> measure(PolPair pol = PolPair::hh) override;

    private:
        int fd = -1;
        std::string buffer;
        std::size_t n_rows = 0, n_cols = 0, n_freq = 0;
    };

    // "host:port"
    std::pair<std::string, std::uint16_t> parse_endpoint(const std::string &s);

    // set_config then measure; power = mean |S21|^2 over the band
    PowerOracle instrument_oracle(Instrument &inst, PolPair pol = PolPair::hh);

    // Codebook-driven measurements through an instrument: 1-bit phases map to bits (phase > 0 -> 1)
    // and unipolar configs drive H and V alike. The block is 1 x points.
    class InstrumentMeasurement : public MeasurementFn
    {
    public:
        InstrumentMeasurement(Instrument &inst, PolPair pol = PolPair::hh) : inst(inst), pol(pol) {}
        SignalBlock measure(const PhaseConfig &config) override;

    private:
        Instrument &inst;
        PolPair pol;
    };

    BitMatrix config_to_bits(const PhaseConfig &config, std::size_t rows, std::size_t cols);

    struct PhaseTable
    {
        std::vector<double> freqs;     // Hz
        std::vector<double> delta_deg; // unwrapped phase difference state 1 - state 0
    };

    PhaseTable phase_characterization(Instrument &inst, PolPair pol = PolPair::hh);
}
