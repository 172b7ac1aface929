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

#include "rislocus/emulator.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

using json = nlohmann::json;

namespace rislocus
{
    double FrequencyGrid::at(std::size_t k) const
    {
        if (points == 1)
            return start;
        return start + (stop - start) * double(k) / double(points - 1);
    }

    std::vector<double> FrequencyGrid::values() const
    {
        std::vector<double> v(points);
        for (std::size_t k = 0; k < points; ++k)
            v[k] = at(k);
        return v;
    }

    std::string to_string(PolPair p)
    {
        switch (p)
        {
        case PolPair::hh: return "hh";
        case PolPair::vv: return "vv";
        case PolPair::hv: return "hv";
        case PolPair::vh: return "vh";
        }
        return "hh";
    }

    PolPair pol_pair_from_string(const std::string &s)
    {
        if (s == "hh")
            return PolPair::hh;
        if (s == "vv")
            return PolPair::vv;
        if (s == "hv")
            return PolPair::hv;
        if (s == "vh")
            return PolPair::vh;
        throw std::invalid_argument("unknown polarization pair '" + s + "'");
    }

    EmulatorModel::EmulatorModel(const Scene &scene, FrequencyGrid grid, BitPhases states)
        : sc(scene), fg(grid), st(states)
    {
        sc.validate();
        if (sc.tx.size() != 1 || sc.rx.size() != 1)
            throw std::invalid_argument("EmulatorModel: Tx and Rx must be single antennas");
        if (fg.points < 1 || !(fg.start > 0.0) || fg.stop < fg.start)
            throw std::invalid_argument("EmulatorModel: invalid frequency grid");
        n_rows = std::size_t(sc.ris.n_v());
        n_cols = std::size_t(sc.ris.n_h());
        kappa = deg2rad(sc.dispersion_deg_per_mhz) / 1e6;

        const std::size_t n = sc.ris.size();
        hd.resize(fg.points);
        g.assign(fg.points, std::vector<cdouble>(n));
        for (std::size_t k = 0; k < fg.points; ++k)
        {
            Scene s = sc;
            s.carrier_hz = fg.at(k);
            const CMat h1 = link_channel(s, Link::tx_ris).sum();
            const CMat h2 = link_channel(s, Link::ris_rx).sum();
            hd[k] = link_channel(s, Link::tx_rx).sum()(0, 0);
            for (std::size_t e = 0; e < n; ++e)
                g[k][e] = h2(0, Eigen::Index(e)) * h1(Eigen::Index(e), 0);
        }
    }

    double EmulatorModel::element_phase(bool bit, std::size_t k) const
    {
        const double f0 = 0.5 * (fg.start + fg.stop);
        const double slope = 0.5 * kappa * (fg.at(k) - f0);
        return bit ? st.one + slope : st.zero - slope;
    }

    std::vector<cdouble> EmulatorModel::s21(const BitMatrix &config, PolPair pol) const
    {
        if (config.rows() != rows() || config.cols() != cols())
            throw std::invalid_argument("EmulatorModel: control matrix dimensions do not match the RIS");
        const bool tx_v = pol == PolPair::vv || pol == PolPair::vh;
        const bool co = pol == PolPair::hh || pol == PolPair::vv;
        const double c = std::sqrt(co ? 1.0 - sc.depolarization : sc.depolarization);
        std::vector<cdouble> out(fg.points);
        for (std::size_t k = 0; k < fg.points; ++k)
        {
            const cdouble s0 = unit_phasor(element_phase(false, k));
            const cdouble s1 = unit_phasor(element_phase(true, k));
            cdouble acc = hd[k];
            for (std::size_t r = 0; r < n_rows; ++r)
                for (std::size_t q = 0; q < n_cols; ++q)
                    acc += g[k][r * n_cols + q] * (config.get(r, 2 * q + (tx_v ? 1 : 0)) ? s1 : s0);
            out[k] = c * acc;
        }
        return out;
    }

    double band_power(const std::vector<cdouble> &s21)
    {
        if (s21.empty())
            return 0.0;
        double p = 0.0;
        for (const auto &v : s21)
            p += std::norm(v);
        return p / double(s21.size());
    }

    LocalInstrument::LocalInstrument(std::shared_ptr<const EmulatorModel> m, std::uint64_t seed_)
        : model(std::move(m)), state(model->rows(), model->cols()), seed(seed_)
    {
    }

    void LocalInstrument::set_config(const BitMatrix &config)
    {
        if (config.rows() != rows() || config.cols() != cols())
            throw std::invalid_argument("dims");
        state = config;
    }

    std::vector<cdouble> LocalInstrument::measure(PolPair pol)
    {
        auto s = model->s21(state, pol);
        const double sigma2 = model->scene().noise_power;
        if (sigma2 > 0.0)
        {
            std::mt19937_64 rng(mix_seed(seed, counter));
            const CMat w = complex_gaussian(1, Eigen::Index(s.size()), sigma2, rng);
            for (std::size_t k = 0; k < s.size(); ++k)
                s[k] += w(0, Eigen::Index(k));
        }
        ++counter;
        return s;
    }

    std::string encode_row(const BitMatrix &m, std::size_t row)
    {
        std::vector<unsigned char> bytes((m.cols() + 7) / 8, 0);
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(row, c))
                bytes[c / 8] |= (unsigned char)(0x80u >> (c % 8));
        std::string out(4 * ((bytes.size() + 2) / 3), '\0');
        const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()), bytes.data(), int(bytes.size()));
        out.resize(std::size_t(n));
        return out;
    }

    std::vector<bool> decode_row(const std::string &b64, std::size_t cols)
    {
        if (b64.size() % 4 != 0)
            throw std::invalid_argument("base64 length must be a multiple of 4");
        std::vector<unsigned char> buf(3 * (b64.size() / 4) + 1);
        const int n = EVP_DecodeBlock(buf.data(), reinterpret_cast<const unsigned char *>(b64.data()), int(b64.size()));
        if (n < 0)
            throw std::invalid_argument("invalid base64");
        std::size_t len = std::size_t(n);
        for (std::size_t i = b64.size(); i > 0 && b64[i - 1] == '='; --i)
            --len;
        if (len * 8 < cols || len != (cols + 7) / 8)
            throw std::length_error("row length does not match the control matrix");
        std::vector<bool> bits(cols);
        for (std::size_t c = 0; c < cols; ++c)
            bits[c] = (buf[c / 8] >> (7 - c % 8)) & 1u;
        return bits;
    }

    EmulatorServer::EmulatorServer(std::shared_ptr<const EmulatorModel> model, std::uint64_t seed, EmulatorOptions o)
        : inst(std::move(model), seed), opt(o)
    {
    }

    EmulatorServer::~EmulatorServer() { stop(); }

    std::string EmulatorServer::handle(const std::string &line)
    {
        std::lock_guard<std::mutex> lock(mtx);
        ++n_requests;
        json req;
        try
        {
            req = json::parse(line);
        }
        catch (const json::exception &)
        {
            return R"({"err":"parse"})";
        }
        if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string())
            return R"({"err":"cmd"})";
        const std::string cmd = req["cmd"];

        if (cmd == "hello")
        {
            json r = {{"ok", true},
                      {"ris", {{"rows", inst.rows()}, {"cols", inst.cols()}}},
                      {"freq_points", inst.freq_points()}};
            return r.dump();
        }
        if (cmd == "set_config")
        {
            if (!req.contains("rows") || !req["rows"].is_array())
                return R"({"err":"dims"})";
            const auto &rows = req["rows"];
            if (rows.size() != inst.rows())
                return R"({"err":"dims"})";
            BitMatrix m(inst.rows(), inst.cols());
            try
            {
                for (std::size_t r = 0; r < rows.size(); ++r)
                {
                    if (!rows[r].is_string())
                        return R"({"err":"dims"})";
                    const auto bits = decode_row(rows[r].get<std::string>(), inst.cols());
                    for (std::size_t c = 0; c < bits.size(); ++c)
                        m.set(r, c, bits[c]);
                }
            }
            catch (const std::length_error &)
            {
                return R"({"err":"dims"})";
            }
            catch (const std::invalid_argument &)
            {
                return R"({"err":"parse"})";
            }
            inst.set_config(m);
            if (opt.sleep && opt.latency_ms > 0.0)
                std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(opt.latency_ms));
            json r = {{"ok", true}, {"latency_ms", opt.latency_ms}};
            return r.dump();
        }
        if (cmd == "measure")
        {
            PolPair pol = PolPair::hh;
            if (req.contains("pol"))
            {
                try
                {
                    pol = pol_pair_from_string(req["pol"].get<std::string>());
                }
                catch (const std::exception &)
                {
                    return R"({"err":"cmd"})";
                }
            }
            const auto s = inst.measure(pol);
            json arr = json::array();
            for (const auto &v : s)
                arr.push_back({v.real(), v.imag()});
            json r = {{"s21", arr}};
            return r.dump();
        }
        return R"({"err":"cmd"})";
    }

    std::uint16_t EmulatorServer::start(const std::string &host, std::uint16_t port)
    {
        if (running)
            throw std::runtime_error("EmulatorServer: already running");
        listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd < 0)
            throw std::runtime_error("EmulatorServer: socket() failed");
        int one = 1;
        ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        {
            ::close(listen_fd);
            listen_fd = -1;
            throw std::invalid_argument("EmulatorServer: invalid IPv4 address '" + host + "'");
        }
        if (::bind(listen_fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd, 16) != 0)
        {
            const std::string err = std::strerror(errno);
            ::close(listen_fd);
            listen_fd = -1;
            throw std::runtime_error("EmulatorServer: cannot bind " + host + ":" + std::to_string(port) + ": " + err);
        }
        socklen_t len = sizeof(addr);
        ::getsockname(listen_fd, reinterpret_cast<sockaddr *>(&addr), &len);
        running = true;
        acceptor = std::thread([this] { accept_loop(); });
        return ntohs(addr.sin_port);
    }

    void EmulatorServer::accept_loop()
    {
        while (running)
        {
            const int fd = ::accept(listen_fd, nullptr, nullptr);
            if (fd < 0)
            {
                if (!running)
                    break;
                continue;
            }
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            std::lock_guard<std::mutex> lock(conn_mtx);
            conn_fds.push_back(fd);
            workers.emplace_back([this, fd] { serve_connection(fd); });
        }
    }

    static bool send_all(int fd, const std::string &s)
    {
        std::size_t off = 0;
        while (off < s.size())
        {
            const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
            if (n <= 0)
                return false;
            off += std::size_t(n);
        }
        return true;
    }

    void EmulatorServer::serve_connection(int fd)
    {
        std::string buf;
        char chunk[4096];
        while (running)
        {
            const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
            if (n <= 0)
                break;
            buf.append(chunk, std::size_t(n));
            std::size_t pos;
            while ((pos = buf.find('\n')) != std::string::npos)
            {
                std::string line = buf.substr(0, pos);
                buf.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                if (line.empty())
                    continue;
                if (!send_all(fd, handle(line) + "\n"))
                    return;
            }
        }
    }

    void EmulatorServer::stop()
    {
        if (!running.exchange(false))
            return;
        ::shutdown(listen_fd, SHUT_RDWR);
        ::close(listen_fd);
        listen_fd = -1;
        if (acceptor.joinable())
            acceptor.join();
        std::lock_guard<std::mutex> lock(conn_mtx);
        for (int fd : conn_fds)
            ::shutdown(fd, SHUT_RDWR);
        for (auto &t : workers)
            if (t.joinable())
                t.join();
        for (int fd : conn_fds)
            ::close(fd);
        workers.clear();
        conn_fds.clear();
    }

    EmulatorClient::EmulatorClient(const std::string &host, std::uint16_t port)
    {
        addrinfo hints{}, *res = nullptr;
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
            throw std::runtime_error("EmulatorClient: cannot resolve " + host);
        fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
        if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) != 0)
        {
            ::freeaddrinfo(res);
            if (fd >= 0)
                ::close(fd);
            throw std::runtime_error("EmulatorClient: cannot connect to " + host + ":" + std::to_string(port));
        }
        ::freeaddrinfo(res);
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

        const json hello = json::parse(request(R"({"cmd":"hello"})"));
        if (!hello.value("ok", false))
            throw std::runtime_error("EmulatorClient: handshake rejected");
        n_rows = hello["ris"]["rows"];
        n_cols = hello["ris"]["cols"];
        n_freq = hello["freq_points"];
    }

    EmulatorClient::~EmulatorClient()
    {
        if (fd >= 0)
            ::close(fd);
    }

    std::string EmulatorClient::request(const std::string &line)
    {
        if (!send_all(fd, line + "\n"))
            throw std::runtime_error("EmulatorClient: send failed");
        char chunk[65536];
        std::size_t pos;
        while ((pos = buffer.find('\n')) == std::string::npos)
        {
            const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
            if (n <= 0)
                throw std::runtime_error("EmulatorClient: connection closed");
            buffer.append(chunk, std::size_t(n));
        }
        std::string out = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        return out;
    }

    static void check_reply(const json &r)
    {
        if (r.contains("err"))
            throw std::runtime_error("emulator error: " + r["err"].get<std::string>());
    }

    void EmulatorClient::set_config(const BitMatrix &config)
    {
        json rows = json::array();
        for (std::size_t r = 0; r < config.rows(); ++r)
            rows.push_back(encode_row(config, r));
        const json reply = json::parse(request(json{{"cmd", "set_config"}, {"rows", rows}}.dump()));
        check_reply(reply);
    }

    std::vector<cdouble> EmulatorClient::measure(PolPair pol)
    {
        json req = {{"cmd", "measure"}};
        if (pol != PolPair::hh)
            req["pol"] = to_string(pol);
        const json reply = json::parse(request(req.dump()));
        check_reply(reply);
        std::vector<cdouble> s;
        s.reserve(reply["s21"].size());
        for (const auto &v : reply["s21"])
            s.emplace_back(v[0].get<double>(), v[1].get<double>());
        return s;
    }

    std::pair<std::string, std::uint16_t> parse_endpoint(const std::string &s)
    {
        const auto colon = s.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
            throw std::invalid_argument("endpoint must be host:port, got '" + s + "'");
        const int port = std::stoi(s.substr(colon + 1));
        if (port < 0 || port > 65535)
            throw std::invalid_argument("port out of range in '" + s + "'");
        return {s.substr(0, colon), std::uint16_t(port)};
    }

    PowerOracle instrument_oracle(Instrument &inst, PolPair pol)
    {
        return [&inst, pol](const BitMatrix &m) {
            inst.set_config(m);
            return band_power(inst.measure(pol));
        };
    }

    BitMatrix config_to_bits(const PhaseConfig &config, std::size_t rows, std::size_t cols)
    {
        const std::size_t n = rows * (cols / 2);
        BitMatrix m(rows, cols);
        const bool dual = config.dual_polarized();
        if ((dual && config.size() != 2 * n) || (!dual && config.size() != n))
            throw std::invalid_argument("config_to_bits: config size does not match the control matrix");
        for (std::size_t e = 0; e < n; ++e)
        {
            const std::size_t r = e / (cols / 2), c = e % (cols / 2);
            const bool h = config.phases()[e] > 0.0;
            const bool v = dual ? config.phases()[n + e] > 0.0 : h;
            m.set(r, 2 * c, h);
            m.set(r, 2 * c + 1, v);
        }
        return m;
    }

    SignalBlock InstrumentMeasurement::measure(const PhaseConfig &config)
    {
        inst.set_config(config_to_bits(config, inst.rows(), inst.cols()));
        const auto s = inst.measure(pol);
        ++calls;
        CMat block(1, Eigen::Index(s.size()));
        for (std::size_t k = 0; k < s.size(); ++k)
            block(0, Eigen::Index(k)) = s[k];
        return SignalBlock(std::move(block));
    }

    PhaseTable phase_characterization(Instrument &inst, PolPair pol)
    {
        BitMatrix m(inst.rows(), inst.cols());
        inst.set_config(m);
        const auto s0 = inst.measure(pol);
        m.flip_row(0);
        for (std::size_t r = 1; r < m.rows(); ++r)
            m.flip_row(r);
        inst.set_config(m);
        const auto s1 = inst.measure(pol);
        if (s0.size() != s1.size() || s0.empty())
            throw std::runtime_error("phase_characterization: inconsistent sweeps");

        PhaseTable t;
        t.delta_deg.resize(s0.size());
        t.freqs.resize(s0.size());
        FrequencyGrid fg;
        fg.points = s0.size();
        for (std::size_t k = 0; k < s0.size(); ++k)
        {
            t.freqs[k] = fg.at(k);
            double d = rad2deg(std::arg(s1[k]) - std::arg(s0[k]));
            d = std::fmod(d, 360.0);
            if (d < 0.0)
                d += 360.0;
            if (k > 0)
                d += 360.0 * std::round((t.delta_deg[k - 1] - d) / 360.0);
            t.delta_deg[k] = d;
        }
        return t;
    }
}
