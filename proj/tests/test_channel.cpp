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


#include "doctest.h"

#include "rislocus/channel.hpp"
#include "rislocus/pattern.hpp"

#include <cmath>
#include <limits>

using namespace rislocus;

static const CarrierSpec carrier(3.5e9);
static const double lam = carrier.wavelength();

static Scene siso_scene()
{
    Scene s;
    s.tx = ArrayGeometry::ula(1, lam / 2).placed(Vec3(0.0, 0.0, 1.0), 0.0);
    s.rx = ArrayGeometry::ula(1, lam / 2).placed(Vec3(4.0, 3.0, 1.0), 0.0);
    s.ris = ArrayGeometry::ula(8, lam / 2).placed(Vec3(6.0, -2.0, 1.0), pi);
    return s;
}

// Largest |2x2 minor| of a matrix; zero for rank one
static double max_minor(const CMat &m)
{
    double worst = 0.0;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = a + 1; b < m.rows(); ++b)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index d = c + 1; d < m.cols(); ++d)
                    worst = std::max(worst, std::abs(m(a, c) * m(b, d) - m(a, d) * m(b, c)));
    return worst;
}

TEST_CASE("path synthesis")
{
    Scene s = siso_scene();
    auto p = synth_paths(s, Link::tx_rx);
    REQUIRE(p.size() == 1);
    CHECK(p[0].kind == PathKind::los);
    CHECK(p[0].length == doctest::Approx(5.0));
    CHECK(p[0].delay == doctest::Approx(5.0 / speed_of_light));
    CHECK(p[0].gain == doctest::Approx(lam / (4 * pi * 5.0)));
    CHECK(p[0].aod.azimuth() == doctest::Approx(std::atan2(3.0, 4.0)));
    CHECK(p[0].aoa.azimuth() == doctest::Approx(std::atan2(-3.0, -4.0)));

    s.blocked_direct = true;
    CHECK(synth_paths(s, Link::tx_rx).empty());
    const auto z = link_channel(s, Link::tx_rx);
    CHECK(z.length() == 1);
    CHECK(z.taps[0].isZero(0.0));

    s.scatterers.push_back({Vec3(2.0, 4.0, 1.0), 0.5, {Link::tx_rx}});
    p = synth_paths(s, Link::tx_rx);
    REQUIRE(p.size() == 1);
    const double len = std::sqrt(4.0 + 16.0) + std::sqrt(4.0 + 1.0);
    CHECK(p[0].kind == PathKind::nlos);
    CHECK(p[0].length == doctest::Approx(len));
    CHECK(p[0].gain == doctest::Approx(0.5 * lam / (4 * pi * len)));
    CHECK(p[0].aoa.azimuth() == doctest::Approx(std::atan2(1.0, -2.0)));
    CHECK(synth_paths(s, Link::tx_ris).size() == 1); // scatterer not attached to this link

    s.blocked_direct = false;
    p = synth_paths(s, Link::tx_rx);
    REQUIRE(p.size() == 2);
    CHECK(p[1].delay >= p[0].delay);
}

TEST_CASE("indoor path table azimuths")
{
    // UE placed so the RIS is seen at 53.75 degrees; a wall point seen at 47.91 degrees
    Scene s;
    const Vec3 ue(2.0, 6.0, 1.3);
    const double los = deg2rad(53.75), nlos = deg2rad(47.91);
    s.rx = ArrayGeometry::ula(8, lam / 2).placed(ue, pi / 2);
    s.ris = ArrayGeometry(32, 32, lam / 2, lam / 2).placed(ue + 5.0 * Vec3(std::cos(los), std::sin(los), 0.0), 0.0);
    s.tx = ArrayGeometry::ula(1, lam / 2).placed(Vec3(9.0, 1.0, 1.3), 0.0);
    s.scatterers.push_back({ue + 4.0 * Vec3(std::cos(nlos), std::sin(nlos), 0.0), 0.7, {Link::ris_rx}});
    const auto p = synth_paths(s, Link::ris_rx);
    REQUIRE(p.size() == 2);
    CHECK(rad2deg(p[0].aoa.azimuth()) == doctest::Approx(53.75).epsilon(1e-12));
    CHECK(rad2deg(p[1].aoa.azimuth()) == doctest::Approx(47.91).epsilon(1e-12));
    CHECK(std::abs(p[1].aoa.elevation()) < 1e-12);
    CHECK(p[1].delay > p[0].delay);
}

TEST_CASE("freespace loss")
{
    CHECK(std::abs(freespace_loss_db(lam / (4 * pi), carrier)) < 1e-12);
    CHECK(freespace_loss_db(6.0, carrier) - freespace_loss_db(3.0, carrier) == doctest::Approx(20 * std::log10(2.0)));
    CHECK(freespace_loss_db(8.5, carrier) == doctest::Approx(61.9).epsilon(1e-3));
    CHECK(freespace_amplitude(8.5, carrier) == doctest::Approx(std::pow(10.0, -freespace_loss_db(8.5, carrier) / 20)));
    CHECK_THROWS_AS(freespace_loss_db(0.0, carrier), std::invalid_argument);
    CHECK_THROWS_AS(freespace_amplitude(-1.0, carrier), std::invalid_argument);
}

TEST_CASE("channel matrix taps")
{
    const ArrayGeometry one = ArrayGeometry::ula(1, lam / 2);
    PropagationPath p;
    p.gain = 0.01;
    p.delay = 123.4e-9;
    p.aoa = Direction(0.3);
    p.aod = Direction(-0.2);
    const auto h = channel_matrix({p}, one, one, carrier, 100e6);
    REQUIRE(h.length() == 13);
    const cdouble want = p.gain * std::exp(cdouble(0.0, -2.0 * pi * p.delay * carrier.frequency()));
    for (std::size_t n = 0; n < h.length(); ++n)
        if (n == 12)
            CHECK(std::abs(h.taps[n](0, 0) - want) < 1e-12 * p.gain * 1e3);
        else
            CHECK(h.taps[n](0, 0) == cdouble(0.0));
    CHECK_THROWS_AS(channel_matrix({}, one, one, carrier, 100e6), std::invalid_argument);

    const ArrayGeometry rx = ArrayGeometry::ula(4, lam / 2), tx = ArrayGeometry(3, 2, lam / 2, lam / 2);
    const auto hm = channel_matrix({p}, tx, rx, carrier, 100e6);
    CHECK(hm.rows() == 4);
    CHECK(hm.cols() == 6);
    CHECK(max_minor(hm.taps[12]) < 1e-15);

    PropagationPath q = p;
    q.gain = 0.003;
    q.delay = 257.0e-9;
    q.aoa = Direction(-0.9, 0.1);
    const auto h2 = channel_matrix({p, q}, tx, rx, carrier, 100e6);
    CHECK(h2.length() == 26);
    CHECK(h2.taps[12].norm() == doctest::Approx(p.gain * std::sqrt(24.0)));
    CHECK(h2.taps[25].norm() == doctest::Approx(q.gain * std::sqrt(24.0)));
}

TEST_CASE("tap ordering follows delay ordering")
{
    for (double a = 0.0; a < 300e-9; a += 7.3e-9)
        for (double b = a; b < 300e-9; b += 11.1e-9)
            CHECK(tap_index(a, 100e6) <= tap_index(b, 100e6));
    CHECK(tap_index(0.0, 100e6) == 0);
    CHECK(tap_index(10e-9, 100e6) == 1);
    CHECK_THROWS_AS(tap_index(-1e-9, 100e6), std::invalid_argument);
}

TEST_CASE("cascade equals reflect pattern")
{
    const Scene s = siso_scene();
    const auto h1 = link_channel(s, Link::tx_ris), h2 = link_channel(s, Link::ris_rx);
    const Direction inc = s.ris.pose().to_local(Direction::from_vector(s.tx.global_centroid() - s.ris.global_centroid()));
    const Direction out = s.ris.pose().to_local(Direction::from_vector(s.rx.global_centroid() - s.ris.global_centroid()));
    const auto zero_d = ChannelMatrix::zero(1, 1, s.sampling_hz);
    const double g1 = synth_paths(s, Link::tx_ris)[0].gain, g2 = synth_paths(s, Link::ris_rx)[0].gain;

    const auto opt = optimal_config({inc, out}, s.ris, carrier);
    const CMat r = narrowband_response(h1, h2, zero_d, opt);
    CHECK(std::abs(r(0, 0)) == doctest::Approx(g1 * g2 * 8.0));

    const PhaseConfig other({0.1, -0.4, 2.0, 1.1, 0.0, 3.0, -2.2, 0.7});
    const CMat r2 = narrowband_response(h1, h2, zero_d, other);
    CHECK(std::norm(r2(0, 0)) == doctest::Approx(g1 * g1 * g2 * g2 * pattern_reflect(other, inc, s.ris, carrier, out)));
}

TEST_CASE("received signal composition")
{
    // Unit single-tap channels with delays 2 and 3 samples
    ChannelMatrix h1 = ChannelMatrix::zero(1, 1, 100e6), h2 = h1, hd = h1;
    h1.taps.assign(3, CMat::Zero(1, 1));
    h1.taps[2](0, 0) = 1.0;
    h2.taps.assign(4, CMat::Zero(1, 1));
    h2.taps[3](0, 0) = 1.0;
    CMat x(1, 4);
    x << cdouble(1, 0), cdouble(0, 1), cdouble(-1, 0.5), cdouble(0.25, -2);
    const auto r = received(h1, h2, hd, PhaseConfig::uniform(1, 0.0), SignalBlock(x), 0.0, 1);
    REQUIRE(r.samples.cols() == 4 + 2 + 3);
    for (Eigen::Index t = 0; t < r.samples.cols(); ++t)
        CHECK(r.samples(0, t) == (t >= 5 ? x(0, t - 5) : cdouble(0.0)));
}

TEST_CASE("RIS contribution is linear in the configuration")
{
    Scene s = siso_scene();
    s.scatterers.push_back({Vec3(3.0, -1.0, 1.0), 0.6});
    const auto h1 = link_channel(s, Link::tx_ris), h2 = link_channel(s, Link::ris_rx), hd = link_channel(s, Link::tx_rx);
    CMat x(1, 16);
    for (int t = 0; t < 16; ++t)
        x(0, t) = std::polar(1.0, 0.7 * t * t);
    const PhaseConfig cfg({0.1, -0.4, 2.0, 1.1, 0.0, 3.0, -2.2, 0.7});
    const auto a = received_parts(h1, h2, hd, cfg, x);
    const auto b = received_parts(h1, h2, hd, cfg.negated(), x);
    CHECK((a.ris + b.ris).norm() <= 1e-12 * a.ris.norm());
    CHECK(a.direct == b.direct);

    const auto c = received_parts(h1, h2, hd, cfg.rotated(1.3), x);
    for (Eigen::Index t = 0; t < a.ris.cols(); ++t)
        CHECK(std::abs(c.ris(0, t)) == doctest::Approx(std::abs(a.ris(0, t))).epsilon(1e-9));

    // additivity in x
    CMat y = CMat::Zero(1, 16);
    y(0, 3) = cdouble(0.5, -1.0);
    const auto py = received_parts(h1, h2, hd, cfg, y), pxy = received_parts(h1, h2, hd, cfg, x + y);
    CHECK((pxy.ris - a.ris - py.ris).norm() <= 1e-12 * pxy.ris.norm());
    CHECK((pxy.direct - a.direct - py.direct).norm() <= 1e-12 * pxy.direct.norm());

    // operator-norm bound with single-tap (narrowband) channels
    const CMat H1 = h1.sum(), H2 = h2.sum(), Hd = hd.sum();
    ChannelMatrix n1 = ChannelMatrix::zero(8, 1, 100e6), n2 = ChannelMatrix::zero(1, 8, 100e6), nd = ChannelMatrix::zero(1, 1, 100e6);
    n1.taps[0] = H1;
    n2.taps[0] = H2;
    nd.taps[0] = Hd;
    const CMat xs = x.leftCols(1);
    const auto r = received(n1, n2, nd, cfg, SignalBlock(xs), 0.0, 0);
    const double bound = (H2.norm() * H1.norm() + Hd.norm()) * xs.norm(); // Frobenius >= operator norm
    CHECK(r.samples.norm() <= bound * (1 + 1e-12));

    CHECK_THROWS_AS(received_parts(h1, h2, hd, PhaseConfig::uniform(4, 0.0), x), std::invalid_argument);
    CHECK_THROWS_AS(received_parts(h1, h2, hd, cfg, CMat::Zero(2, 4)), std::invalid_argument);
}

TEST_CASE("noise is seeded and has the requested variance")
{
    const auto h = ChannelMatrix::zero(1, 1, 100e6);
    const SignalBlock x(CMat::Zero(1, 100000));
    const double s2 = 0.37;
    const auto a = received(h, h, h, PhaseConfig::uniform(1, 0.0), x, s2, 42);
    const auto b = received(h, h, h, PhaseConfig::uniform(1, 0.0), x, s2, 42);
    const auto c = received(h, h, h, PhaseConfig::uniform(1, 0.0), x, s2, 43);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    double acc = 0.0, re = 0.0, im = 0.0;
    for (Eigen::Index t = 0; t < a.samples.cols(); ++t)
    {
        acc += std::norm(a.samples(0, t));
        re += a.samples(0, t).real() * a.samples(0, t).real();
        im += a.samples(0, t).imag() * a.samples(0, t).imag();
    }
    const double n = double(a.samples.cols());
    CHECK(std::abs(acc / n - s2) < 0.02 * s2);
    CHECK(std::abs(re / n - s2 / 2) < 0.02 * s2); // circular: power split evenly
    CHECK(std::abs(im / n - s2 / 2) < 0.02 * s2);
    CHECK(a.noise_power == s2);
    CHECK_THROWS_AS(received(h, h, h, PhaseConfig::uniform(1, 0.0), x, -1.0, 0), std::invalid_argument);
}

TEST_CASE("cross-polarization discrimination")
{
    CHECK(xpd_ratio(0.0) == std::numeric_limits<double>::infinity());
    CHECK(xpd_ratio(0.5) == 1.0);
    CHECK(xpd_ratio(0.2) == doctest::Approx(4.0));
    CHECK_THROWS_AS(xpd_ratio(1.0), std::invalid_argument);
    CHECK_THROWS_AS(xpd_ratio(-0.1), std::invalid_argument);
}

TEST_CASE("scene validation")
{
    Scene s = siso_scene();
    CHECK_NOTHROW(s.validate());
    s.scatterers.push_back({s.rx.global_centroid(), 0.5});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.scatterers.back().position = Vec3(1, 1, 1);
    s.scatterers.back().gain = 1.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.scatterers.back().gain = 1.0;
    s.depolarization = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
