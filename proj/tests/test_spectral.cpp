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

#include "oracles.hpp"
#include "rislocus/spectral.hpp"

#include <cmath>
#include <random>

using namespace rislocus;

static const CarrierSpec carrier(3.5e9);
static const double lam = carrier.wavelength();
static const std::vector<double> deg_grid = linspace(-pi / 2, pi / 2, 181); // 1 degree bins

static std::size_t bin_of(double phi)
{
    return std::size_t(std::lround(rad2deg(phi) + 90.0));
}

static CVec ula_vec(std::size_t m, double phi)
{
    CVec a(Eigen::Index(m), 1);
    for (std::size_t n = 0; n < m; ++n)
        a(Eigen::Index(n)) = oracle::ula_entry(n, lam / 2, lam, phi);
    return a;
}

static oracle::Mat to_oracle(const CMat &r)
{
    oracle::Mat m(std::size_t(r.rows()), std::vector<oracle::cd>(std::size_t(r.cols())));
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            m[std::size_t(i)][std::size_t(j)] = r(i, j);
    return m;
}

static CMat random_hermitian(Eigen::Index m, std::mt19937_64 &rng)
{
    std::normal_distribution<double> nd;
    CMat a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            a(i, j) = {nd(rng), nd(rng)};
    return a * a.adjoint();
}

// Snapshots from unit-power sources with random QPSK symbols plus complex noise
static CMat sources_snapshots(std::size_t m, const std::vector<double> &phis, double noise, std::size_t t,
                              std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sym(0, 3);
    std::normal_distribution<double> nd(0.0, std::sqrt(noise / 2));
    CMat x = CMat::Zero(Eigen::Index(m), Eigen::Index(t));
    for (std::size_t c = 0; c < t; ++c)
    {
        for (double phi : phis)
            x.col(Eigen::Index(c)) += ula_vec(m, phi) * std::polar(1.0, pi / 4 + pi / 2 * sym(rng));
        for (std::size_t r = 0; r < m; ++r)
            x(Eigen::Index(r), Eigen::Index(c)) += oracle::cd(nd(rng), nd(rng));
    }
    return x;
}

static SteeringGrid ula_grid(std::size_t m)
{
    return make_steering_grid(ArrayGeometry::ula(int(m), lam / 2), carrier, deg_grid);
}

TEST_CASE("sample covariance")
{
    CMat x(3, 1);
    x << oracle::cd(1, 2), oracle::cd(0, -1), oracle::cd(0.5, 0);
    const auto c = sample_covariance(x);
    CHECK(c.snapshots_used == 1);
    CHECK((c.R - x * x.adjoint()).norm() < 1e-15);

    const auto id = sample_covariance(CMat::Identity(5, 5));
    CHECK((id.R - CMat::Identity(5, 5) / 5.0).norm() < 1e-15);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CMat w(4, 100000);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < 4; ++i)
            w(i, j) = {nd(rng), nd(rng)};
    const auto cw = sample_covariance(w);
    CHECK((cw.R - CMat::Identity(4, 4)).norm() / 2.0 < 0.05);
    CHECK((cw.R - cw.R.adjoint()).norm() == 0.0);

    CHECK_THROWS_AS(sample_covariance(CMat(3, 0)), std::invalid_argument);
}

TEST_CASE("Hermitian eigensolver agrees with a Jacobi oracle")
{
    std::mt19937_64 rng(11);
    for (Eigen::Index m = 1; m <= 8; ++m)
    {
        const CMat r = random_hermitian(m, rng);
        const auto e = hermitian_eigen(r);
        const auto o = oracle::jacobi_hermitian(to_oracle(r));
        const double scale = r.norm();
        for (Eigen::Index k = 0; k < m; ++k)
        {
            CHECK(std::abs(e.values(k) - o.values[std::size_t(k)]) < 1e-10 * scale);
            if (k > 0)
                CHECK(e.values(k) <= e.values(k - 1));
            // same eigenvector up to a phase (random spectra have distinct eigenvalues)
            oracle::cd ip = 0.0;
            for (Eigen::Index i = 0; i < m; ++i)
                ip += std::conj(o.vectors[std::size_t(k)][std::size_t(i)]) * e.vectors(i, k);
            CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-8));
        }
        const CMat back = e.vectors * e.values.cast<cdouble>().asDiagonal() * e.vectors.adjoint();
        CHECK((back - r).norm() <= 1e-8 * scale);
    }
    CMat bad = CMat::Identity(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigen(bad), std::invalid_argument);
    CHECK_THROWS_AS(hermitian_eigen(CMat(2, 3)), std::invalid_argument);
}

TEST_CASE("noise subspace")
{
    std::mt19937_64 rng(3);
    const CMat r = random_hermitian(6, rng);
    const auto ns = noise_subspace(r, 2);
    CHECK(ns.basis.cols() == 4);
    CHECK(ns.sources == 2);
    CHECK((ns.basis.adjoint() * ns.basis - CMat::Identity(4, 4)).norm() < 1e-8);
    const auto o = oracle::jacobi_hermitian(to_oracle(r));
    // projector onto the oracle's smallest four eigenvectors matches
    CMat p = CMat::Zero(6, 6);
    for (std::size_t k = 2; k < 6; ++k)
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < 6; ++j)
                p(i, j) += o.vectors[k][std::size_t(i)] * std::conj(o.vectors[k][std::size_t(j)]);
    CHECK((p - ns.basis * ns.basis.adjoint()).norm() < 1e-8);
    CHECK_THROWS_AS(noise_subspace(r, 0), std::invalid_argument);
    CHECK_THROWS_AS(noise_subspace(r, 6), std::invalid_argument);
}

TEST_CASE("Bartlett spectrum")
{
    const auto g8 = ula_grid(8);
    const auto flat = bartlett({CMat::Identity(8, 8), 1}, g8);
    for (double v : flat.values())
        CHECK(v == doctest::Approx(8.0));

    const CVec a0 = ula_vec(8, deg2rad(20));
    const auto one = bartlett({a0 * a0.adjoint(), 1}, g8);
    CHECK(one.peak_index() == bin_of(deg2rad(20)));
    CHECK(one.peak_value() == doctest::Approx(64.0));

    const CVec a1 = ula_vec(8, deg2rad(30)), a2 = ula_vec(8, deg2rad(-30));
    const auto two = bartlett({a1 * a1.adjoint() + a2 * a2.adjoint(), 1}, g8);
    const auto maxima = oracle::local_maxima(two.values());
    auto has = [&](std::size_t b) { return std::find(maxima.begin(), maxima.end(), b) != maxima.end(); };
    CHECK(has(bin_of(deg2rad(30))));
    CHECK(has(bin_of(deg2rad(-30))));

    CHECK_THROWS_AS(bartlett({CMat::Identity(4, 4), 1}, g8), std::invalid_argument);
}

TEST_CASE("Capon spectrum")
{
    const auto g8 = ula_grid(8);
    const auto flat = capon({CMat::Identity(8, 8), 1}, g8, 0.0);
    for (double v : flat.values())
        CHECK(v == doctest::Approx(1.0 / 8.0));

    const auto cov = sample_covariance(sources_snapshots(8, {deg2rad(12)}, 0.1, 500, 5));
    const auto cp = capon(cov, g8), bt = bartlett(cov, g8);
    CHECK(cp.peak_index() == bin_of(deg2rad(12)));
    CHECK(bt.peak_index() == bin_of(deg2rad(12)));
    auto width = [](const Spectrum &s) {
        std::size_t n = 0;
        for (double v : s.values())
            n += v >= 0.5 * s.peak_value();
        return n;
    };
    CHECK(width(cp) < width(bt));

    const CVec a0 = ula_vec(8, 0.3);
    CHECK_THROWS_AS(capon({a0 * a0.adjoint(), 1}, g8, 0.0), std::runtime_error);
    CHECK_NOTHROW(capon({a0 * a0.adjoint(), 1}, g8));
    CHECK_THROWS_AS(capon(cov, g8, -1.0), std::invalid_argument);
}

TEST_CASE("MUSIC agrees with an oracle evaluation")
{
    for (std::size_t m : {4u, 8u, 16u})
    {
        const auto g = ula_grid(m);
        const CVec a0 = ula_vec(m, deg2rad(30));
        const CMat r = a0 * a0.adjoint();
        const auto s = music({r, 1}, 1, g);
        CHECK(s.peak_index() == bin_of(deg2rad(30)));

        const auto o = oracle::jacobi_hermitian(to_oracle(r));
        std::size_t best = 0;
        double bv = -1.0;
        for (std::size_t i = 0; i < deg_grid.size(); ++i)
        {
            const CVec a = ula_vec(m, deg_grid[i]);
            const double v = oracle::music_value(o, 1, std::vector<oracle::cd>(a.data(), a.data() + a.size()));
            if (v > bv)
                bv = v, best = i;
        }
        CHECK(best == s.peak_index());
    }
}

TEST_CASE("MUSIC properties")
{
    const auto g8 = ula_grid(8);
    const auto flat = music({CMat::Identity(8, 8), 1}, 1, g8);
    CHECK(flat.peak_index() == 0);

    // rank-2 noiseless covariance: the two largest values sit on the source bins
    const CVec a1 = ula_vec(8, deg2rad(-17)), a2 = ula_vec(8, deg2rad(41));
    const CMat r = a1 * a1.adjoint() + 0.5 * a2 * a2.adjoint();
    const auto s = music({r, 1}, 2, g8);
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return s.values()[x] > s.values()[y]; });
    std::vector<std::size_t> top = {order[0], order[1]};
    std::sort(top.begin(), top.end());
    CHECK(top[0] == bin_of(deg2rad(-17)));
    CHECK(top[1] == bin_of(deg2rad(41)));

    // scale invariance of the argmax
    const auto cov = sample_covariance(sources_snapshots(8, {deg2rad(-5)}, 0.2, 200, 9));
    const Covariance scaled{cov.R * 37.5, cov.snapshots_used};
    CHECK(music(cov, 1, g8).peak_index() == music(scaled, 1, g8).peak_index());
    CHECK(capon(cov, g8).peak_index() == capon(scaled, g8).peak_index());
    CHECK(bartlett(cov, g8).peak_index() == bartlett(scaled, g8).peak_index());

    CHECK_THROWS_AS(music(cov, 0, g8), std::invalid_argument);
    CHECK_THROWS_AS(music(cov, 8, g8), std::invalid_argument);
}

TEST_CASE("MUSIC resolves two sources 20 degrees apart")
{
    const auto g8 = ula_grid(8);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto cov = sample_covariance(sources_snapshots(8, {deg2rad(10), deg2rad(30)}, 0.01, 1000, seed));
        const auto pk = find_peaks(music(cov, 2, g8), 2);
        if (pk.size() != 2)
            continue;
        std::vector<std::size_t> b = {pk[0].index, pk[1].index};
        std::sort(b.begin(), b.end());
        const long d0 = long(b[0]) - long(bin_of(deg2rad(10))), d1 = long(b[1]) - long(bin_of(deg2rad(30)));
        ok += std::abs(d0) <= 1 && std::abs(d1) <= 1;
    }
    CHECK(ok == 20);
}

TEST_CASE("angle-delay MUSIC")
{
    const std::size_t m = 4, mf = 8;
    std::vector<double> sub(mf);
    for (std::size_t f = 0; f < mf; ++f)
        sub[f] = double(f) * 1e6;
    const auto ga = ula_grid(m);
    std::vector<double> delays;
    for (int i = 0; i <= 100; ++i)
        delays.push_back(i * 10e-9); // 0..1 us in 10 ns steps

    auto joint = [&](double phi, double tau) {
        const CVec a = ula_vec(m, phi), b = delay_steering(sub, tau);
        CVec v(Eigen::Index(m * mf));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t f = 0; f < mf; ++f)
                v(Eigen::Index(i * mf + f)) = a(Eigen::Index(i)) * b(Eigen::Index(f));
        return v;
    };

    const CVec b = delay_steering(sub, 100e-9);
    for (Eigen::Index f = 0; f < b.size(); ++f)
    {
        CHECK(std::abs(b(f)) == doctest::Approx(1.0));
        CHECK(std::arg(b(f) * std::polar(1.0, 2 * pi * sub[std::size_t(f)] * 100e-9)) == doctest::Approx(0.0).epsilon(1e-9));
    }

    const CVec v = joint(deg2rad(30), 100e-9);
    const auto s = music2d({v * v.adjoint(), 1}, 1, ga, delays, sub);
    const auto idx = s.indices(s.peak_index());
    CHECK(idx[0] == bin_of(deg2rad(30)));
    CHECK(idx[1] == 10);

    // same angle, two delays: two peaks separated along the delay axis only
    const CVec v2 = joint(deg2rad(30), 400e-9);
    const auto s2 = music2d({v * v.adjoint() + v2 * v2.adjoint(), 1}, 2, ga, delays, sub);
    const auto pk = find_peaks(s2, 2, 3);
    REQUIRE(pk.size() == 2);
    std::vector<std::size_t> dl;
    for (const auto &p : pk)
    {
        const auto ij = s2.indices(p.index);
        CHECK(ij[0] == bin_of(deg2rad(30)));
        dl.push_back(ij[1]);
    }
    std::sort(dl.begin(), dl.end());
    CHECK(dl[0] == 10);
    CHECK(dl[1] == 40);
    // in angle only, both paths collapse onto one steering vector
    CMat ra = CMat::Zero(Eigen::Index(m), Eigen::Index(m));
    const CVec a = ula_vec(m, deg2rad(30));
    ra = 2.0 * a * a.adjoint();
    const auto pa = find_peaks(music({ra, 1}, 1, ga), 2, 3);
    REQUIRE(!pa.empty());
    CHECK(pa[0].index == bin_of(deg2rad(30)));
    if (pa.size() > 1)
        CHECK(pa[1].value < 1e-6 * pa[0].value);

    // single-carrier, single-delay grid reduces to 1D MUSIC
    const CVec w = ula_vec(m, deg2rad(-40)), u = ula_vec(m, deg2rad(25));
    const CMat r1 = w * w.adjoint() + 0.3 * u * u.adjoint() + 0.01 * CMat::Identity(4, 4);
    const auto one = music2d({r1, 1}, 2, ga, {50e-9}, {0.0});
    const auto ref = music({r1, 1}, 2, ga);
    REQUIRE(one.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        if (ref.values()[i] < 1e9) // on-source bins are roundoff-dominated
            CHECK(one.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-9));
        else
            CHECK(one.values()[i] > 1e9);

    CHECK_THROWS_AS(music2d({r1, 1}, 1, ga, delays, sub), std::invalid_argument);
    CHECK_THROWS_AS(music2d({v * v.adjoint(), 1}, 1, ga, {}, sub), std::invalid_argument);
}

TEST_CASE("peak extraction")
{
    const Spectrum uni(linspace(0, 1, 5), {1, 2, 5, 3, 1});
    auto p = find_peaks(uni, 3);
    REQUIRE(p.size() == 1);
    CHECK(p[0].index == 2);
    CHECK(p[0].value == 5.0);

    const Spectrum flat(linspace(0, 1, 6), std::vector<double>(6, 2.0));
    p = find_peaks(flat, 1);
    REQUIRE(p.size() == 1);
    CHECK(p[0].index == 0);

    const Spectrum two(linspace(0, 1, 9), {0, 4, 1, 0, 1, 6, 5, 2, 1});
    p = find_peaks(two, 5);
    REQUIRE(p.size() == 2);
    CHECK(p[0].index == 5);
    CHECK(p[1].index == 1);
    CHECK(find_peaks(two, 5, 4).size() == 1);

    // 2D: neighbours within the Chebyshev radius are suppressed
    std::vector<double> v(25, 0.0);
    v[1 * 5 + 1] = 9.0;
    v[2 * 5 + 3] = 7.0; // Chebyshev distance 2 from (1,1)
    v[4 * 5 + 4] = 5.0;
    const Spectrum s2(linspace(0, 1, 5), linspace(0, 1, 5), v);
    p = find_peaks(s2, 3);
    REQUIRE(p.size() == 3);
    CHECK(p[0].index == 6);
    CHECK(p[1].index == 13);
    CHECK(p[1].coords == std::vector<double>{0.5, 0.75});
    p = find_peaks(s2, 2, 2);
    REQUIRE(p.size() == 2);
    CHECK(p[1].index == 24);
    CHECK_THROWS_AS(find_peaks(s2, 0), std::invalid_argument);
}
