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

#include "rislocus/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rislocus
{
    Covariance sample_covariance(const CMat &snapshots)
    {
        if (snapshots.cols() < 1 || snapshots.rows() < 1)
            throw std::invalid_argument("sample_covariance: no snapshots");
        Covariance c;
        c.R = (snapshots * snapshots.adjoint()) / double(snapshots.cols());
        c.R = 0.5 * (c.R + c.R.adjoint()).eval();
        c.snapshots_used = std::size_t(snapshots.cols());
        return c;
    }

    HermitianEigen hermitian_eigen(const CMat &R)
    {
        if (R.rows() != R.cols() || R.rows() == 0)
            throw std::invalid_argument("hermitian_eigen: square non-empty matrix expected");
        if (!R.allFinite())
            throw std::invalid_argument("hermitian_eigen: non-finite entries");
        const double scale = std::max(R.norm(), DBL_MIN);
        if ((R - R.adjoint()).norm() > 1e-10 * scale)
            throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
        Eigen::SelfAdjointEigenSolver<CMat> es(R);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("hermitian_eigen: eigensolver did not converge");
        const Eigen::Index m = R.rows();
        HermitianEigen out;
        out.values = es.eigenvalues().reverse();
        out.vectors = es.eigenvectors().rowwise().reverse();
        (void)m;
        return out;
    }

    NoiseSubspace noise_subspace(const CMat &R, int sources)
    {
        const int m = int(R.rows());
        if (sources < 1 || sources >= m)
            throw std::invalid_argument("noise_subspace: source count K=" + std::to_string(sources) +
                                        " must satisfy 1 <= K < M=" + std::to_string(m));
        const auto e = hermitian_eigen(R);
        return {e.vectors.rightCols(m - sources), sources};
    }

    SteeringGrid make_steering_grid(const ArrayGeometry &geom, const CarrierSpec &carrier,
                                    const std::vector<double> &azimuths, double elevation)
    {
        SteeringGrid g;
        g.coords = azimuths;
        g.vectors.resize(Eigen::Index(geom.size()), Eigen::Index(azimuths.size()));
        for (std::size_t i = 0; i < azimuths.size(); ++i)
            g.vectors.col(Eigen::Index(i)) = steering_far(geom, carrier, Direction(azimuths[i], elevation));
        return g;
    }

    static void check_grid(const Covariance &cov, const SteeringGrid &grid)
    {
        if (grid.coords.empty() || grid.vectors.cols() != Eigen::Index(grid.coords.size()))
            throw std::invalid_argument("spectral: empty or inconsistent steering grid");
        if (grid.vectors.rows() != cov.R.rows())
            throw std::invalid_argument("spectral: steering length " + std::to_string(grid.vectors.rows()) +
                                        " does not match covariance size " + std::to_string(cov.R.rows()));
    }

    Spectrum bartlett(const Covariance &cov, const SteeringGrid &grid)
    {
        check_grid(cov, grid);
        const CMat ra = cov.R * grid.vectors;
        std::vector<double> v(grid.coords.size());
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            const auto c = Eigen::Index(i);
            v[i] = std::max(0.0, grid.vectors.col(c).dot(ra.col(c)).real());
        }
        return Spectrum(grid.coords, std::move(v));
    }

    Spectrum capon(const Covariance &cov, const SteeringGrid &grid, std::optional<double> loading)
    {
        check_grid(cov, grid);
        const Eigen::Index m = cov.R.rows();
        const double eps = loading ? *loading : 1e-6 * cov.R.trace().real() / double(m);
        if (!(eps >= 0.0))
            throw std::invalid_argument("capon: diagonal loading must be non-negative");
        const CMat Rl = cov.R + eps * CMat::Identity(m, m);
        const auto e = hermitian_eigen(Rl);
        const double top = e.values[0];
        const double low = e.values[m - 1];
        if (!(top > 0.0) || !(low > 1e-12 * top))
            throw std::runtime_error("capon: covariance is singular even after diagonal loading");
        const CMat proj = e.vectors.adjoint() * grid.vectors;
        std::vector<double> v(grid.coords.size());
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            double den = 0.0;
            for (Eigen::Index k = 0; k < m; ++k)
                den += std::norm(proj(k, Eigen::Index(i))) / e.values[k];
            v[i] = 1.0 / den;
        }
        return Spectrum(grid.coords, std::move(v));
    }

    static std::vector<double> music_values(const CMat &un, const CMat &steer)
    {
        const CMat p = un.adjoint() * steer;
        std::vector<double> v(std::size_t(steer.cols()));
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = 1.0 / std::max(p.col(Eigen::Index(i)).squaredNorm(), DBL_MIN);
        return v;
    }

    Spectrum music(const Covariance &cov, int sources, const SteeringGrid &grid)
    {
        check_grid(cov, grid);
        const auto ns = noise_subspace(cov.R, sources);
        return Spectrum(grid.coords, music_values(ns.basis, grid.vectors));
    }

    CVec delay_steering(const std::vector<double> &subcarriers, double delay)
    {
        CVec b(Eigen::Index(subcarriers.size()));
        for (std::size_t m = 0; m < subcarriers.size(); ++m)
            b[Eigen::Index(m)] = std::polar(1.0, -2.0 * pi * subcarriers[m] * delay);
        return b;
    }

    Spectrum music2d(const Covariance &cov, int sources, const SteeringGrid &angles, const std::vector<double> &delays,
                     const std::vector<double> &subcarriers)
    {
        if (angles.coords.empty() || delays.empty() || subcarriers.empty())
            throw std::invalid_argument("music2d: empty grid");
        const Eigen::Index ma = angles.vectors.rows(), mf = Eigen::Index(subcarriers.size());
        if (cov.R.rows() != ma * mf)
            throw std::invalid_argument("music2d: covariance size " + std::to_string(cov.R.rows()) +
                                        " does not match M*M_f = " + std::to_string(ma * mf));
        const auto ns = noise_subspace(cov.R, sources);

        std::vector<CVec> b;
        b.reserve(delays.size());
        for (double t : delays)
            b.push_back(delay_steering(subcarriers, t));

        std::vector<double> v;
        v.reserve(angles.coords.size() * delays.size());
        CMat steer(ma * mf, Eigen::Index(delays.size()));
        for (std::size_t i = 0; i < angles.coords.size(); ++i)
        {
            const CVec a = angles.vectors.col(Eigen::Index(i));
            for (std::size_t d = 0; d < delays.size(); ++d)
                for (Eigen::Index m = 0; m < ma; ++m)
                    steer.col(Eigen::Index(d)).segment(m * mf, mf) = a[m] * b[d];
            const auto row = music_values(ns.basis, steer);
            v.insert(v.end(), row.begin(), row.end());
        }
        return Spectrum(angles.coords, delays, std::move(v));
    }

    std::vector<Peak> find_peaks(const Spectrum &s, std::size_t count, std::size_t min_separation)
    {
        if (count < 1)
            throw std::invalid_argument("find_peaks: count must be >= 1");
        const auto &v = s.values();
        const std::size_t n0 = s.axis(0).size();
        const std::size_t n1 = s.dims() == 2 ? s.axis(1).size() : 1;

        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j)
            {
                const std::size_t f = i * n1 + j;
                bool is_max = true;
                for (int di = -1; di <= 1 && is_max; ++di)
                    for (int dj = -1; dj <= 1 && is_max; ++dj)
                    {
                        if (di == 0 && dj == 0)
                            continue;
                        const long ii = long(i) + di, jj = long(j) + dj;
                        if (ii < 0 || jj < 0 || ii >= long(n0) || jj >= long(n1))
                            continue;
                        if (v[std::size_t(ii) * n1 + std::size_t(jj)] > v[f])
                            is_max = false;
                    }
                if (is_max)
                    cand.push_back(f);
            }
        std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

        auto dist = [&](std::size_t a, std::size_t b) {
            const long ai = long(a / n1), aj = long(a % n1), bi = long(b / n1), bj = long(b % n1);
            return std::size_t(std::max(std::labs(ai - bi), std::labs(aj - bj)));
        };
        std::vector<Peak> out;
        for (std::size_t c : cand)
        {
            bool keep = true;
            for (const auto &p : out)
                if (dist(c, p.index) <= min_separation)
                    keep = false;
            if (!keep)
                continue;
            out.push_back({c, s.coordinates(c), v[c]});
            if (out.size() == count)
                break;
        }
        return out;
    }
}
