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

#include "rislocus/arraygeom.hpp"
#include "rislocus/spectrum.hpp"

#include <optional>
#include <vector>

namespace rislocus
{
    struct Covariance
    {
        CMat R;
        std::size_t snapshots_used = 0;
    };

    // (1/T) X X^H over the columns of X
    Covariance sample_covariance(const CMat &snapshots);

    struct HermitianEigen
    {
        Eigen::VectorXd values; // descending
        CMat vectors;           // columns match values
    };

    HermitianEigen hermitian_eigen(const CMat &R);

    struct NoiseSubspace
    {
        CMat basis; // M x (M - K), orthonormal columns
        int sources = 0;
    };

    NoiseSubspace noise_subspace(const CMat &R, int sources);

    // Candidate steering vectors as columns, one per coordinate
    struct SteeringGrid
    {
        std::vector<double> coords;
        CMat vectors;
    };

    // Azimuth grid for an array; directions in the array's local frame
    SteeringGrid make_steering_grid(const ArrayGeometry &geom, const CarrierSpec &carrier,
                                    const std::vector<double> &azimuths, double elevation = 0.0);

    Spectrum bartlett(const Covariance &cov, const SteeringGrid &grid);

    // Diagonal loading defaults to 1e-6 trace(R) / M; pass 0 for none
    Spectrum capon(const Covariance &cov, const SteeringGrid &grid, std::optional<double> loading = std::nullopt);

    Spectrum music(const Covariance &cov, int sources, const SteeringGrid &grid);

    // b(t)_m = exp(-j 2 pi f_m t) over subcarrier offsets f_m
    CVec delay_steering(const std::vector<double> &subcarriers, double delay);

    // Steering kron(a(theta), b(t)): antenna-major, index m * M_f + f
    Spectrum music2d(const Covariance &cov, int sources, const SteeringGrid &angles, const std::vector<double> &delays,
                     const std::vector<double> &subcarriers);

    struct Peak
    {
        std::size_t index = 0;
        std::vector<double> coords;
        double value = 0.0;
    };

    // Local maxima by descending value (lower index first on ties), greedily suppressing any peak
    // within `min_separation` grid bins (Chebyshev distance on 2D grids) of an accepted one
    std::vector<Peak> find_peaks(const Spectrum &s, std::size_t count, std::size_t min_separation = 1);
}
