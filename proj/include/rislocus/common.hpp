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

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace rislocus
{
    using cdouble = std::complex<double>;
    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;

    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;

    // Wraps an angle to (-pi, pi]
    double wrap_angle(double a);

    // Wrapped angular distance in [0, pi]
    double angular_distance(double a, double b);

    // e^{j theta}; exact at multiples of pi/2 so that sign flips cancel bit-exactly
    cdouble unit_phasor(double theta);

    inline double deg2rad(double d) { return d * pi / 180.0; }
    inline double rad2deg(double r) { return r * 180.0 / pi; }

    // Derives an independent stream seed from (seed, counter)
    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

    // n points from a to b inclusive
    std::vector<double> linspace(double a, double b, std::size_t n);
}
