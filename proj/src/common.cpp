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

#include "rislocus/common.hpp"

#include <cmath>
#include <stdexcept>

namespace rislocus
{
    double wrap_angle(double a)
    {
        if (!std::isfinite(a))
            throw std::invalid_argument("wrap_angle: non-finite angle");
        double r = std::remainder(a, 2.0 * pi); // [-pi, pi]
        if (r <= -pi)
            r += 2.0 * pi;
        return r;
    }

    double angular_distance(double a, double b)
    {
        return std::abs(std::remainder(a - b, 2.0 * pi));
    }

    cdouble unit_phasor(double theta)
    {
        const double q = theta / (0.5 * pi);
        const double qr = std::nearbyint(q);
        if (q == qr && std::abs(qr) < 1e15)
        {
            switch (((long long)qr % 4 + 4) % 4)
            {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
            }
        }
        return {std::cos(theta), std::sin(theta)};
    }

    static std::uint64_t splitmix64(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter)
    {
        return splitmix64(seed ^ splitmix64(counter));
    }

    std::vector<double> linspace(double a, double b, std::size_t n)
    {
        if (n == 0)
            return {};
        if (n == 1)
            return {a};
        std::vector<double> v(n);
        const double step = (b - a) / double(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = a + step * double(i);
        v[n - 1] = b;
        return v;
    }
}
