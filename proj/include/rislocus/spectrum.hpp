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

#include <cstddef>
#include <vector>

namespace rislocus
{
    // Sampled pseudo-power over a 1D grid or a 2D product grid (row-major, axis 0 slowest)
    class Spectrum
    {
    public:
        Spectrum(std::vector<double> axis, std::vector<double> values);
        Spectrum(std::vector<double> axis0, std::vector<double> axis1, std::vector<double> values);

        std::size_t dims() const { return ax.size(); }
        const std::vector<double> &axis(std::size_t d = 0) const { return ax.at(d); }
        const std::vector<double> &values() const { return val; }
        std::size_t size() const { return val.size(); }

        std::size_t peak_index() const { return peak; } // first maximum
        double peak_value() const { return val[peak]; }
        std::vector<double> coordinates(std::size_t flat) const;
        std::vector<std::size_t> indices(std::size_t flat) const;

        // Minimum step of an axis (0 for single-point axes)
        double resolution(std::size_t d = 0) const;

        // 10 log10(v / max); 0 dB at the maximum, -inf for zero entries
        std::vector<double> normalized_db() const;

    private:
        std::vector<std::vector<double>> ax;
        std::vector<double> val;
        std::size_t peak = 0;

        void validate();
    };
}
