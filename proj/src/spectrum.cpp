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

#include "rislocus/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rislocus
{
    Spectrum::Spectrum(std::vector<double> axis, std::vector<double> values) : val(std::move(values))
    {
        ax.push_back(std::move(axis));
        validate();
    }

    Spectrum::Spectrum(std::vector<double> axis0, std::vector<double> axis1, std::vector<double> values)
        : val(std::move(values))
    {
        ax.push_back(std::move(axis0));
        ax.push_back(std::move(axis1));
        validate();
    }

    void Spectrum::validate()
    {
        std::size_t expect = 1;
        for (const auto &a : ax)
        {
            if (a.empty())
                throw std::invalid_argument("Spectrum: empty grid");
            for (std::size_t i = 1; i < a.size(); ++i)
                if (!(a[i] > a[i - 1]))
                    throw std::invalid_argument("Spectrum: grid must be strictly increasing");
            expect *= a.size();
        }
        if (val.size() != expect)
            throw std::invalid_argument("Spectrum: value count does not match the grid");
        for (std::size_t i = 0; i < val.size(); ++i)
        {
            if (!(val[i] >= 0.0))
                throw std::invalid_argument("Spectrum: values must be non-negative");
            if (val[i] > val[peak])
                peak = i;
        }
    }

    std::vector<std::size_t> Spectrum::indices(std::size_t flat) const
    {
        if (flat >= val.size())
            throw std::out_of_range("Spectrum: index out of range");
        if (ax.size() == 1)
            return {flat};
        return {flat / ax[1].size(), flat % ax[1].size()};
    }

    std::vector<double> Spectrum::coordinates(std::size_t flat) const
    {
        const auto idx = indices(flat);
        std::vector<double> c(idx.size());
        for (std::size_t d = 0; d < idx.size(); ++d)
            c[d] = ax[d][idx[d]];
        return c;
    }

    double Spectrum::resolution(std::size_t d) const
    {
        const auto &a = ax.at(d);
        if (a.size() < 2)
            return 0.0;
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < a.size(); ++i)
            r = std::min(r, a[i] - a[i - 1]);
        return r;
    }

    std::vector<double> Spectrum::normalized_db() const
    {
        std::vector<double> out(val.size());
        const double m = val[peak];
        for (std::size_t i = 0; i < val.size(); ++i)
            out[i] = m > 0.0 ? 10.0 * std::log10(val[i] / m) : 0.0;
        return out;
    }
}
