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

#include "rislocus/arraygeom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rislocus
{
    CarrierSpec::CarrierSpec(double frequency_hz)
    {
        if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
            throw std::invalid_argument("CarrierSpec: frequency must be positive and finite");
        f_c = frequency_hz;
        lambda = speed_of_light / frequency_hz;
    }

    Direction::Direction(double azimuth, double elevation)
    {
        double t = wrap_angle(elevation);
        double a = azimuth;
        if (t > 0.5 * pi)
        {
            t = pi - t;
            a += pi;
        }
        else if (t < -0.5 * pi)
        {
            t = -pi - t;
            a += pi;
        }
        phi = wrap_angle(a);
        theta = t;
    }

    Direction Direction::from_vector(const Vec3 &v)
    {
        const double n = v.norm();
        if (!(n > 0.0))
            throw std::invalid_argument("Direction: zero vector has no direction");
        const double t = std::asin(std::clamp(v.z() / n, -1.0, 1.0));
        const double a = (v.x() == 0.0 && v.y() == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
        return Direction(a, t);
    }

    Vec3 Direction::unit_vector() const
    {
        const double ct = std::cos(theta);
        return {ct * std::cos(phi), ct * std::sin(phi), std::sin(theta)};
    }

    Pose Pose::from_yaw(const Vec3 &origin, double yaw)
    {
        Pose p;
        p.origin = origin;
        p.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
        return p;
    }

    Direction Pose::to_global(const Direction &local) const
    {
        return Direction::from_vector(rotation * local.unit_vector());
    }

    Direction Pose::to_local(const Direction &global) const
    {
        return Direction::from_vector(rotation.transpose() * global.unit_vector());
    }

    ArrayGeometry::ArrayGeometry(int n_h, int n_v, double d_h, double d_v, Pose pose)
        : nh(n_h), nv(n_v), dh(d_h), dv(d_v), p(std::move(pose))
    {
        if (n_h < 1 || n_v < 1)
            throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
        if (!(d_h > 0.0) || !(d_v > 0.0))
            throw std::invalid_argument("ArrayGeometry: element pitch must be positive");
    }

    ArrayGeometry ArrayGeometry::ula(int n, double pitch, Pose pose)
    {
        return ArrayGeometry(n, 1, pitch, pitch, std::move(pose));
    }

    Vec3 ArrayGeometry::element_position(std::size_t n) const
    {
        if (n >= size())
            throw std::out_of_range("ArrayGeometry: element index out of range");
        const std::size_t i = n % std::size_t(nh);
        const std::size_t j = n / std::size_t(nh);
        return off + Vec3(0.0, double(i) * dh, double(j) * dv);
    }

    std::vector<Vec3> ArrayGeometry::element_positions() const
    {
        std::vector<Vec3> out;
        out.reserve(size());
        for (std::size_t n = 0; n < size(); ++n)
            out.push_back(element_position(n));
        return out;
    }

    std::vector<Vec3> ArrayGeometry::global_positions() const
    {
        std::vector<Vec3> out;
        out.reserve(size());
        for (std::size_t n = 0; n < size(); ++n)
            out.push_back(p.to_global(element_position(n)));
        return out;
    }

    Vec3 ArrayGeometry::centroid() const
    {
        return off + Vec3(0.0, 0.5 * double(nh - 1) * dh, 0.5 * double(nv - 1) * dv);
    }

    Vec3 ArrayGeometry::global_centroid() const { return p.to_global(centroid()); }

    ArrayGeometry ArrayGeometry::placed(const Vec3 &reference, double yaw) const
    {
        Pose q = Pose::from_yaw(Vec3::Zero(), yaw);
        q.origin = reference - q.rotation * centroid();
        return with_pose(q);
    }

    ArrayGeometry ArrayGeometry::with_pose(const Pose &pose) const
    {
        ArrayGeometry g = *this;
        g.p = pose;
        return g;
    }

    ArrayGeometry ArrayGeometry::shifted(const Vec3 &offset) const
    {
        ArrayGeometry g = *this;
        g.off = offset;
        return g;
    }

    Vec3 wave_vector(const CarrierSpec &carrier, const Direction &dir)
    {
        return carrier.wavenumber() * dir.unit_vector();
    }

    CVec steering_far(const ArrayGeometry &geom, const CarrierSpec &carrier, const Direction &dir)
    {
        const Vec3 k = wave_vector(carrier, dir);
        CVec a(Eigen::Index(geom.size()));
        for (std::size_t n = 0; n < geom.size(); ++n)
            a[Eigen::Index(n)] = std::polar(1.0, -k.dot(geom.element_position(n)));
        return a;
    }

    CVec steering_near(const ArrayGeometry &geom, const CarrierSpec &carrier, const Vec3 &p, const Vec3 &p_ris)
    {
        const double k = carrier.wavenumber();
        const double ref = (p - p_ris).norm();
        CVec a(Eigen::Index(geom.size()));
        for (std::size_t n = 0; n < geom.size(); ++n)
        {
            const double dn = (p - geom.element_position(n)).norm();
            if (dn < 1e-12)
                throw std::invalid_argument("steering_near: point coincides with an array element");
            a[Eigen::Index(n)] = std::polar(1.0, -k * (dn - ref));
        }
        return a;
    }

    CVec steering_near(const ArrayGeometry &geom, const CarrierSpec &carrier, const Vec3 &p)
    {
        return steering_near(geom, carrier, p, geom.centroid());
    }

    Vec3 position_from_measurements(double phi, double z, double r)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("position_from_measurements: range must be positive");
        if (r < std::abs(z))
            throw std::invalid_argument("position_from_measurements: infeasible range, r < |z|");
        const double rho = std::sqrt(std::max(0.0, r * r - z * z));
        return {rho * std::cos(phi), rho * std::sin(phi), z};
    }
}
