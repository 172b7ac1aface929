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

#include "rislocus/common.hpp"

#include <vector>

namespace rislocus
{
    class CarrierSpec
    {
    public:
        explicit CarrierSpec(double frequency_hz);

        double frequency() const { return f_c; }
        double wavelength() const { return lambda; }
        double wavenumber() const { return 2.0 * pi / lambda; }

    private:
        double f_c;
        double lambda;
    };

    // Azimuth in (-pi, pi], elevation in [-pi/2, pi/2]. Out-of-range inputs are folded
    // onto the same unit vector on construction.
    class Direction
    {
    public:
        Direction() = default;
        Direction(double azimuth, double elevation = 0.0);

        static Direction from_vector(const Vec3 &v); // throws on zero vector

        double azimuth() const { return phi; }
        double elevation() const { return theta; }
        Vec3 unit_vector() const;

    private:
        double phi = 0.0;
        double theta = 0.0;
    };

    // Rigid transform local -> global: g = origin + rotation * l
    struct Pose
    {
        Vec3 origin = Vec3::Zero();
        Mat3 rotation = Mat3::Identity();

        static Pose from_yaw(const Vec3 &origin, double yaw); // rotation about +z

        Vec3 to_global(const Vec3 &local) const { return origin + rotation * local; }
        Vec3 to_local(const Vec3 &global) const { return rotation.transpose() * (global - origin); }
        Direction to_global(const Direction &local) const;
        Direction to_local(const Direction &global) const;
    };

    // Planar array in the y-z plane of its local frame, normal along local +x
    class ArrayGeometry
    {
    public:
        ArrayGeometry(int n_h, int n_v, double d_h, double d_v, Pose pose = {});

        static ArrayGeometry ula(int n, double pitch, Pose pose = {});

        int n_h() const { return nh; }
        int n_v() const { return nv; }
        double d_h() const { return dh; }
        double d_v() const { return dv; }
        std::size_t size() const { return std::size_t(nh) * std::size_t(nv); }
        const Pose &pose() const { return p; }

        Vec3 element_position(std::size_t n) const; // 0-based, local frame
        std::vector<Vec3> element_positions() const;
        std::vector<Vec3> global_positions() const;

        Vec3 centroid() const;        // local frame
        Vec3 global_centroid() const; // global frame

        // Same layout, posed so that its centroid sits at `reference` with the given yaw
        ArrayGeometry placed(const Vec3 &reference, double yaw) const;
        ArrayGeometry with_pose(const Pose &pose) const;

        // Local element offset added to every element (used by dual-pol layouts)
        Vec3 offset() const { return off; }
        ArrayGeometry shifted(const Vec3 &offset) const;

    private:
        int nh, nv;
        double dh, dv;
        Pose p;
        Vec3 off = Vec3::Zero();
    };

    Vec3 wave_vector(const CarrierSpec &carrier, const Direction &dir);

    // Far field, local-frame direction: entry n = exp(-j k^T u_n)
    CVec steering_far(const ArrayGeometry &geom, const CarrierSpec &carrier, const Direction &dir);

    // Near field, local-frame points: entry n = exp(-j 2pi/lambda (|p - u_n| - |p - p_ris|))
    CVec steering_near(const ArrayGeometry &geom, const CarrierSpec &carrier, const Vec3 &p, const Vec3 &p_ris);
    CVec steering_near(const ArrayGeometry &geom, const CarrierSpec &carrier, const Vec3 &p); // p_ris = centroid

    // (phi, z, r) -> (x, y, z) with rho = sqrt(r^2 - z^2)
    Vec3 position_from_measurements(double phi, double z, double r);
}
