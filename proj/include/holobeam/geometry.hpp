// SPDX-License-Identifier: Apache-2.0
//
// holobeam: holographic beamforming for integrated data and energy transfer
// Copyright (C) 2026 The holobeam authors
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

#ifndef HOLOBEAM_GEOMETRY_HPP
#define HOLOBEAM_GEOMETRY_HPP

#include "types.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace holobeam
{
    inline constexpr double kSpeedOfLight = 3.0e8;      // m/s, rounded so that 10 GHz gives 3 cm
    inline constexpr double kFreeSpaceImpedance = 376.73; // Ohm

    struct Medium
    {
        double frequency = 10e9; // Hz
        double wavelength = 0.03;
        double wavenumber = 2.0 * std::numbers::pi / 0.03;
        double z0 = kFreeSpaceImpedance; // Ohm
        double z = 25.0;                 // harvester wave impedance, Ohm

        static Medium from_frequency(double f_hz, double z0 = kFreeSpaceImpedance, double z = 25.0)
        {
            require(std::isfinite(f_hz) && f_hz > 0.0, "frequency must be positive");
            require(z0 > 0.0 && z > 0.0, "impedances must be positive");
            Medium m;
            m.frequency = f_hz;
            m.wavelength = kSpeedOfLight / f_hz;
            m.wavenumber = 2.0 * std::numbers::pi / m.wavelength;
            m.z0 = z0;
            m.z = z;
            return m;
        }
    };

    struct ApertureSample
    {
        Point3 position;
        double weight; // m^2
    };

    // Planar rectangle on z = 0 centred at the origin, midpoint quadrature.
    // Sample m = i * ny + j, i along x.
    struct Aperture
    {
        double lx = 0.0, ly = 0.0;
        int nx = 0, ny = 0;
        std::vector<ApertureSample> samples;

        double area() const { return lx * ly; }
        std::size_t size() const { return samples.size(); }
        std::size_t index(int i, int j) const { return std::size_t(i) * std::size_t(ny) + std::size_t(j); }
        double weight() const { return area() / double(nx * ny); }
        double diagonal() const { return std::hypot(lx, ly); }
    };

    inline Aperture make_aperture(double lx, double ly, int nx, int ny)
    {
        require(std::isfinite(lx) && std::isfinite(ly) && lx > 0.0 && ly > 0.0, "aperture extent must be positive");
        require(nx >= 1 && ny >= 1, "aperture grid needs at least one sample per axis");
        Aperture a;
        a.lx = lx, a.ly = ly, a.nx = nx, a.ny = ny;
        const double w = lx * ly / double(nx * ny);
        a.samples.reserve(std::size_t(nx) * std::size_t(ny));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                a.samples.push_back({Point3(-0.5 * lx + (i + 0.5) * lx / nx, -0.5 * ly + (j + 0.5) * ly / ny, 0.0), w});
        return a;
    }

    // Far, middle and near contributions of the dyadic kernel
    struct GreenTerms
    {
        Mat3c far, middle, near;
        Mat3c total() const { return far + middle + near; }
    };

    inline void check_separation(const Point3 &r, const Point3 &s, const Medium &medium)
    {
        if (!((r - s).norm() >= medium.wavelength / 100.0))
            throw SingularGeometry("field point within lambda/100 of a source point");
    }

    inline GreenTerms dyadic_green_terms(const Point3 &r, const Point3 &s, const Medium &medium)
    {
        check_separation(r, s, medium);
        const Point3 p = r - s;
        const double d = p.norm();
        const Eigen::Vector3d u = p / d;
        const double kd = medium.wavenumber * d;
        const cplx pre = cplx(0.0, medium.wavenumber * medium.z0 / (4.0 * std::numbers::pi)) * std::polar(1.0 / d, kd);

        const Eigen::Matrix3d uu = u * u.transpose();
        const Eigen::Matrix3d transverse = Eigen::Matrix3d::Identity() - uu;
        const Eigen::Matrix3d radial = Eigen::Matrix3d::Identity() - 3.0 * uu;

        GreenTerms t;
        t.far = pre * transverse.cast<cplx>();
        t.middle = (pre * cplx(0.0, 1.0 / kd)) * radial.cast<cplx>();
        t.near = (pre / (kd * kd)) * radial.cast<cplx>();
        return t;
    }

    inline Mat3c dyadic_green(const Point3 &r, const Point3 &s, const Medium &medium)
    {
        return dyadic_green_terms(r, s, medium).total();
    }

    inline void check_off_surface(const Aperture &aperture, const Point3 &r, const Medium &medium)
    {
        require(r.allFinite(), "field point must be finite");
        if (std::abs(r.z()) < medium.wavelength / 100.0 && std::abs(r.x()) <= 0.5 * aperture.lx &&
            std::abs(r.y()) <= 0.5 * aperture.ly)
            throw SingularGeometry("field point lies on the aperture surface");
    }

    struct UserChannel
    {
        Point3 user_position = Point3::Zero();
        std::vector<Mat3c> g_samples;
    };

    inline UserChannel sample_user_channel(const Aperture &aperture, const Point3 &user, const Medium &medium)
    {
        check_off_surface(aperture, user, medium);
        UserChannel ch;
        ch.user_position = user;
        ch.g_samples.reserve(aperture.size());
        for (const auto &smp : aperture.samples)
            ch.g_samples.push_back(dyadic_green(user, smp.position, medium));
        return ch;
    }

    // e(r) = sum_m w_m G_m j_m
    inline Vec3c radiate_field(const UserChannel &channel, std::span<const Vec3c> current, const Aperture &aperture)
    {
        require(current.size() == aperture.size() && channel.g_samples.size() == aperture.size(),
                "current and channel must match the aperture sample count");
        Vec3c e = Vec3c::Zero();
        for (std::size_t m = 0; m < current.size(); ++m)
            e.noalias() += aperture.samples[m].weight * (channel.g_samples[m] * current[m]);
        return e;
    }

    // int |theta|^2 ds
    inline double current_power(const CurrentMap &theta, const Aperture &aperture)
    {
        require(theta.size() == aperture.size(), "current map does not match the aperture");
        double p = 0.0;
        for (std::size_t m = 0; m < theta.size(); ++m)
            p += aperture.samples[m].weight * theta[m].squaredNorm();
        return p;
    }

    // A = sum_m w_m G_m G_m^H
    inline Mat3c channel_gram(const UserChannel &channel, const Aperture &aperture)
    {
        require(channel.g_samples.size() == aperture.size(), "channel does not match aperture");
        Mat3c a = Mat3c::Zero();
        for (std::size_t m = 0; m < aperture.size(); ++m)
            a.noalias() += aperture.samples[m].weight * (channel.g_samples[m] * channel.g_samples[m].adjoint());
        return a;
    }

    // |r - s| expanded about |r|, x = (|s|^2 - 2 r.s)/|r|^2
    inline double fresnel_path_length(const Point3 &r, const Point3 &s, int order)
    {
        require(order == 1 || order == 2, "Fresnel order must be 1 or 2");
        const double d0 = r.norm();
        const double x = (s.squaredNorm() - 2.0 * r.dot(s)) / (d0 * d0);
        double dist = d0 * (1.0 + 0.5 * x);
        if (order == 2)
            dist -= d0 * x * x / 8.0;
        return dist;
    }

    // Paraxial channel about the aperture centre: far-field polarisation, amplitude 1/|r|,
    // path length expanded to first or second order in x = (|s|^2 - 2 r.s)/|r|^2.
    inline Mat3c fresnel_channel(const Point3 &r, const Point3 &s, const Medium &medium, int order)
    {
        require(order == 1 || order == 2, "Fresnel order must be 1 or 2");
        if (std::abs(r.z()) < medium.wavelength / 100.0)
            throw SingularGeometry("Fresnel channel needs a field point off the aperture plane");
        check_separation(r, s, medium);
        const double d0 = r.norm();
        const double dist = fresnel_path_length(r, s, order);
        const Eigen::Vector3d u = r / d0;
        const Eigen::Matrix3d transverse = Eigen::Matrix3d::Identity() - u * u.transpose();
        const cplx pre = cplx(0.0, medium.wavenumber * medium.z0 / (4.0 * std::numbers::pi)) *
                         std::polar(1.0 / d0, medium.wavenumber * dist);
        return pre * transverse.cast<cplx>();
    }

    // Linear source on the z-axis at height s_z, user at (d, 0, r_z): z-polarised far-field entry
    inline cplx scalar_green_linear(const Point3 &r, const Point3 &s, const Medium &medium)
    {
        const double dz = r.z() - s.z();
        const double d2 = std::pow(r.x() - s.x(), 2) + std::pow(r.y() - s.y(), 2);
        const double rr = dz * dz + d2;
        if (!(std::sqrt(rr) >= medium.wavelength / 100.0))
            throw SingularGeometry("field point coincides with the source");
        const double R = std::sqrt(rr);
        return cplx(0.0, medium.wavenumber * medium.z0 * d2 / (4.0 * std::numbers::pi * rr * R)) *
               std::polar(1.0, medium.wavenumber * R);
    }

    // (1/c) |int_C G^H(r1,s) G(r2,s) ds| over the segment C = {(0,0,t) : |t| <= c/2},
    // with the z-polarised scalar kernel.
    inline double correlation_metric(double c, const Point3 &user1, const Point3 &user2, const Medium &medium,
                                     int n_samples)
    {
        require(c > 0.0 && std::isfinite(c), "aperture length must be positive");
        require(n_samples >= 1, "need at least one quadrature sample");
        if ((user1 - user2).norm() == 0.0)
            throw InvalidArgument("correlation metric needs two distinct users");
        const double h = c / n_samples;
        cplx acc = 0.0;
        for (int i = 0; i < n_samples; ++i)
        {
            const Point3 s(0.0, 0.0, -0.5 * c + (i + 0.5) * h);
            acc += std::conj(scalar_green_linear(user1, s, medium)) * scalar_green_linear(user2, s, medium);
        }
        return std::abs(acc * h) / c;
    }

    // Radiating near-field bounds for aperture size D
    inline double fresnel_lower_bound(double d, double wavelength) { return 0.5 * std::sqrt(d * d * d / wavelength); }
    inline double fraunhofer_distance(double d, double wavelength) { return 2.0 * d * d / wavelength; }

} // namespace holobeam

#endif
