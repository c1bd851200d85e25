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

#ifndef HOLOBEAM_FOCUSING_HPP
#define HOLOBEAM_FOCUSING_HPP

#include "energy.hpp"
#include "hermitian.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

namespace holobeam
{
    inline Vec3c optimal_eu_combiner(const UserChannel &channel, const Aperture &aperture)
    {
        const Mat3c a = channel_gram(channel, aperture);
        if (!(a.norm() > std::numeric_limits<double>::min()))
            throw DegenerateChannel("channel Gram matrix is numerically zero");
        return principal_eigenvector(a);
    }

    struct FocusSolution
    {
        Vec3c psi = Vec3c::Zero();
        double mu = 0.0;
        CurrentMap theta;          // mu G^H(s) psi on the aperture samples
        Vec3c field = Vec3c::Zero(); // received field at the user
        double p_eh = 0.0;           // W before the rectifier, psi-projected
        double p_eh_unprojected = 0.0;
    };

    inline FocusSolution matched_beam(const UserChannel &channel, const Vec3c &psi, double pt, const Aperture &aperture,
                                      const ReceiverGeometry &geom)
    {
        require(pt > 0.0 && std::isfinite(pt), "transmit power must be positive");
        require(channel.g_samples.size() == aperture.size(), "channel does not match aperture");
        FocusSolution f;
        f.psi = psi;
        f.theta.resize(aperture.size());
        double norm2 = 0.0;
        for (std::size_t m = 0; m < aperture.size(); ++m)
        {
            f.theta[m] = channel.g_samples[m].adjoint() * psi;
            norm2 += aperture.samples[m].weight * f.theta[m].squaredNorm();
        }
        if (!(norm2 > std::numeric_limits<double>::min()))
            throw DegenerateChannel("channel has no component along the combiner");
        f.mu = std::sqrt(pt / norm2);
        for (auto &t : f.theta)
            t *= f.mu;
        f.field = radiate_field(channel, f.theta, aperture);
        f.p_eh = geom.power_factor() * std::norm(psi.dot(f.field));
        f.p_eh_unprojected = geom.power_factor() * f.field.squaredNorm();
        return f;
    }

    // Closed-form harvest of the optimal single-user beam
    inline double focus_power_closed_form(const UserChannel &channel, const Aperture &aperture, double pt,
                                          const ReceiverGeometry &geom)
    {
        return geom.power_factor() * pt * jacobi_eigh(channel_gram(channel, aperture)).values(0);
    }

    // Beam matched to the paraxial Fresnel channel, harvested through the exact channel with the best combiner
    inline double fresnel_designed_power(const UserChannel &channel, const Aperture &aperture, const Medium &medium,
                                         double pt, const ReceiverGeometry &geom, int order = 1)
    {
        UserChannel approx;
        approx.user_position = channel.user_position;
        approx.g_samples.reserve(aperture.size());
        for (const auto &smp : aperture.samples)
            approx.g_samples.push_back(fresnel_channel(channel.user_position, smp.position, medium, order));
        const auto beam = matched_beam(approx, optimal_eu_combiner(approx, aperture), pt, aperture, geom);
        return geom.power_factor() * radiate_field(channel, beam.theta, aperture).squaredNorm();
    }

    inline Vec3c field_at(const Point3 &r, const CurrentMap &theta, const Medium &medium, const Aperture &aperture)
    {
        require(theta.size() == aperture.size(), "current map does not match aperture");
        check_off_surface(aperture, r, medium);
        Vec3c e = Vec3c::Zero();
        for (std::size_t m = 0; m < aperture.size(); ++m)
            e.noalias() += aperture.samples[m].weight * (dyadic_green(r, aperture.samples[m].position, medium) * theta[m]);
        return e;
    }

    enum class Normalization
    {
        raw,
        pathloss_compensated
    };

    // |e(r)|^2 at each scan point; the compensated variant multiplies by |r|^2 and divides by the map maximum
    inline std::vector<double> beam_pattern_scan(const CurrentMap &theta, std::span<const Point3> scan,
                                                 const Medium &medium, const Aperture &aperture, Normalization norm)
    {
        std::vector<double> out;
        out.reserve(scan.size());
        for (const auto &r : scan)
        {
            const double v = field_at(r, theta, medium, aperture).squaredNorm();
            out.push_back(norm == Normalization::raw ? v : v * r.squaredNorm());
        }
        if (norm == Normalization::pathloss_compensated && !out.empty())
        {
            const double mx = *std::max_element(out.begin(), out.end());
            if (mx > 0.0)
                for (auto &v : out)
                    v /= mx;
        }
        return out;
    }

    struct BeamMap
    {
        std::vector<Point3> points;
        std::vector<double> raw, compensated;
    };

    inline BeamMap beam_map(const CurrentMap &theta, std::vector<Point3> scan, const Medium &medium,
                            const Aperture &aperture)
    {
        BeamMap m;
        m.raw = beam_pattern_scan(theta, scan, medium, aperture, Normalization::raw);
        m.compensated.resize(m.raw.size());
        double mx = 0.0;
        for (std::size_t i = 0; i < scan.size(); ++i)
            mx = std::max(mx, m.compensated[i] = m.raw[i] * scan[i].squaredNorm());
        if (mx > 0.0)
            for (auto &v : m.compensated)
                v /= mx;
        m.points = std::move(scan);
        return m;
    }

    inline void write_beam_map_csv(const std::string &path, const BeamMap &map)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open " + path);
        os << "x,y,z,value_raw,value_compensated\n" << std::setprecision(12);
        for (std::size_t i = 0; i < map.points.size(); ++i)
            os << map.points[i].x() << ',' << map.points[i].y() << ',' << map.points[i].z() << ',' << map.raw[i] << ','
               << map.compensated[i] << '\n';
    }

} // namespace holobeam

#endif
