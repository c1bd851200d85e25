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

#ifndef HOLOBEAM_ENERGY_HPP
#define HOLOBEAM_ENERGY_HPP

#include "geometry.hpp"

namespace holobeam
{
    // Logistic rectifier: Xi(P) = M / (X (1 + exp(-a (P - b)))) - Y
    struct EhCircuit
    {
        double m = 3.9e-3; // saturation, W
        double a = 1500.0; // 1/W
        double b = 0.0022; // W

        double x() const { return 1.0 / (1.0 + std::exp(-a * b)); }
        double y() const { return m * std::exp(-a * b); }

        void validate() const { require(m > 0.0 && a > 0.0 && b >= 0.0, "rectifier needs M, a > 0 and b >= 0"); }
    };

    struct ReceiverGeometry
    {
        double area = 0.03 * 0.03 / (4.0 * std::numbers::pi); // A_R, m^2
        double incidence = 0.0;                               // rad
        double z = 25.0;                                      // Ohm

        static ReceiverGeometry isotropic(const Medium &medium, double incidence = 0.0)
        {
            require(incidence >= 0.0 && incidence <= 0.5 * std::numbers::pi, "incidence angle must lie in [0, pi/2]");
            return {medium.wavelength * medium.wavelength / (4.0 * std::numbers::pi), incidence, medium.z};
        }

        // Watts per unit of sum |e|^2
        double power_factor() const { return area * std::cos(incidence) / (2.0 * z); }
    };

    inline double poynting_power(std::span<const Vec3c> fields, const ReceiverGeometry &geom)
    {
        double s = 0.0;
        for (const auto &e : fields)
            s += e.squaredNorm();
        return geom.power_factor() * s;
    }

    inline double eh_output(double p, const EhCircuit &c)
    {
        if (!(p >= 0.0))
            throw InvalidArgument("received power must be non-negative");
        // M/(X(1+e^{-a(P-b)})) - Y rewritten to avoid cancellation near P = 0:
        // M (1+e^{-ab}) / (1+e^{-a(P-b)}) - M e^{-ab} = M (1 - e^{-aP}) / (1 + e^{-a(P-b)})
        return c.m * (-std::expm1(-c.a * p)) / (1.0 + std::exp(-c.a * (p - c.b)));
    }

    inline double eh_inverse(double p0, const EhCircuit &c)
    {
        if (!(p0 >= 0.0))
            throw InvalidArgument("harvesting target must be non-negative");
        if (p0 >= c.m)
            throw InfeasibleRequirement("harvesting target at or above rectifier saturation");
        if (p0 == 0.0)
            return 0.0;
        // Closed form b - ln(M/(X(P0+Y)) - 1)/a, with 1/X = 1 + e^{-ab} the log argument
        // simplifies to (M - P0)/(P0 + Y)
        const double arg = (c.m - p0) / (p0 + c.y());
        return c.b - std::log(arg) / c.a;
    }

    // Field-power threshold sum_j |psi^H e_j|^2 that yields Xi(P) >= P0
    inline double eh_threshold(double p0, const EhCircuit &c, const ReceiverGeometry &geom)
    {
        if (p0 == 0.0)
            return 0.0;
        const double f = geom.power_factor();
        if (!(std::cos(geom.incidence) > 1e-12))
            throw InfeasibleRequirement("no power crosses the receiving surface at grazing incidence");
        return eh_inverse(p0, c) / f;
    }

} // namespace holobeam

#endif
