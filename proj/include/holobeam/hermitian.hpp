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

#ifndef HOLOBEAM_HERMITIAN_HPP
#define HOLOBEAM_HERMITIAN_HPP

#include "types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace holobeam
{
    struct Eigen3Result
    {
        Eigen::Vector3d values; // descending
        Mat3c vectors;          // column i belongs to values(i)
        int sweeps = 0;
    };

    // Cyclic complex Jacobi for a 3x3 Hermitian matrix
    inline Eigen3Result jacobi_eigh(const Mat3c &input, double tol = 1e-12, int max_sweeps = 60)
    {
        Mat3c a = 0.5 * (input + input.adjoint());
        Mat3c v = Mat3c::Identity();
        const double scale = a.norm();
        int sweep = 0;
        auto off = [&]() {
            return std::sqrt(2.0 * (std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2))));
        };
        while (sweep < max_sweeps && off() > tol * std::max(scale, 1e-300))
        {
            ++sweep;
            for (int p = 0; p < 2; ++p)
                for (int q = p + 1; q < 3; ++q)
                {
                    const double apq = std::abs(a(p, q));
                    if (apq <= 1e-300)
                        continue;
                    // Phase rotation makes a(p,q) real, then a real Givens rotation zeroes it
                    const cplx ph = a(p, q) / apq;
                    const double app = a(p, p).real(), aqq = a(q, q).real();
                    const double theta = (aqq - app) / (2.0 * apq);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                    Mat3c j = Mat3c::Identity();
                    j(p, p) = c;
                    j(p, q) = s;
                    j(q, p) = -s * std::conj(ph);
                    j(q, q) = c * std::conj(ph);
                    a = j.adjoint() * a * j;
                    a(p, q) = a(q, p) = 0.0;
                    v = v * j;
                }
        }
        std::array<int, 3> order{0, 1, 2};
        // stable: ties keep the lower index first
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x).real() > a(y, y).real(); });
        Eigen3Result r;
        r.sweeps = sweep;
        for (int i = 0; i < 3; ++i)
        {
            r.values(i) = a(order[i], order[i]).real();
            r.vectors.col(i) = v.col(order[i]);
        }
        return r;
    }

    // Rotate so the first entry of largest modulus is real and non-negative
    inline Vec3c fix_phase(const Vec3c &v)
    {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(v(i)) > std::abs(v(k)))
                k = i;
        if (std::abs(v(k)) == 0.0)
            return v;
        return v * (std::conj(v(k)) / std::abs(v(k)));
    }

    // Principal unit eigenvector with fixed phase
    inline Vec3c principal_eigenvector(const Mat3c &a)
    {
        const auto r = jacobi_eigh(a);
        Vec3c v = r.vectors.col(0);
        return fix_phase(v / v.norm());
    }

} // namespace holobeam

#endif
