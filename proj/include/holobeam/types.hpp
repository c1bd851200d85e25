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

#ifndef HOLOBEAM_TYPES_HPP
#define HOLOBEAM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace holobeam
{
    using cplx = std::complex<double>;
    using Point3 = Eigen::Vector3d;  // meters
    using Vec3c = Eigen::Vector3cd;
    using Mat3c = Eigen::Matrix3cd;
    using VecXc = Eigen::VectorXcd;
    using MatXc = Eigen::MatrixXcd;

    // Current density samples aligned with the aperture grid
    using CurrentMap = std::vector<Vec3c>;

    struct InvalidArgument : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // Evaluation too close to a source point
    struct SingularGeometry : std::domain_error
    {
        using std::domain_error::domain_error;
    };

    struct DegenerateChannel : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // A harvesting requirement that no beamformer can meet
    struct InfeasibleRequirement : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Sampling grid too coarse for the requested basis or antenna layout
    struct ResolutionError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    inline void require(bool cond, const std::string &msg)
    {
        if (!cond)
            throw InvalidArgument(msg);
    }
} // namespace holobeam

#endif
