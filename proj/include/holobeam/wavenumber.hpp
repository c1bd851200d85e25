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

#ifndef HOLOBEAM_WAVENUMBER_HPP
#define HOLOBEAM_WAVENUMBER_HPP

#include "geometry.hpp"

#include <concepts>
#include <memory>
#include <optional>

namespace holobeam
{
    struct ModeIndex
    {
        int nx = 0, ny = 0, nz = 0;
        bool operator==(const ModeIndex &) const = default;
    };

    // Modes n in [-N, N]^3, lexicographic with nx slowest. Nz = 0 on the plane.
    struct FourierBasisSet
    {
        int nx_max = 0, ny_max = 0, nz_max = 0;
        double lx = 1.0, ly = 1.0, lz = 1.0;
        std::vector<ModeIndex> modes;

        std::size_t size() const { return modes.size(); }
        double area() const { return lx * ly; }

        bool contains(const ModeIndex &n) const
        {
            return std::abs(n.nx) <= nx_max && std::abs(n.ny) <= ny_max && std::abs(n.nz) <= nz_max;
        }

        std::size_t index_of(const ModeIndex &n) const
        {
            if (!contains(n))
                throw InvalidArgument("mode index outside the basis");
            const std::size_t sy = std::size_t(2 * ny_max + 1), sz = std::size_t(2 * nz_max + 1);
            return (std::size_t(n.nx + nx_max) * sy + std::size_t(n.ny + ny_max)) * sz + std::size_t(n.nz + nz_max);
        }
    };

    inline FourierBasisSet make_basis(double lx, double ly, double wavelength, std::optional<int> override_n = {})
    {
        require(lx > 0.0 && ly > 0.0 && wavelength > 0.0, "basis extents and wavelength must be positive");
        FourierBasisSet b;
        b.lx = lx, b.ly = ly, b.lz = 1.0;
        if (override_n)
        {
            require(*override_n >= 0, "mode bound must be non-negative");
            b.nx_max = b.ny_max = *override_n;
        }
        else
        {
            // guard against ceil(10.000000001)
            b.nx_max = int(std::ceil(lx / wavelength - 1e-9));
            b.ny_max = int(std::ceil(ly / wavelength - 1e-9));
        }
        for (int i = -b.nx_max; i <= b.nx_max; ++i)
            for (int j = -b.ny_max; j <= b.ny_max; ++j)
                b.modes.push_back({i, j, 0});
        return b;
    }

    inline cplx basis_eval(const FourierBasisSet &basis, const ModeIndex &n, const Point3 &s)
    {
        if (!basis.contains(n))
            throw InvalidArgument("mode index outside the basis");
        const double ph = 2.0 * std::numbers::pi *
                          (n.nx * (s.x() - 0.5 * basis.lx) / basis.lx + n.ny * (s.y() - 0.5 * basis.ly) / basis.ly);
        return std::polar(1.0 / std::sqrt(basis.area()), ph);
    }

    inline void check_grid_compatibility(const FourierBasisSet &basis, const Aperture &aperture)
    {
        require(std::abs(basis.lx - aperture.lx) <= 1e-12 * aperture.lx && std::abs(basis.ly - aperture.ly) <= 1e-12 * aperture.ly,
                "basis and aperture extents differ");
        if (aperture.nx < 2 * (2 * basis.nx_max + 1) || aperture.ny < 2 * (2 * basis.ny_max + 1))
            throw ResolutionError("aperture grid " + std::to_string(aperture.nx) + "x" + std::to_string(aperture.ny) +
                                  " cannot resolve " + std::to_string(2 * basis.nx_max + 1) + "x" +
                                  std::to_string(2 * basis.ny_max + 1) + " modes; need at least " +
                                  std::to_string(2 * (2 * basis.nx_max + 1)) + "x" +
                                  std::to_string(2 * (2 * basis.ny_max + 1)) + " samples");
    }

    // Omega stacked as a 3 x 3N_F matrix; block n holds Omega_n
    struct WavenumberChannel
    {
        std::size_t user = 0;
        MatXc omega;

        std::size_t size() const { return std::size_t(omega.cols() / 3); }
        Mat3c block(std::size_t n) const { return omega.middleCols<3>(Eigen::Index(3 * n)); }
    };

    using BeamWeights = VecXc; // length 3 N_F, entry 3n + c is polarisation c of mode n

    // Per-axis exponentials of the basis on a grid aperture
    class FourierTables
    {
    public:
        FourierTables(const FourierBasisSet &basis, const Aperture &aperture) : basis_(&basis), aperture_(&aperture)
        {
            check_grid_compatibility(basis, aperture);
            require(aperture.size() == std::size_t(aperture.nx) * std::size_t(aperture.ny), "aperture is not a full grid");
            ex_.resize(2 * basis.nx_max + 1, aperture.nx);
            ey_.resize(2 * basis.ny_max + 1, aperture.ny);
            for (int a = 0; a < 2 * basis.nx_max + 1; ++a)
                for (int i = 0; i < aperture.nx; ++i)
                {
                    const double sx = aperture.samples[aperture.index(i, 0)].position.x();
                    ex_(a, i) = std::polar(1.0, 2.0 * std::numbers::pi * (a - basis.nx_max) * (sx - 0.5 * basis.lx) / basis.lx);
                }
            for (int b = 0; b < 2 * basis.ny_max + 1; ++b)
                for (int j = 0; j < aperture.ny; ++j)
                {
                    const double sy = aperture.samples[aperture.index(0, j)].position.y();
                    ey_(b, j) = std::polar(1.0, 2.0 * std::numbers::pi * (b - basis.ny_max) * (sy - 0.5 * basis.ly) / basis.ly);
                }
        }

        const FourierBasisSet &basis() const { return *basis_; }
        const Aperture &aperture() const { return *aperture_; }

        // sum_m w_m F_m Upsilon_n(s_m) for 3x3 (or 3x1 via cols) sample blocks, stacked per mode
        template <int C>
        MatXc forward(const std::vector<Eigen::Matrix<cplx, 3, C>> &f) const
        {
            const auto &ap = *aperture_;
            require(f.size() == ap.size(), "sample count does not match the aperture");
            const int ax = 2 * basis_->nx_max + 1, by = 2 * basis_->ny_max + 1;
            const double scale = ap.weight() / std::sqrt(basis_->area());
            std::vector<Eigen::Matrix<cplx, 3, C>> t(std::size_t(ap.nx) * by, Eigen::Matrix<cplx, 3, C>::Zero());
            for (int i = 0; i < ap.nx; ++i)
                for (int b = 0; b < by; ++b)
                {
                    Eigen::Matrix<cplx, 3, C> acc = Eigen::Matrix<cplx, 3, C>::Zero();
                    for (int j = 0; j < ap.ny; ++j)
                        acc += ey_(b, j) * f[ap.index(i, j)];
                    t[std::size_t(i) * by + b] = acc;
                }
            MatXc out(3, C * ax * by);
            for (int a = 0; a < ax; ++a)
                for (int b = 0; b < by; ++b)
                {
                    Eigen::Matrix<cplx, 3, C> acc = Eigen::Matrix<cplx, 3, C>::Zero();
                    for (int i = 0; i < ap.nx; ++i)
                        acc += ex_(a, i) * t[std::size_t(i) * by + b];
                    out.middleCols<C>(C * (a * by + b)) = scale * acc;
                }
            return out;
        }

        CurrentMap synthesize(const BeamWeights &w) const
        {
            const auto &ap = *aperture_;
            const int ax = 2 * basis_->nx_max + 1, by = 2 * basis_->ny_max + 1;
            require(w.size() == 3 * ax * by, "weight length does not match the basis");
            const double scale = 1.0 / std::sqrt(basis_->area());
            // u(i, b) = sum_a ex(a, i) w(a, b)
            std::vector<Vec3c> u(std::size_t(ap.nx) * by, Vec3c::Zero());
            for (int i = 0; i < ap.nx; ++i)
                for (int b = 0; b < by; ++b)
                {
                    Vec3c acc = Vec3c::Zero();
                    for (int a = 0; a < ax; ++a)
                        acc += ex_(a, i) * w.segment<3>(3 * (a * by + b));
                    u[std::size_t(i) * by + b] = acc;
                }
            CurrentMap theta(ap.size(), Vec3c::Zero());
            for (int i = 0; i < ap.nx; ++i)
                for (int j = 0; j < ap.ny; ++j)
                {
                    Vec3c acc = Vec3c::Zero();
                    for (int b = 0; b < by; ++b)
                        acc += ey_(b, j) * u[std::size_t(i) * by + b];
                    theta[ap.index(i, j)] = scale * acc;
                }
            return theta;
        }

        // w_n = sum_m w_m theta_m conj(Upsilon_n(s_m))
        BeamWeights project(const CurrentMap &theta) const
        {
            const auto &ap = *aperture_;
            require(theta.size() == ap.size(), "current map does not match the aperture");
            const int ax = 2 * basis_->nx_max + 1, by = 2 * basis_->ny_max + 1;
            const double scale = ap.weight() / std::sqrt(basis_->area());
            std::vector<Vec3c> t(std::size_t(ap.nx) * by, Vec3c::Zero());
            for (int i = 0; i < ap.nx; ++i)
                for (int b = 0; b < by; ++b)
                {
                    Vec3c acc = Vec3c::Zero();
                    for (int j = 0; j < ap.ny; ++j)
                        acc += std::conj(ey_(b, j)) * theta[ap.index(i, j)];
                    t[std::size_t(i) * by + b] = acc;
                }
            BeamWeights w(3 * ax * by);
            for (int a = 0; a < ax; ++a)
                for (int b = 0; b < by; ++b)
                {
                    Vec3c acc = Vec3c::Zero();
                    for (int i = 0; i < ap.nx; ++i)
                        acc += std::conj(ex_(a, i)) * t[std::size_t(i) * by + b];
                    w.segment<3>(3 * (a * by + b)) = scale * acc;
                }
            return w;
        }

    private:
        const FourierBasisSet *basis_;
        const Aperture *aperture_;
        MatXc ex_, ey_;
    };

    inline WavenumberChannel channel_transform(const UserChannel &channel, const FourierBasisSet &basis,
                                               const Aperture &aperture, std::size_t user = 0)
    {
        require(channel.g_samples.size() == aperture.size(), "channel was sampled on a different aperture");
        FourierTables tab(basis, aperture);
        return {user, tab.forward<3>(channel.g_samples)};
    }

    inline Vec3c synthesize(const BeamWeights &w, const FourierBasisSet &basis, const Point3 &s)
    {
        require(std::size_t(w.size()) == 3 * basis.size(), "weight length does not match the basis");
        Vec3c theta = Vec3c::Zero();
        for (std::size_t n = 0; n < basis.size(); ++n)
            theta += basis_eval(basis, basis.modes[n], s) * w.segment<3>(Eigen::Index(3 * n));
        return theta;
    }

    inline Vec3c field_from_weights(const WavenumberChannel &omega, const BeamWeights &w)
    {
        require(w.size() == omega.omega.cols(), "weight length does not match the channel");
        return omega.omega * w;
    }

    inline double power_from_weights(std::span<const BeamWeights> all_w)
    {
        double p = 0.0;
        for (const auto &w : all_w)
            p += w.squaredNorm();
        return p;
    }

    // A finite-dimensional family of aperture currents with orthonormal coordinates:
    // power of a weight vector is its squared norm, the field at a user is transform(ch) * w.
    template <class S>
    concept BeamSpace = requires(const S &s, const UserChannel &ch, const VecXc &w, const CurrentMap &j) {
        { s.dim() } -> std::convertible_to<std::size_t>;
        { s.transform(ch) } -> std::convertible_to<MatXc>;
        { s.synthesize(w) } -> std::convertible_to<CurrentMap>;
        { s.project(j) } -> std::convertible_to<VecXc>;
        { s.aperture() } -> std::convertible_to<const Aperture &>;
    };

    class FourierSpace
    {
    public:
        FourierSpace(FourierBasisSet basis, Aperture aperture)
            : basis_(std::make_unique<FourierBasisSet>(std::move(basis))),
              aperture_(std::make_unique<Aperture>(std::move(aperture))), tables_(*basis_, *aperture_)
        {
        }

        std::size_t dim() const { return 3 * basis_->size(); }
        MatXc transform(const UserChannel &ch) const
        {
            require(ch.g_samples.size() == aperture_->size(), "channel was sampled on a different aperture");
            return tables_.forward<3>(ch.g_samples);
        }
        CurrentMap synthesize(const VecXc &w) const { return tables_.synthesize(w); }
        VecXc project(const CurrentMap &j) const { return tables_.project(j); }
        const Aperture &aperture() const { return *aperture_; }
        const FourierBasisSet &basis() const { return *basis_; }

    private:
        std::unique_ptr<FourierBasisSet> basis_;
        std::unique_ptr<Aperture> aperture_;
        FourierTables tables_;
    };

    static_assert(BeamSpace<FourierSpace>);

} // namespace holobeam

#endif
