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

#ifndef HOLOBEAM_BASELINES_HPP
#define HOLOBEAM_BASELINES_HPP

#include "optimizer.hpp"

#include <memory>

namespace holobeam
{
    // Discrete antennas on a regular grid over the aperture, each a disk of area A_m
    struct DiscreteArray
    {
        int mx = 0, my = 0;
        double antenna_area = 0.0; // A_m, m^2
        std::vector<Point3> centers; // m = i * my + j

        std::size_t size() const { return centers.size(); }
        double radius() const { return std::sqrt(antenna_area / std::numbers::pi); }
    };

    inline DiscreteArray make_discrete_array(double lx, double ly, int mx, int my, double antenna_area)
    {
        require(lx > 0.0 && ly > 0.0 && mx >= 1 && my >= 1, "array needs a positive extent and antenna count");
        require(antenna_area > 0.0, "antenna area must be positive");
        DiscreteArray a;
        a.mx = mx, a.my = my;
        a.antenna_area = antenna_area;
        for (int i = 0; i < mx; ++i)
            for (int j = 0; j < my; ++j)
                a.centers.emplace_back(-0.5 * lx + (i + 0.5) * lx / mx, -0.5 * ly + (j + 0.5) * ly / my, 0.0);
        const double r = a.radius();
        require(r <= 0.5 * lx / mx + 1e-12 && r <= 0.5 * ly / my + 1e-12, "antenna disks overlap or leave the aperture");
        return a;
    }

    // Half-wavelength spacing, ceil(2L/lambda) per axis, A_m = lambda^2 / (8 pi)
    inline DiscreteArray make_half_wavelength_array(double lx, double ly, double wavelength)
    {
        require(wavelength > 0.0, "wavelength must be positive");
        const int mx = int(std::ceil(2.0 * lx / wavelength - 1e-9));
        const int my = int(std::ceil(2.0 * ly / wavelength - 1e-9));
        return make_discrete_array(lx, ly, mx, my, wavelength * wavelength / (8.0 * std::numbers::pi));
    }

    // Grid samples whose centres fall inside each disk
    struct DiskCapture
    {
        std::vector<std::vector<std::size_t>> samples;
        std::vector<double> area; // captured quadrature area per antenna
    };

    inline DiskCapture capture_disks(const DiscreteArray &array, const Aperture &aperture)
    {
        DiskCapture c;
        c.samples.resize(array.size());
        c.area.assign(array.size(), 0.0);
        const double r2 = array.antenna_area / std::numbers::pi;
        for (std::size_t m = 0; m < array.size(); ++m)
        {
            for (std::size_t s = 0; s < aperture.size(); ++s)
                if ((aperture.samples[s].position - array.centers[m]).squaredNorm() <= r2)
                {
                    c.samples[m].push_back(s);
                    c.area[m] += aperture.samples[s].weight;
                }
            if (c.samples[m].empty())
                throw ResolutionError("antenna " + std::to_string(m) + " captures no grid sample; refine the aperture grid");
        }
        return c;
    }

    // H_m = int_{S_m} G(s) ds on the captured samples
    inline std::vector<Mat3c> fd_effective_channel(const UserChannel &channel, const DiskCapture &cap,
                                                   const Aperture &aperture)
    {
        require(channel.g_samples.size() == aperture.size(), "channel does not match aperture");
        std::vector<Mat3c> h(cap.samples.size(), Mat3c::Zero());
        for (std::size_t m = 0; m < cap.samples.size(); ++m)
            for (auto s : cap.samples[m])
                h[m] += aperture.samples[s].weight * channel.g_samples[s];
        return h;
    }

    // Rect-supported currents theta(s) = v_m on S_m. Coordinates u_m = sqrt(a_m) v_m are orthonormal,
    // so |u|^2 = sum_m a_m |v_m|^2 is the radiated current power.
    class RectArraySpace
    {
    public:
        RectArraySpace(DiscreteArray array, Aperture aperture)
            : array_(std::make_unique<DiscreteArray>(std::move(array))),
              aperture_(std::make_unique<Aperture>(std::move(aperture))), cap_(capture_disks(*array_, *aperture_))
        {
        }

        std::size_t dim() const { return 3 * array_->size(); }

        MatXc transform(const UserChannel &ch) const
        {
            const auto h = fd_effective_channel(ch, cap_, *aperture_);
            MatXc om(3, Eigen::Index(dim()));
            for (std::size_t m = 0; m < h.size(); ++m)
                om.middleCols<3>(Eigen::Index(3 * m)) = h[m] / std::sqrt(cap_.area[m]);
            return om;
        }

        CurrentMap synthesize(const VecXc &u) const
        {
            require(std::size_t(u.size()) == dim(), "weight length does not match the array");
            CurrentMap theta(aperture_->size(), Vec3c::Zero());
            for (std::size_t m = 0; m < cap_.samples.size(); ++m)
            {
                const Vec3c v = u.segment<3>(Eigen::Index(3 * m)) / std::sqrt(cap_.area[m]);
                for (auto s : cap_.samples[m])
                    theta[s] = v;
            }
            return theta;
        }

        VecXc project(const CurrentMap &j) const
        {
            require(j.size() == aperture_->size(), "current map does not match the aperture");
            VecXc u(static_cast<Eigen::Index>(dim()));
            for (std::size_t m = 0; m < cap_.samples.size(); ++m)
            {
                Vec3c acc = Vec3c::Zero();
                for (auto s : cap_.samples[m])
                    acc += aperture_->samples[s].weight * j[s];
                u.segment<3>(Eigen::Index(3 * m)) = acc / std::sqrt(cap_.area[m]);
            }
            return u;
        }

        // v_m from orthonormal coordinates
        std::vector<Vec3c> digital_weights(const VecXc &u) const
        {
            std::vector<Vec3c> v;
            for (std::size_t m = 0; m < cap_.samples.size(); ++m)
                v.push_back(u.segment<3>(Eigen::Index(3 * m)) / std::sqrt(cap_.area[m]));
            return v;
        }

        const Aperture &aperture() const { return *aperture_; }
        const DiscreteArray &array() const { return *array_; }
        const DiskCapture &capture() const { return cap_; }

    private:
        std::unique_ptr<DiscreteArray> array_;
        std::unique_ptr<Aperture> aperture_;
        DiskCapture cap_;
    };

    static_assert(BeamSpace<RectArraySpace>);

    inline SolveReport fd_idet_solve(const RectArraySpace &space, const IdetProblem &p, AlgorithmConfig cfg = {})
    {
        cfg.scheme = "FD-IDET";
        return run_idet(space, p, cfg);
    }

    // EUs served as extra DUs without harvesting rows; r_sum counts the real DUs only
    template <BeamSpace S>
    SolveReport sum_rate_only_solve(const S &space, const IdetProblem &p, AlgorithmConfig cfg, const std::string &scheme)
    {
        IdetProblem q = p;
        q.du.insert(q.du.end(), p.eu.begin(), p.eu.end());
        q.eu.clear();
        q.p0_prime = 0.0;
        cfg.scheme = scheme;
        SolveReport r = run_idet(space, q, cfg);
        // rates of the original DUs, harvest of the EUs under their best combiner
        const TransformedChannels ch = transform_all(space, p);
        BcdState st = r.state;
        for (std::size_t l = 0; l < p.l(); ++l)
            st.psi[p.k() + l] = eu_eigen_combiner(stream_fields(ch.omega[p.k() + l], st.w));
        st.rho = st.rho.head(Eigen::Index(p.k())).eval();
        evaluate(r, st, ch, p);
        r.state = std::move(st);
        r.p0_prime = p.p0_prime;
        return r;
    }

    inline SolveReport fd_solve(const RectArraySpace &space, const IdetProblem &p, AlgorithmConfig cfg = {})
    {
        return sum_rate_only_solve(space, p, cfg, "FD");
    }

    // ---------------------------------------------------------------- matched filtering

    struct MfOptions
    {
        bool equal_power = false; // equal current power per user instead of the printed mu_k
        Vec3c psi = Vec3c(0, 1, 0);
    };

    // theta_k = mu_k G_k^H psi over every user, DUs then EUs, total power pt
    inline std::vector<CurrentMap> mf_beamformers(const IdetProblem &p, const Aperture &aperture, const MfOptions &o = {})
    {
        std::vector<const UserChannel *> users;
        for (const auto &c : p.du)
            users.push_back(&c);
        for (const auto &c : p.eu)
            users.push_back(&c);
        require(!users.empty(), "no users");
        std::vector<CurrentMap> theta;
        std::vector<double> g;
        for (const auto *u : users)
        {
            CurrentMap t(aperture.size());
            for (std::size_t m = 0; m < aperture.size(); ++m)
                t[m] = u->g_samples[m].adjoint() * o.psi;
            g.push_back(current_power(t, aperture));
            if (!(g.back() > 0.0))
                throw DegenerateChannel("user channel has no component along the fixed combiner");
            theta.push_back(std::move(t));
        }
        double gsum = 0.0;
        for (double x : g)
            gsum += x;
        double total = 0.0;
        std::vector<double> mu;
        for (std::size_t k = 0; k < users.size(); ++k)
        {
            mu.push_back(o.equal_power ? std::sqrt(p.pt / (double(users.size()) * g[k])) : std::sqrt(p.pt * g[k] / gsum));
            total += mu.back() * mu.back() * g[k];
        }
        // the printed mu_k alone does not exhaust pt; rescale all users together
        const double common = std::sqrt(p.pt / total);
        for (std::size_t k = 0; k < users.size(); ++k)
            for (auto &x : theta[k])
                x *= common * mu[k];
        return theta;
    }

    inline SolveReport mf_solve(const IdetProblem &p, const Aperture &aperture, const MfOptions &o = {})
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto theta = mf_beamformers(p, aperture, o);
        SolveReport r;
        r.scheme = "MF";
        r.p0_prime = p.p0_prime;
        const double pf = p.receiver.power_factor();
        auto fields_at = [&](const UserChannel &ch) {
            MatXc f(3, Eigen::Index(theta.size()));
            for (std::size_t j = 0; j < theta.size(); ++j)
                f.col(Eigen::Index(j)) = radiate_field(ch, theta[j], aperture);
            return f;
        };
        for (std::size_t k = 0; k < p.k(); ++k)
        {
            const auto sr = sinr_rate(o.psi, fields_at(p.du[k]), k, p.sigma2);
            r.rates.push_back(sr.rate);
            r.sinr.push_back(sr.sinr);
            r.r_sum += sr.rate;
        }
        bool met = true;
        for (std::size_t l = 0; l < p.l(); ++l)
        {
            const MatXc f = fields_at(p.eu[l]);
            double proj = 0.0;
            for (Eigen::Index j = 0; j < f.cols(); ++j)
                proj += std::norm(o.psi.dot(f.col(j)));
            r.eu_field_projected.push_back(proj);
            r.eu_field_unprojected.push_back(f.squaredNorm());
            r.eu_power_projected.push_back(pf * proj);
            r.eu_power_unprojected.push_back(pf * f.squaredNorm());
            r.eu_harvest.push_back(eh_output(pf * proj, p.circuit));
            met = met && proj >= p.p0_prime * (1.0 - 1e-6);
        }
        r.status = met ? "optimal" : "eh_unmet";
        for (const auto &t : theta)
            r.total_power += current_power(t, aperture);
        r.state.psi.assign(p.streams(), o.psi);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    // ---------------------------------------------------------------- interference-free bound

    // sum_k log2(1 + |psi_k^H Omega_k w_k|^2 / (sigma2 |psi_k|^2)) on a solved state
    inline double upper_bound_rate(const BcdState &s, const TransformedChannels &ch, double sigma2)
    {
        double r = 0.0;
        for (std::size_t k = 0; k < ch.k; ++k)
            r += snr_rate(s.psi[k], stream_fields(ch.omega[k], s.w), k, sigma2);
        return r;
    }

    template <BeamSpace S>
    SolveReport upper_bound_report(const S &space, const IdetProblem &p, const SolveReport &solved)
    {
        SolveReport r = solved;
        r.scheme = "UPPER";
        r.r_eq_history.clear();
        r.r_sum_history.clear();
        if (solved.status == "infeasible")
            return r;
        const TransformedChannels ch = transform_all(space, p);
        r.rates.clear();
        r.sinr.clear();
        r.r_sum = 0.0;
        for (std::size_t k = 0; k < p.k(); ++k)
        {
            const MatXc f = stream_fields(ch.omega[k], solved.state.w);
            const double sn = std::norm(solved.state.psi[k].dot(f.col(Eigen::Index(k)))) /
                              (p.sigma2 * solved.state.psi[k].squaredNorm());
            r.sinr.push_back(sn);
            r.rates.push_back(std::log2(1.0 + sn));
            r.r_sum += r.rates.back();
        }
        return r;
    }

} // namespace holobeam

#endif
