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

#ifndef HOLOBEAM_OPTIMIZER_HPP
#define HOLOBEAM_OPTIMIZER_HPP

#include "convex.hpp"
#include "focusing.hpp"
#include "wavenumber.hpp"

#include <chrono>
#include <optional>
#include <random>

namespace holobeam
{
    // Physical description of one IDET run
    struct Scenario
    {
        Medium medium = Medium::from_frequency(10e9);
        double lx = 0.3, ly = 0.3;     // aperture, m
        int grid_nx = 64, grid_ny = 64; // quadrature samples per axis
        std::optional<int> basis_n;     // per-axis mode bound; ceiling rule when empty
        std::vector<Point3> dus, eus;
        double pt = 0.01;      // A^2
        double p0 = 1e-3;      // W after the rectifier
        double sigma2 = 5.6e-3; // V^2/m^2 per polarization
        double incidence = 0.0; // rad
        EhCircuit circuit{};

        ReceiverGeometry receiver() const { return ReceiverGeometry::isotropic(medium, incidence); }
        double p0_prime() const { return eh_threshold(p0, circuit, receiver()); }
        Aperture aperture() const { return make_aperture(lx, ly, grid_nx, grid_ny); }
        FourierBasisSet basis() const { return make_basis(lx, ly, medium.wavelength, basis_n); }

        void validate() const
        {
            require(!dus.empty() || !eus.empty(), "scenario needs at least one user");
            require(pt > 0.0 && std::isfinite(pt), "transmit power must be positive");
            require(sigma2 > 0.0 && std::isfinite(sigma2), "noise power must be positive");
            require(p0 >= 0.0, "harvesting target must be non-negative");
            circuit.validate();
            if (p0 >= circuit.m)
                throw InfeasibleRequirement("harvesting target at or above rectifier saturation");
        }
    };

    // Channels of every user sampled on one aperture; DUs come first in every per-user list below
    struct IdetProblem
    {
        std::vector<UserChannel> du, eu;
        double pt = 0.01, sigma2 = 5.6e-3;
        double p0 = 0.0, p0_prime = 0.0;
        ReceiverGeometry receiver{};
        EhCircuit circuit{};

        std::size_t k() const { return du.size(); }
        std::size_t l() const { return eu.size(); }
        std::size_t streams() const { return du.size() + eu.size(); }
    };

    inline IdetProblem make_problem(const Scenario &s, const Aperture &aperture)
    {
        s.validate();
        IdetProblem p;
        for (const auto &r : s.dus)
            p.du.push_back(sample_user_channel(aperture, r, s.medium));
        for (const auto &r : s.eus)
            p.eu.push_back(sample_user_channel(aperture, r, s.medium));
        p.pt = s.pt;
        p.sigma2 = s.sigma2;
        p.p0 = s.p0;
        p.p0_prime = s.p0_prime();
        p.receiver = s.receiver();
        p.circuit = s.circuit;
        return p;
    }

    // ---------------------------------------------------------------- rate and MSE blocks

    // Field of every stream at one user: column j is Omega * w_j
    inline MatXc stream_fields(const MatXc &omega, const std::vector<VecXc> &w)
    {
        MatXc v(3, Eigen::Index(w.size()));
        for (std::size_t j = 0; j < w.size(); ++j)
        {
            require(w[j].size() == omega.cols(), "weight length does not match the channel");
            v.col(Eigen::Index(j)) = omega * w[j];
        }
        return v;
    }

    // |psi^H v_k - 1|^2 + sum_{j != k} |psi^H v_j|^2 + sigma2 |psi|^2
    inline double mse(const Vec3c &psi, const MatXc &fields, std::size_t k, double sigma2)
    {
        double m = sigma2 * psi.squaredNorm();
        for (Eigen::Index j = 0; j < fields.cols(); ++j)
        {
            const cplx y = psi.dot(fields.col(j));
            m += j == Eigen::Index(k) ? std::norm(y - 1.0) : std::norm(y);
        }
        return m;
    }

    inline Vec3c mmse_combiner(const MatXc &fields, std::size_t k, double sigma2)
    {
        require(sigma2 > 0.0, "MMSE combiner needs positive noise power");
        require(Eigen::Index(k) < fields.cols(), "stream index out of range");
        const Mat3c c = fields * fields.adjoint() + sigma2 * Mat3c::Identity();
        return c.ldlt().solve(Vec3c(fields.col(Eigen::Index(k))));
    }

    inline Vec3c eu_eigen_combiner(const MatXc &fields)
    {
        const Mat3c c = fields * fields.adjoint();
        if (!(c.norm() > std::numeric_limits<double>::min()))
            throw DegenerateChannel("all stream fields vanish at the energy user");
        return principal_eigenvector(c);
    }

    struct SinrRate
    {
        double sinr = 0.0, rate = 0.0; // rate in bits/s/Hz
    };

    inline SinrRate sinr_rate(const Vec3c &psi, const MatXc &fields, std::size_t k, double sigma2)
    {
        double sig = 0.0, den = sigma2 * psi.squaredNorm();
        for (Eigen::Index j = 0; j < fields.cols(); ++j)
        {
            const double p = std::norm(psi.dot(fields.col(j)));
            if (j == Eigen::Index(k))
                sig = p;
            else
                den += p;
        }
        SinrRate r;
        r.sinr = den > 0.0 ? sig / den : (sig > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        r.rate = std::log2(1.0 + r.sinr);
        return r;
    }

    // Interference-free rate of the same combiner
    inline double snr_rate(const Vec3c &psi, const MatXc &fields, std::size_t k, double sigma2)
    {
        return std::log2(1.0 + std::norm(psi.dot(fields.col(Eigen::Index(k)))) / (sigma2 * psi.squaredNorm()));
    }

    // Combiners, weights and auxiliary rho of one BCD state. psi and w hold the K DUs then the L EUs.
    struct BcdState
    {
        Eigen::VectorXd rho;
        std::vector<Vec3c> psi;
        std::vector<VecXc> w;
    };

    // Stacked transforms of every user, DUs first
    struct TransformedChannels
    {
        std::vector<MatXc> omega;
        std::size_t k = 0;
        std::size_t size() const { return omega.size(); }
    };

    template <BeamSpace S>
    TransformedChannels transform_all(const S &space, const IdetProblem &p)
    {
        TransformedChannels t;
        t.k = p.k();
        for (const auto &c : p.du)
            t.omega.push_back(space.transform(c));
        for (const auto &c : p.eu)
            t.omega.push_back(space.transform(c));
        return t;
    }

    inline Eigen::VectorXd all_mse(const BcdState &s, const TransformedChannels &ch, double sigma2)
    {
        Eigen::VectorXd m(Eigen::Index(ch.k));
        for (std::size_t k = 0; k < ch.k; ++k)
            m(Eigen::Index(k)) = mse(s.psi[k], stream_fields(ch.omega[k], s.w), k, sigma2);
        return m;
    }

    inline Eigen::VectorXd update_rho(const BcdState &s, const TransformedChannels &ch, double sigma2)
    {
        Eigen::VectorXd m = all_mse(s, ch, sigma2);
        if (!(m.size() == 0 || m.minCoeff() > 0.0))
            throw std::runtime_error("non-positive MSE; numerical breakdown");
        return m.cwiseInverse();
    }

    // sum_k rho_k M_k - sum_k ln rho_k
    inline double r_eq(const BcdState &s, const TransformedChannels &ch, double sigma2)
    {
        const Eigen::VectorXd m = all_mse(s, ch, sigma2);
        return s.rho.dot(m) - s.rho.array().log().sum();
    }

    // DU combiners by MMSE, EU combiners by the principal eigenvector
    inline void update_psi(BcdState &s, const TransformedChannels &ch, double sigma2)
    {
        for (std::size_t i = 0; i < ch.size(); ++i)
        {
            const MatXc f = stream_fields(ch.omega[i], s.w);
            s.psi[i] = i < ch.k ? mmse_combiner(f, i, sigma2) : eu_eigen_combiner(f);
        }
    }

    // h_i = Omega_i^H psi_i
    inline std::vector<VecXc> effective_channels(const BcdState &s, const TransformedChannels &ch)
    {
        std::vector<VecXc> h;
        for (std::size_t i = 0; i < ch.size(); ++i)
            h.push_back(ch.omega[i].adjoint() * s.psi[i]);
        return h;
    }

    // ---------------------------------------------------------------- reduced subproblems

    // Orthonormal basis of span{h_i}. Objective and EH rows see w only through h_i^H w, so
    // restricting every stream to this span loses nothing and removes only wasted power.
    struct Subspace
    {
        MatXc basis;                 // D x r
        std::vector<VecXc> h;        // reduced effective channels, length r
        std::size_t rank() const { return std::size_t(basis.cols()); }
    };

    inline Subspace make_subspace(const std::vector<VecXc> &h)
    {
        require(!h.empty(), "subspace needs at least one channel");
        const Eigen::Index d = h.front().size();
        MatXc m(d, Eigen::Index(h.size()));
        for (std::size_t i = 0; i < h.size(); ++i)
            m.col(Eigen::Index(i)) = h[i];
        Eigen::ColPivHouseholderQR<MatXc> qr(m);
        qr.setThreshold(1e-12);
        const Eigen::Index r = std::max<Eigen::Index>(qr.rank(), 1);
        Subspace s;
        s.basis = MatXc(qr.householderQ()).leftCols(r);
        for (const auto &x : h)
            s.h.push_back(s.basis.adjoint() * x);
        return s;
    }

    inline VecXc stack(const std::vector<VecXc> &z)
    {
        Eigen::Index n = 0;
        for (const auto &x : z)
            n += x.size();
        VecXc out(n);
        Eigen::Index o = 0;
        for (const auto &x : z)
        {
            out.segment(o, x.size()) = x;
            o += x.size();
        }
        return out;
    }

    inline std::vector<VecXc> unstack(const VecXc &x, std::size_t streams)
    {
        const Eigen::Index r = x.size() / Eigen::Index(streams);
        std::vector<VecXc> z;
        for (std::size_t j = 0; j < streams; ++j)
            z.push_back(x.segment(Eigen::Index(j) * r, r));
        return z;
    }

    inline std::vector<VecXc> reduce(const Subspace &s, const std::vector<VecXc> &w)
    {
        std::vector<VecXc> z;
        for (const auto &x : w)
            z.push_back(s.basis.adjoint() * x);
        return z;
    }

    inline std::vector<VecXc> expand(const Subspace &s, const std::vector<VecXc> &z)
    {
        std::vector<VecXc> w;
        for (const auto &x : z)
            w.push_back(s.basis * x);
        return w;
    }

    // sum_j |h^H z_j|^2
    inline double stream_power(const VecXc &h, const std::vector<VecXc> &z)
    {
        double p = 0.0;
        for (const auto &x : z)
            p += std::norm(h.dot(x));
        return p;
    }

    // sum_k rho_k (sum_j |h_k^H w_j|^2 - 2 Re h_k^H w_k), DUs are the first rho.size() channels
    inline double wmmse_objective(const Eigen::VectorXd &rho, const std::vector<VecXc> &h, const std::vector<VecXc> &w)
    {
        double f = 0.0;
        for (Eigen::Index k = 0; k < rho.size(); ++k)
            f += rho(k) * (stream_power(h[std::size_t(k)], w) - 2.0 * h[std::size_t(k)].dot(w[std::size_t(k)]).real());
        return f;
    }

    // Linearized EH rows about zbar: sum_j 2 Re(zbar_j^H h h^H z_j) - |h^H zbar_j|^2 >= rhs
    inline void append_eh_rows(ComplexSubproblem &cp, const std::vector<VecXc> &h_eu, const std::vector<VecXc> &zbar,
                               double rhs)
    {
        for (const auto &h : h_eu)
        {
            std::vector<VecXc> a;
            for (const auto &zb : zbar)
                a.push_back(2.0 * h * h.dot(zb));
            cp.a.push_back(stack(a));
            cp.b.push_back(rhs + stream_power(h, zbar));
        }
    }

    struct OptimizerOptions
    {
        double outer_tol = 1e-3;
        int outer_max = 30;
        double inner_tol = 1e-4;
        int inner_max = 50;
        double maxmin_tol = 1e-9;
        int maxmin_max = 100;
        SolveOptions solver{1e-12, 300};
        bool warm_start = false; // skip the per-iteration max-min refresh (ablation)
        // after the w-block, scale w up to the power budget and DU combiners down by the same factor;
        // signal and interference terms are unchanged, noise terms shrink, EU powers grow
        bool power_rescale = true;
    };

    struct ScaResult
    {
        std::vector<VecXc> z;
        std::vector<double> objective; // P6 objective after each accepted step, starting point first
        int iterations = 0, rejected = 0;
        bool infeasible = false;
        std::optional<SolveCertificate> last;
    };

    // Inner SCA on the reduced problem. rho has one entry per DU; h_du, h_eu are reduced channels.
    inline ScaResult sca_beamform(const Eigen::VectorXd &rho, const std::vector<VecXc> &h_du,
                                  const std::vector<VecXc> &h_eu, double p0_prime, double pt,
                                  std::vector<VecXc> zbar, const OptimizerOptions &opt)
    {
        const std::size_t streams = zbar.size();
        require(streams >= h_du.size() && std::size_t(rho.size()) == h_du.size(), "stream and user counts disagree");
        const Eigen::Index r = zbar.front().size();
        std::vector<VecXc> h_all = h_du;
        h_all.insert(h_all.end(), h_eu.begin(), h_eu.end());

        ComplexSubproblem base;
        base.n = streams * std::size_t(r);
        base.ball = pt;
        MatXc blk = MatXc::Zero(r, r);
        for (std::size_t k = 0; k < h_du.size(); ++k)
            blk += rho(Eigen::Index(k)) * h_du[k] * h_du[k].adjoint();
        base.p = MatXc::Zero(Eigen::Index(base.n), Eigen::Index(base.n));
        base.q = VecXc::Zero(Eigen::Index(base.n));
        for (std::size_t j = 0; j < streams; ++j)
        {
            base.p.block(Eigen::Index(j) * r, Eigen::Index(j) * r, r, r) = blk;
            if (j < h_du.size())
                base.q.segment(Eigen::Index(j) * r, r) = -2.0 * rho(Eigen::Index(j)) * h_du[j];
        }

        ScaResult res;
        auto obj = [&](const std::vector<VecXc> &z) { return wmmse_objective(rho, h_all, z); };
        double f = obj(zbar);
        res.objective.push_back(f);
        const bool eh = !h_eu.empty() && p0_prime > 0.0;
        for (int it = 0; it < opt.inner_max; ++it)
        {
            ComplexSubproblem cp = base;
            if (eh)
                append_eh_rows(cp, h_eu, zbar, p0_prime);
            const auto cert = solve(lift_complex(cp), opt.solver);
            ++res.iterations;
            if (cert.status == SolveStatus::infeasible)
            {
                res.infeasible = true;
                res.last = cert;
                break;
            }
            res.last = cert;
            const auto z = unstack(unlift_vector(cert.x), streams);
            const double fn = obj(z);
            // keep the iterate only if it does not worsen the objective beyond round-off
            if (!(fn <= f + 1e-12 * std::max(1.0, std::abs(f))))
            {
                ++res.rejected;
                break;
            }
            const double change = std::abs(fn - f);
            zbar = z;
            f = fn;
            res.objective.push_back(f);
            if (!eh || change <= opt.inner_tol * std::max(1.0, std::abs(f)))
                break;
        }
        res.z = std::move(zbar);
        return res;
    }

    struct MaxMinResult
    {
        std::vector<VecXc> z;
        double gamma = 0.0; // min over EUs of sum_j |h_l^H z_j|^2
        std::vector<double> gamma_history;
        int iterations = 0;
    };

    inline double min_eu_power(const std::vector<VecXc> &h_eu, const std::vector<VecXc> &z)
    {
        double g = std::numeric_limits<double>::infinity();
        for (const auto &h : h_eu)
            g = std::min(g, stream_power(h, z));
        return g;
    }

    // Equal-split start along the normalized sum of the EU directions
    inline std::vector<VecXc> maxmin_start(const std::vector<VecXc> &h_eu, std::size_t streams, double pt)
    {
        VecXc d = VecXc::Zero(h_eu.front().size());
        for (const auto &h : h_eu)
            if (h.norm() > 0.0)
                d += h / h.norm();
        if (!(d.norm() > 0.0))
            d = h_eu.front();
        if (!(d.norm() > 0.0))
            throw DegenerateChannel("energy-user channels vanish");
        d *= std::sqrt(pt / double(streams)) / d.norm();
        return std::vector<VecXc>(streams, d);
    }

    // SCA on the epigraph form of max_w min_l sum_j |h_l^H w_j|^2 under sum |w_j|^2 <= pt
    inline MaxMinResult init_maxmin_weights(const std::vector<VecXc> &h_eu, std::size_t streams, double pt,
                                            const OptimizerOptions &opt)
    {
        require(!h_eu.empty(), "max-min initialization needs at least one energy user");
        require(streams >= 1 && pt > 0.0, "need at least one stream and positive power");
        MaxMinResult res;
        res.z = maxmin_start(h_eu, streams, pt);
        res.gamma = min_eu_power(h_eu, res.z);
        res.gamma_history.push_back(res.gamma);
        const Eigen::Index r = h_eu.front().size();
        for (int it = 0; it < opt.maxmin_max; ++it)
        {
            ComplexSubproblem cp;
            cp.n = streams * std::size_t(r);
            cp.ball = pt;
            cp.epigraph = true;
            append_eh_rows(cp, h_eu, res.z, 0.0);
            const auto cert = solve(lift_complex(cp), opt.solver);
            ++res.iterations;
            if (cert.status == SolveStatus::infeasible)
                break;
            const auto z = unstack(unlift_vector(cert.x), streams);
            const double g = min_eu_power(h_eu, z);
            if (!(g >= res.gamma))
                break;
            const double change = g - res.gamma;
            res.z = z;
            res.gamma = g;
            res.gamma_history.push_back(g);
            if (change <= opt.maxmin_tol * g)
                break;
        }
        return res;
    }

    // ---------------------------------------------------------------- global initialization

    struct GlobalInit
    {
        std::vector<Vec3c> psi_eu;
        std::vector<double> beta, zeta;
        CurrentMap j;          // sum_l beta_l G_l^H psi_l rescaled to total power pt
        double scale = 1.0;    // the rescaling applied to the printed coefficients
        std::vector<double> harvest_field; // |psi_l^H int G_l j|^2 per EU
    };

    inline GlobalInit init_global(const IdetProblem &p, const Aperture &aperture)
    {
        require(p.l() >= 1, "global initialization needs at least one energy user");
        GlobalInit g;
        double inv_sum = 0.0;
        for (const auto &ch : p.eu)
        {
            const Vec3c psi = optimal_eu_combiner(ch, aperture);
            g.psi_eu.push_back(psi);
            g.zeta.push_back(std::abs(psi.dot(channel_gram(ch, aperture) * psi)));
            inv_sum += 1.0 / g.zeta.back();
        }
        g.j.assign(aperture.size(), Vec3c::Zero());
        for (std::size_t l = 0; l < p.l(); ++l)
        {
            g.beta.push_back(std::sqrt(p.pt / (g.zeta[l] * g.zeta[l] * inv_sum)));
            for (std::size_t m = 0; m < aperture.size(); ++m)
                g.j[m] += g.beta[l] * (p.eu[l].g_samples[m].adjoint() * g.psi_eu[l]);
        }
        // exact only for orthogonal channels; enforce the power budget on the quadrature grid
        g.scale = std::sqrt(p.pt / current_power(g.j, aperture));
        for (auto &x : g.j)
            x *= g.scale;
        for (std::size_t l = 0; l < p.l(); ++l)
            g.harvest_field.push_back(std::norm(g.psi_eu[l].dot(radiate_field(p.eu[l], g.j, aperture))));
        return g;
    }

    // ---------------------------------------------------------------- Algorithm I

    enum class InitMode
    {
        proposed,      // global init and per-iteration max-min refresh
        random_sca,    // random W-bar at every refresh
        random_global  // random global init
    };

    struct ReqRecord
    {
        int outer = 0;
        std::string tag; // rho, psi, reinit, sca, theta
        double value = 0.0;
    };

    struct MonotonicityAudit
    {
        double max_increase = 0.0;        // over all non-reinit transitions
        double max_reinit_increase = 0.0; // over reinit transitions
        int reinit_increases = 0;
        bool monotone = true; // max_increase <= 1e-6
    };

    inline MonotonicityAudit audit_r_eq(const std::vector<ReqRecord> &h, double tol = 1e-6)
    {
        MonotonicityAudit a;
        for (std::size_t i = 1; i < h.size(); ++i)
        {
            const double inc = h[i].value - h[i - 1].value;
            if (h[i].tag == "reinit")
            {
                a.max_reinit_increase = std::max(a.max_reinit_increase, inc);
                a.reinit_increases += inc > tol;
            }
            else
                a.max_increase = std::max(a.max_increase, inc);
        }
        a.monotone = a.max_increase <= tol;
        return a;
    }

    struct SolveReport
    {
        std::string scheme = "H-IDET";
        std::string status = "optimal"; // optimal, max_iter, infeasible
        double r_sum = 0.0;
        std::vector<double> rates, sinr;
        std::vector<double> eu_field_projected, eu_field_unprojected; // V^2/m^2 summed over streams
        std::vector<double> eu_power_projected, eu_power_unprojected; // W before the rectifier
        std::vector<double> eu_harvest;                               // Xi of the projected power, W
        double p0_prime = 0.0;
        double gamma_star = 0.0; // max-min field power of the last refresh
        double total_power = 0.0;
        int outer_iterations = 0, inner_iterations = 0, rejected_steps = 0;
        std::vector<ReqRecord> r_eq_history;
        std::vector<double> r_sum_history;
        std::vector<std::vector<double>> eu_power_history; // per outer iteration, W
        MonotonicityAudit audit;
        BcdState state;
        double seconds = 0.0;
        std::optional<SolveCertificate> last_certificate;
    };

    // Rates, harvest and power of a weight set; DU combiners MMSE, EU combiners principal eigenvector
    inline void evaluate(SolveReport &r, const BcdState &s, const TransformedChannels &ch, const IdetProblem &p)
    {
        r.rates.clear(), r.sinr.clear();
        r.eu_field_projected.clear(), r.eu_field_unprojected.clear();
        r.eu_power_projected.clear(), r.eu_power_unprojected.clear(), r.eu_harvest.clear();
        r.r_sum = 0.0;
        const double pf = p.receiver.power_factor();
        for (std::size_t i = 0; i < ch.size(); ++i)
        {
            const MatXc f = stream_fields(ch.omega[i], s.w);
            if (i < ch.k)
            {
                const auto sr = sinr_rate(s.psi[i], f, i, p.sigma2);
                r.rates.push_back(sr.rate);
                r.sinr.push_back(sr.sinr);
                r.r_sum += sr.rate;
            }
            else
            {
                const Vec3c &psi = s.psi[i];
                double proj = 0.0;
                for (Eigen::Index j = 0; j < f.cols(); ++j)
                    proj += std::norm(psi.dot(f.col(j)));
                r.eu_field_projected.push_back(proj);
                r.eu_field_unprojected.push_back(f.squaredNorm());
                r.eu_power_projected.push_back(pf * proj);
                r.eu_power_unprojected.push_back(pf * f.squaredNorm());
                r.eu_harvest.push_back(eh_output(pf * proj, p.circuit));
            }
        }
        r.total_power = 0.0;
        for (const auto &w : s.w)
            r.total_power += w.squaredNorm();
    }

    inline std::vector<VecXc> random_weights(std::size_t streams, Eigen::Index dim, double pt, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        std::vector<VecXc> w(streams, VecXc(dim));
        double total = 0.0;
        for (auto &x : w)
        {
            for (auto &c : x)
                c = cplx(g(rng), g(rng));
            total += x.squaredNorm();
        }
        for (auto &x : w)
            x *= std::sqrt(pt / total);
        return w;
    }

    struct AlgorithmConfig
    {
        OptimizerOptions options{};
        InitMode init = InitMode::proposed;
        std::uint64_t seed = 1;
        std::string scheme = "H-IDET";
    };

    // Initial weights and combiners: symmetric closed-form currents for every stream, or per-DU matched beams without EUs
    template <BeamSpace S>
    BcdState initial_state(const S &space, const IdetProblem &p, const TransformedChannels &ch,
                           const AlgorithmConfig &cfg, std::mt19937_64 &rng)
    {
        BcdState s;
        const std::size_t n = p.streams();
        s.psi.assign(n, Vec3c::Zero());
        if (cfg.init == InitMode::random_global)
        {
            s.w = random_weights(n, Eigen::Index(space.dim()), p.pt, rng);
            std::normal_distribution<double> g;
            for (std::size_t l = 0; l < p.l(); ++l)
                s.psi[p.k() + l] = fix_phase(Vec3c(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))).normalized());
        }
        else if (p.l() >= 1)
        {
            const auto gi = init_global(p, space.aperture());
            const VecXc w0 = space.project(gi.j) / std::sqrt(double(n));
            s.w.assign(n, w0);
            for (std::size_t l = 0; l < p.l(); ++l)
                s.psi[p.k() + l] = gi.psi_eu[l];
        }
        else
        {
            for (std::size_t k = 0; k < p.k(); ++k)
            {
                const Vec3c psi = principal_eigenvector(Mat3c(ch.omega[k] * ch.omega[k].adjoint()));
                VecXc w = ch.omega[k].adjoint() * psi;
                s.w.push_back(w * std::sqrt(p.pt / double(n)) / w.norm());
            }
        }
        // one MMSE pass for the DU combiners
        for (std::size_t k = 0; k < p.k(); ++k)
            s.psi[k] = mmse_combiner(stream_fields(ch.omega[k], s.w), k, p.sigma2);
        s.rho = Eigen::VectorXd::Ones(Eigen::Index(p.k()));
        return s;
    }

    template <BeamSpace S>
    SolveReport run_idet(const S &space, const IdetProblem &p, const AlgorithmConfig &cfg = {})
    {
        const auto t0 = std::chrono::steady_clock::now();
        require(p.streams() >= 1, "problem needs at least one user");
        const auto &opt = cfg.options;
        std::mt19937_64 rng(cfg.seed);
        const TransformedChannels ch = transform_all(space, p);
        const std::size_t n = p.streams(), K = p.k(), L = p.l();
        const bool eh = L > 0 && p.p0_prime > 0.0;

        SolveReport rep;
        rep.scheme = cfg.scheme;
        rep.p0_prime = p.p0_prime;
        BcdState s = initial_state(space, p, ch, cfg, rng);

        auto finish = [&](const std::string &status) {
            rep.status = status;
            BcdState fin = s;
            update_psi(fin, ch, p.sigma2);
            evaluate(rep, fin, ch, p);
            if (status == "infeasible")
                rep.r_sum = 0.0;
            rep.state = std::move(fin);
            rep.audit = audit_r_eq(rep.r_eq_history);
            rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return rep;
        };

        // WET only: EU combiners and max-min weights
        if (K == 0)
        {
            update_psi(s, ch, p.sigma2);
            const auto sub = make_subspace(effective_channels(s, ch));
            const auto mm = init_maxmin_weights(sub.h, n, p.pt, opt);
            s.w = expand(sub, mm.z);
            rep.gamma_star = mm.gamma;
            rep.outer_iterations = 1;
            rep.inner_iterations = mm.iterations;
            return finish(mm.gamma < p.p0_prime * (1.0 - 1e-9) ? "infeasible" : "optimal");
        }

        {
            SolveReport tmp;
            BcdState e = s;
            update_psi(e, ch, p.sigma2);
            evaluate(tmp, e, ch, p);
            rep.r_sum_history.push_back(tmp.r_sum);
        }

        std::string status = "max_iter";
        for (int outer = 1; outer <= opt.outer_max; ++outer)
        {
            rep.outer_iterations = outer;
            auto record = [&](const char *tag) { rep.r_eq_history.push_back({outer, tag, r_eq(s, ch, p.sigma2)}); };

            s.rho = update_rho(s, ch, p.sigma2);
            record("rho");
            update_psi(s, ch, p.sigma2);
            record("psi");

            const auto h = effective_channels(s, ch);
            const Subspace sub = make_subspace(h);
            std::vector<VecXc> h_du(sub.h.begin(), sub.h.begin() + Eigen::Index(K));
            std::vector<VecXc> h_eu(sub.h.begin() + Eigen::Index(K), sub.h.end());

            // refresh the SCA reference point W-bar
            std::vector<VecXc> zbar;
            if (L > 0 && !opt.warm_start && cfg.init != InitMode::random_sca)
            {
                const auto mm = init_maxmin_weights(h_eu, n, p.pt, opt);
                rep.gamma_star = mm.gamma;
                if (eh && mm.gamma < p.p0_prime * (1.0 - 1e-9))
                {
                    status = "infeasible";
                    break;
                }
                zbar = mm.z;
            }
            else if (L > 0 && cfg.init == InitMode::random_sca)
                zbar = reduce(sub, random_weights(n, Eigen::Index(space.dim()), p.pt, rng));
            else
                zbar = reduce(sub, s.w);
            if (L > 0 && (opt.warm_start || cfg.init == InitMode::random_sca))
                rep.gamma_star = min_eu_power(h_eu, zbar);
            s.w = expand(sub, zbar);
            record("reinit");

            const auto sca = sca_beamform(s.rho, h_du, h_eu, eh ? p.p0_prime : 0.0, p.pt, zbar, opt);
            // P6 objective plus the terms of R_eq that do not depend on w
            double cst = -s.rho.array().log().sum();
            for (std::size_t k = 0; k < K; ++k)
                cst += s.rho(Eigen::Index(k)) * (1.0 + p.sigma2 * s.psi[k].squaredNorm());
            for (std::size_t i = 1; i < sca.objective.size(); ++i)
                rep.r_eq_history.push_back({outer, "sca", sca.objective[i] + cst});
            rep.inner_iterations += sca.iterations;
            rep.rejected_steps += sca.rejected;
            rep.last_certificate = sca.last;
            if (sca.infeasible && sca.objective.size() == 1)
            {
                status = "infeasible";
                break;
            }
            s.w = expand(sub, sca.z);
            record("theta");
            if (opt.power_rescale)
            {
                double pw = 0.0;
                for (const auto &w : s.w)
                    pw += w.squaredNorm();
                if (pw > 0.0 && pw < p.pt)
                {
                    const double c = std::sqrt(p.pt / pw);
                    for (auto &w : s.w)
                        w *= c;
                    for (std::size_t k = 0; k < K; ++k)
                        s.psi[k] /= c;
                    record("scale");
                }
            }

            SolveReport tmp;
            BcdState e = s;
            update_psi(e, ch, p.sigma2);
            evaluate(tmp, e, ch, p);
            rep.r_sum_history.push_back(tmp.r_sum);
            rep.eu_power_history.push_back(tmp.eu_power_projected);
            const double prev = rep.r_sum_history[rep.r_sum_history.size() - 2];
            if (std::abs(tmp.r_sum - prev) <= opt.outer_tol * std::max(std::abs(tmp.r_sum), 1e-12))
            {
                status = "optimal";
                break;
            }
        }
        return finish(status);
    }

} // namespace holobeam

#endif
