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

#ifndef HOLOBEAM_CONVEX_HPP
#define HOLOBEAM_CONVEX_HPP

#include "types.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>

namespace holobeam
{
    // minimize 1/2 x'Qx + c'x  s.t.  |x|^2 <= ball,  a_i'x >= b_i.
    // Epigraph mode adds a free scalar gamma: every row becomes a_i'x - gamma >= b_i and
    // the objective gains -gamma (so Q = 0, c = 0 maximizes min_i a_i'x - b_i).
    struct ConvexSubproblem
    {
        Eigen::MatrixXd q; // empty or n x n, PSD
        Eigen::VectorXd c; // empty or n
        double ball = 1.0;
        Eigen::MatrixXd a; // m x n, one constraint per row
        Eigen::VectorXd b; // m
        bool epigraph = false;
        std::size_t n = 0;

        std::size_t rows() const { return std::size_t(a.rows()); }
    };

    enum class SolveStatus
    {
        optimal,
        infeasible,
        max_iter
    };

    inline const char *to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        default:
            return "max_iter";
        }
    }

    struct SolveOptions
    {
        double tol = 1e-6;
        int max_iter = 200;
    };

    struct IterateRecord
    {
        int iteration = 0;
        double objective = 0.0; // normalized units
        double merit = 0.0;
        double stationarity = 0.0;
        double complementarity = 0.0;
        double step = 0.0;
    };

    struct SolveCertificate
    {
        Eigen::VectorXd x;
        double gamma = 0.0;     // epigraph variable, original units
        double objective = 0.0; // original units, includes -gamma in epigraph mode
        double primal_residual = 0.0;
        double stationarity = 0.0;    // inf-norm of the Lagrangian gradient, normalized problem
        double complementarity = 0.0; // max lambda_i g_i, normalized problem
        int iterations = 0;           // main phase
        int phase1_iterations = 0;
        SolveStatus status = SolveStatus::max_iter;
        Eigen::VectorXd multipliers; // ball first, normalized problem
        std::vector<IterateRecord> history;
    };

    namespace detail
    {
        // Problem in scaled coordinates: v = (y, [t]), ball |y|^2 <= 1 on the first ny entries.
        // u bounds every slack from above on the feasible set so the barrier terms log(g/u) stay <= 0.
        struct ScaledProblem
        {
            Eigen::MatrixXd q;
            Eigen::VectorXd c;
            Eigen::MatrixXd a;
            Eigen::VectorXd b;
            Eigen::VectorXd u;
            Eigen::Index ny = 0;
        };

        struct IpmResult
        {
            Eigen::VectorXd v, lambda;
            double stationarity = 0.0, complementarity = 0.0;
            int iterations = 0;
            SolveStatus status = SolveStatus::max_iter;
            std::vector<IterateRecord> history;
            bool stopped_early = false;
        };

        inline Eigen::VectorXd slacks(const ScaledProblem &p, const Eigen::VectorXd &v)
        {
            Eigen::VectorXd g(p.a.rows() + 1);
            g(0) = 1.0 - v.head(p.ny).squaredNorm();
            if (p.a.rows() > 0)
                g.tail(p.a.rows()) = p.a * v - p.b;
            return g;
        }

        inline Eigen::VectorXd dual_residual(const ScaledProblem &p, const Eigen::VectorXd &v, const Eigen::VectorXd &lam)
        {
            Eigen::VectorXd r = p.q * v + p.c;
            r.head(p.ny) += 2.0 * lam(0) * v.head(p.ny);
            if (p.a.rows() > 0)
                r.noalias() -= p.a.transpose() * lam.tail(p.a.rows());
            return r;
        }

        inline double objective(const ScaledProblem &p, const Eigen::VectorXd &v) { return 0.5 * v.dot(p.q * v) + p.c.dot(v); }

        // Barrier merit f(v) - mu sum log(g_i / u_i); nonincreasing in mu as well as along accepted steps
        inline double barrier_merit(const ScaledProblem &p, const Eigen::VectorXd &v, const Eigen::VectorXd &g, double mu)
        {
            return objective(p, v) - mu * (g.array() / p.u.array()).log().sum();
        }

        // Lower bound t >= t_lo on an epigraph variable (inactive at the optimum when t_lo is below a feasible t)
        // and the slack upper bounds u used by the merit.
        inline void finalize(ScaledProblem &p, Eigen::Index tcol, double t_lo)
        {
            const Eigen::Index m = p.a.rows(), ny = p.ny;
            double t_hi = std::numeric_limits<double>::infinity();
            if (tcol >= 0)
            {
                for (Eigen::Index i = 0; i < m; ++i)
                    if (p.a(i, tcol) < 0.0)
                        t_hi = std::min(t_hi, (p.a.row(i).head(ny).norm() - p.b(i)) / -p.a(i, tcol));
                p.a.conservativeResize(m + 1, Eigen::NoChange);
                p.a.row(m).setZero();
                p.a(m, tcol) = 1.0;
                p.b.conservativeResize(m + 1);
                p.b(m) = t_lo;
            }
            p.u.resize(p.a.rows() + 1);
            p.u(0) = 1.0;
            for (Eigen::Index i = 0; i < p.a.rows(); ++i)
            {
                double ub = p.a.row(i).head(ny).norm() - p.b(i);
                if (tcol >= 0)
                {
                    const double at = p.a(i, tcol);
                    ub += std::max(at * t_lo, at * t_hi);
                }
                p.u(i + 1) = 2.0 * std::max(ub, 1.0);
            }
        }

        // Interior point from a strictly feasible v0. Newton steps on the perturbed KKT system with the
        // multipliers tied to the central-path estimate lambda_i = mu / g_i, 0.99 fraction to the boundary,
        // Armijo backtracking on the barrier merit and a geometric barrier decrease.
        inline IpmResult run_ipm(const ScaledProblem &p, Eigen::VectorXd v, double tol, int max_iter,
                                 const std::function<bool(const Eigen::VectorXd &)> &stop_early = {})
        {
            constexpr double boundary = 0.99, armijo = 1e-4, kappa_dec = 0.1, kappa_mu = 0.2;
            const Eigen::Index nv = v.size(), m = p.a.rows() + 1;
            IpmResult res;
            // Slacks are carried alongside v and updated from the exact step increments so that tiny
            // slacks keep their relative accuracy; the merit is tracked through exact increments too.
            Eigen::VectorXd g = slacks(p, v);
            double mu = 0.1;
            double phi = barrier_merit(p, v, g, mu);

            Eigen::MatrixXd grads(nv, m); // column i is grad g_i
            Eigen::VectorXd lam, rd, dv;
            // Newton step for the current barrier weight; returns the squared Newton decrement
            const auto newton = [&]() {
                lam = mu * g.cwiseInverse();
                rd = dual_residual(p, v, lam);
                grads.setZero();
                grads.col(0).head(p.ny) = -2.0 * v.head(p.ny);
                if (m > 1)
                    grads.rightCols(m - 1) = p.a.transpose();
                Eigen::MatrixXd kkt = p.q;
                kkt.diagonal().head(p.ny).array() += 2.0 * lam(0);
                kkt.noalias() += grads * lam.cwiseQuotient(g).asDiagonal() * grads.transpose();
                const Eigen::LDLT<Eigen::MatrixXd> ldlt(kkt);
                dv = ldlt.solve(-rd);
                return ldlt.info() == Eigen::Success && dv.allFinite() ? -rd.dot(dv) : -1.0;
            };
            for (int it = 0;; ++it)
            {
                double dec = newton();
                // Barrier decrease once the current subproblem is centred (decrement small relative to mu)
                while (dec >= 0.0 && mu > 0.1 * tol && dec <= kappa_dec * mu)
                {
                    const double next = std::max(0.1 * tol, kappa_mu * mu);
                    phi += (mu - next) * (g.array() / p.u.array()).log().sum();
                    mu = next;
                    dec = newton();
                }
                const double stat = rd.lpNorm<Eigen::Infinity>();
                res.stationarity = stat, res.complementarity = mu, res.iterations = it;
                res.lambda = lam;
                res.history.push_back({it, objective(p, v), phi, stat, mu, 0.0});
                if (stat <= tol && mu <= tol)
                {
                    res.status = SolveStatus::optimal;
                    break;
                }
                if (stop_early && stop_early(v))
                {
                    res.stopped_early = true;
                    break;
                }
                if (it >= max_iter || dec < 0.0)
                    break;

                const Eigen::VectorXd dg = grads.transpose() * dv;
                const double dyy = dv.head(p.ny).squaredNorm(), ydy = v.head(p.ny).dot(dv.head(p.ny));

                // Fraction to the boundary; the ball slack is quadratic in the step
                double amax = 1.0 / boundary;
                for (Eigen::Index i = 1; i < m; ++i)
                    if (dg(i) < 0.0)
                        amax = std::min(amax, -g(i) / dg(i));
                if (dyy > 0.0)
                    amax = std::min(amax, (-ydy + std::sqrt(ydy * ydy + dyy * g(0))) / dyy);

                const double fslope = (p.q * v + p.c).dot(dv), fcurv = dv.dot(p.q * dv);
                const double slope = -dec;
                bool accepted = false;
                Eigen::VectorXd dgs(m);
                double alpha = std::min(1.0, boundary * amax), dphi = 0.0;
                for (int bt = 0; bt < 60; ++bt, alpha *= 0.5)
                {
                    dgs = alpha * dg;
                    dgs(0) = -alpha * (2.0 * ydy + alpha * dyy);
                    if (((g + dgs).array() <= 0.0).any())
                        continue;
                    dphi = alpha * fslope + 0.5 * alpha * alpha * fcurv -
                           mu * dgs.cwiseQuotient(g).unaryExpr([](double x) { return std::log1p(x); }).sum();
                    if (dphi <= armijo * alpha * std::min(slope, 0.0))
                    {
                        accepted = true;
                        break;
                    }
                }
                if (!accepted)
                    break; // stalled: report max_iter
                res.history.back().step = alpha;
                v += alpha * dv;
                g += dgs;
                phi += dphi;
            }
            res.v = v;
            return res;
        }
    } // namespace detail

    inline SolveCertificate solve(const ConvexSubproblem &prob, const SolveOptions &opt = {})
    {
        const Eigen::Index n = Eigen::Index(prob.n);
        const Eigen::Index m = prob.a.rows();
        require(n >= 1, "problem dimension must be positive");
        require(prob.ball > 0.0 && std::isfinite(prob.ball), "ball radius must be positive");
        require(prob.q.size() == 0 || (prob.q.rows() == n && prob.q.cols() == n), "Q has the wrong shape");
        require(prob.c.size() == 0 || prob.c.size() == n, "c has the wrong length");
        require(m == 0 || prob.a.cols() == n, "constraint rows have the wrong length");
        require(prob.b.size() == m, "one bound per constraint row");
        require(!prob.epigraph || m >= 1, "epigraph mode needs at least one constraint row");
        require(opt.tol > 0.0 && opt.max_iter >= 1, "invalid solver options");

        const Eigen::MatrixXd q0 = prob.q.size() ? prob.q : Eigen::MatrixXd::Zero(n, n);
        const Eigen::VectorXd c0 = prob.c.size() ? prob.c : Eigen::VectorXd::Zero(n);
        const double sx = std::sqrt(prob.ball);
        const double tiny = std::numeric_limits<double>::min();

        // Row and objective scaling
        Eigen::VectorXd rs(m);
        double sg = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
        {
            rs(i) = std::max({sx * prob.a.row(i).norm(), std::abs(prob.b(i)), tiny});
            sg = std::max(sg, rs(i));
        }
        if (prob.epigraph)
            rs.setConstant(sg);
        double sf = std::max((sx * sx * q0).cwiseAbs().maxCoeff(), (sx * c0).cwiseAbs().maxCoeff());
        if (prob.epigraph)
            sf = std::max(sf, sg);
        if (!(sf > tiny))
            sf = 1.0;

        const Eigen::Index e = prob.epigraph ? 1 : 0;
        detail::ScaledProblem sp;
        sp.ny = n;
        sp.q = Eigen::MatrixXd::Zero(n + e, n + e);
        sp.q.topLeftCorner(n, n) = (sx * sx / sf) * q0;
        sp.q.topLeftCorner(n, n) = 0.5 * (sp.q.topLeftCorner(n, n) + sp.q.topLeftCorner(n, n).transpose()).eval();
        sp.c = Eigen::VectorXd::Zero(n + e);
        sp.c.head(n) = (sx / sf) * c0;
        if (e)
            sp.c(n) = -sg / sf;
        sp.a = Eigen::MatrixXd::Zero(m, n + e);
        sp.b.resize(m);
        for (Eigen::Index i = 0; i < m; ++i)
        {
            sp.a.row(i).head(n) = (sx / rs(i)) * prob.a.row(i);
            if (e)
                sp.a(i, n) = -1.0;
            sp.b(i) = prob.b(i) / rs(i);
        }

        SolveCertificate cert;
        Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n + e);
        if (e)
            v0(n) = (-sp.b).minCoeff() - 1.0;
        detail::finalize(sp, e ? n : -1, e ? v0(n) - 1.0 : 0.0);
        if (!e && m > 0 && (sp.b.array() >= 0.0).any())
        {
            // Phase 1: maximize the smallest slack t over the unit ball
            detail::ScaledProblem ph;
            ph.ny = n;
            ph.q = Eigen::MatrixXd::Zero(n + 1, n + 1);
            ph.c = Eigen::VectorXd::Zero(n + 1);
            ph.c(n) = -1.0;
            ph.a.resize(m, n + 1);
            ph.a.leftCols(n) = sp.a;
            ph.a.col(n).setConstant(-1.0);
            ph.b = sp.b;
            Eigen::VectorXd w0 = Eigen::VectorXd::Zero(n + 1);
            w0(n) = (-sp.b).minCoeff() - 1.0;
            detail::finalize(ph, n, w0(n) - 1.0);
            const auto p1 = detail::run_ipm(ph, w0, opt.tol, opt.max_iter,
                                            [n](const Eigen::VectorXd &w) { return w(n) >= 1e-3; });
            cert.phase1_iterations = p1.iterations;
            if (!(p1.v(n) > 0.0))
            {
                cert.status = p1.status == SolveStatus::optimal ? SolveStatus::infeasible : SolveStatus::max_iter;
                cert.x = sx * p1.v.head(n);
                cert.gamma = p1.v(n);
                cert.history = p1.history;
                const Eigen::VectorXd viol = prob.b - prob.a * cert.x;
                cert.primal_residual = std::max(0.0, viol.maxCoeff());
                cert.objective = 0.5 * cert.x.dot(q0 * cert.x) + c0.dot(cert.x);
                return cert;
            }
            v0 = p1.v.head(n);
        }

        const auto r = detail::run_ipm(sp, v0, opt.tol, opt.max_iter);
        cert.status = r.status;
        cert.iterations = r.iterations;
        cert.history = r.history;
        cert.stationarity = r.stationarity;
        cert.complementarity = r.complementarity;
        cert.multipliers = r.lambda.head(m + 1);
        cert.x = sx * r.v.head(n);
        cert.gamma = e ? sg * r.v(n) : 0.0;
        cert.objective = 0.5 * cert.x.dot(q0 * cert.x) + c0.dot(cert.x) - cert.gamma;
        double viol = std::max(0.0, cert.x.squaredNorm() - prob.ball);
        if (m > 0)
        {
            Eigen::VectorXd rows = prob.b - prob.a * cert.x;
            if (e)
                rows.array() += cert.gamma;
            viol = std::max(viol, rows.maxCoeff());
        }
        cert.primal_residual = viol;
        return cert;
    }

    // Complex problem: minimize w^H P w + Re(q^H w)  s.t.  |w|^2 <= ball,  Re(a_i^H w) >= b_i
    struct ComplexSubproblem
    {
        MatXc p;
        VecXc q;
        double ball = 1.0;
        std::vector<VecXc> a;
        std::vector<double> b;
        bool epigraph = false;
        std::size_t n = 0;
    };

    inline Eigen::VectorXd lift_vector(const VecXc &w)
    {
        Eigen::VectorXd x(2 * w.size());
        x << w.real(), w.imag();
        return x;
    }

    inline VecXc unlift_vector(const Eigen::VectorXd &x)
    {
        const Eigen::Index n = x.size() / 2;
        VecXc w(n);
        w.real() = x.head(n);
        w.imag() = x.tail(n);
        return w;
    }

    // Real embedding: w^H P w = x'[[Re P, -Im P], [Im P, Re P]]x for Hermitian P
    inline ConvexSubproblem lift_complex(const ComplexSubproblem &cp)
    {
        const Eigen::Index n = Eigen::Index(cp.n);
        require(cp.a.size() == cp.b.size(), "one bound per constraint");
        ConvexSubproblem r;
        r.n = std::size_t(2 * n);
        r.ball = cp.ball;
        r.epigraph = cp.epigraph;
        if (cp.p.size())
        {
            require(cp.p.rows() == n && cp.p.cols() == n, "P has the wrong shape");
            const MatXc ph = 0.5 * (cp.p + cp.p.adjoint());
            r.q.resize(2 * n, 2 * n);
            r.q << ph.real(), -ph.imag(), ph.imag(), ph.real();
            r.q *= 2.0;
        }
        if (cp.q.size())
        {
            require(cp.q.size() == n, "q has the wrong length");
            r.c = lift_vector(cp.q);
        }
        r.a.resize(Eigen::Index(cp.a.size()), 2 * n);
        r.b.resize(Eigen::Index(cp.b.size()));
        for (std::size_t i = 0; i < cp.a.size(); ++i)
        {
            require(cp.a[i].size() == n, "constraint vector has the wrong length");
            r.a.row(Eigen::Index(i)) = lift_vector(cp.a[i]).transpose();
            r.b(Eigen::Index(i)) = cp.b[i];
        }
        return r;
    }

    inline void write_iterates_csv(const std::string &path, const SolveCertificate &cert)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open " + path);
        os << "iteration,objective,merit,stationarity,complementarity,step\n" << std::setprecision(17);
        for (const auto &h : cert.history)
            os << h.iteration << ',' << h.objective << ',' << h.merit << ',' << h.stationarity << ','
               << h.complementarity << ',' << h.step << '\n';
    }

} // namespace holobeam

#endif
