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

#include <catch_amalgamated.hpp>

#include <holobeam/baselines.hpp>

#include <random>

using namespace holobeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    std::normal_distribution<double> gauss;

    Scenario desk_scenario()
    {
        Scenario s;
        s.dus = {Point3(5, 5, 30), Point3(-5, 5, 30)};
        s.eus = {Point3(1, 1, 1)};
        s.basis_n = 10;
        return s;
    }

    // Lattice points of a midpoint grid inside a disk, counted column by column
    std::size_t disk_lattice_count(double cx, double cy, double r, double l, int n)
    {
        const double h = l / n;
        std::size_t count = 0;
        for (int i = 0; i < n; ++i)
        {
            const double dx = -0.5 * l + (i + 0.5) * h - cx;
            if (dx * dx > r * r)
                continue;
            const double half = std::sqrt(r * r - dx * dx);
            // j with |y_j - cy| <= half, y_j = -l/2 + (j + 0.5) h
            const long lo = long(std::ceil((cy - half + 0.5 * l) / h - 0.5 - 1e-12));
            const long hi = long(std::floor((cy + half + 0.5 * l) / h - 0.5 + 1e-12));
            count += std::size_t(std::max(0L, std::min<long>(hi, n - 1) - std::max(lo, 0L) + 1));
        }
        return count;
    }

    // Single-DU capacity of a disk array, with the aggregated channels built from the Green dyadic directly
    double fd_capacity_oracle(const DiscreteArray &arr, const Aperture &ap, const Point3 &user, const Medium &md,
                              double pt, double sigma2)
    {
        Mat3c gram = Mat3c::Zero();
        const double r2 = arr.antenna_area / std::numbers::pi;
        for (const auto &c : arr.centers)
        {
            Mat3c h = Mat3c::Zero();
            double a = 0.0;
            for (const auto &smp : ap.samples)
                if ((smp.position - c).squaredNorm() <= r2)
                {
                    h += smp.weight * dyadic_green(user, smp.position, md);
                    a += smp.weight;
                }
            gram += h * h.adjoint() / a;
        }
        Eigen::SelfAdjointEigenSolver<Mat3c> es(gram);
        return std::log2(1.0 + pt * es.eigenvalues()(2) / sigma2);
    }
} // namespace

TEST_CASE("discrete array layout and disk capture")
{
    const auto arr = make_half_wavelength_array(0.3, 0.3, 0.03);
    CHECK(arr.mx == 20);
    CHECK(arr.my == 20);
    CHECK(arr.size() == 400);
    CHECK_THAT(arr.antenna_area, WithinRel(0.03 * 0.03 / (8 * std::numbers::pi), 1e-14));
    CHECK_THAT(arr.centers[0].x(), WithinAbs(-0.1425, 1e-14));
    CHECK_THAT(arr.centers[21].y(), WithinAbs(-0.1275, 1e-14));

    for (int n : {64, 200})
    {
        const auto ap = make_aperture(0.3, 0.3, n, n);
        const auto cap = capture_disks(arr, ap);
        for (std::size_t m = 0; m < arr.size(); m += 37)
        {
            const auto expect = disk_lattice_count(arr.centers[m].x(), arr.centers[m].y(), arr.radius(), 0.3, n);
            CHECK(cap.samples[m].size() == expect);
            CHECK_THAT(cap.area[m], WithinRel(double(expect) * ap.weight(), 1e-12));
        }
    }
    // captured area tends to the disk area
    const auto fine = capture_disks(arr, make_aperture(0.3, 0.3, 600, 600));
    CHECK_THAT(fine.area[123], WithinRel(arr.antenna_area, 0.05));

    // a 16 x 16 grid misses some disks
    CHECK_THROWS_AS(capture_disks(arr, make_aperture(0.3, 0.3, 16, 16)), ResolutionError);
    CHECK_THROWS_AS(make_discrete_array(0.3, 0.3, 20, 20, 0.01), InvalidArgument);
}

TEST_CASE("RectArraySpace is an isometry onto disk-supported currents")
{
    const Medium md;
    const auto arr = make_discrete_array(0.3, 0.3, 6, 5, 0.03 * 0.03 / (8 * std::numbers::pi));
    RectArraySpace sp(arr, make_aperture(0.3, 0.3, 64, 64));
    REQUIRE(sp.dim() == 90);
    std::mt19937_64 rng(3);
    const auto ch = sample_user_channel(sp.aperture(), Point3(0.4, -0.2, 2.0), md);
    const MatXc om = sp.transform(ch);
    for (int t = 0; t < 5; ++t)
    {
        VecXc u(90);
        for (auto &x : u)
            x = cplx(gauss(rng), gauss(rng));
        const CurrentMap th = sp.synthesize(u);
        CHECK_THAT(current_power(th, sp.aperture()), WithinRel(u.squaredNorm(), 1e-12));
        CHECK((sp.project(th) - u).norm() <= 1e-12 * u.norm());
        const Vec3c e = radiate_field(ch, th, sp.aperture());
        CHECK((om * u - e).norm() <= 1e-10 * e.norm());
        // digital weights are constant on each disk
        const auto v = sp.digital_weights(u);
        const auto &s0 = sp.capture().samples[7];
        for (auto s : s0)
            CHECK((th[s] - v[7]).norm() == 0.0);
    }
}

TEST_CASE("FD - single DU capacity and growth with antenna count")
{
    const Medium md;
    const Point3 du(0.05, 0.0, 3.0);
    const double pt = 0.01, sigma2 = 5.6e-3;
    const auto ap = make_aperture(0.3, 0.3, 120, 120);
    const double am = 0.03 * 0.03 / (8 * std::numbers::pi);
    IdetProblem p;
    p.du = {sample_user_channel(ap, du, md)};
    p.pt = pt;
    p.sigma2 = sigma2;

    std::vector<double> rates;
    for (int m : {5, 10, 20})
    {
        const auto arr = make_discrete_array(0.3, 0.3, m, m, am);
        RectArraySpace sp(arr, ap);
        const auto r = fd_idet_solve(sp, p);
        const double oracle = fd_capacity_oracle(arr, ap, du, md, pt, sigma2);
        INFO("antennas per axis " << m);
        CHECK(r.scheme == "FD-IDET");
        CHECK_THAT(r.r_sum, WithinRel(oracle, 1e-3));
        CHECK(r.total_power <= pt * (1.0 + 1e-8));
        rates.push_back(r.r_sum);
    }
    CHECK(rates[0] < rates[1]);
    CHECK(rates[1] < rates[2]);
    // the continuous aperture bounds every disk array
    const double holo = std::log2(1.0 + pt * jacobi_eigh(channel_gram(p.du[0], ap)).values(0) / sigma2);
    CHECK(rates[2] < holo);
}

TEST_CASE("FD and FD-IDET on the desk scenario")
{
    const Scenario s = desk_scenario();
    const auto ap = s.aperture();
    RectArraySpace sp(make_half_wavelength_array(s.lx, s.ly, s.medium.wavelength), ap);
    const auto p = make_problem(s, sp.aperture());

    const auto fd = fd_solve(sp, p);
    CHECK(fd.scheme == "FD");
    REQUIRE(fd.rates.size() == 2);
    CHECK_THAT(fd.r_sum, WithinAbs(fd.rates[0] + fd.rates[1], 1e-12));
    REQUIRE(fd.eu_power_projected.size() == 1);
    CHECK(fd.eu_power_projected[0] > 0.0);
    CHECK(fd.total_power <= s.pt * (1.0 + 1e-8));
    // power accounting through the synthesized currents
    double pc = 0.0;
    for (const auto &w : fd.state.w)
        pc += current_power(sp.synthesize(w), sp.aperture());
    CHECK_THAT(pc, WithinRel(fd.total_power, 1e-10));

    const auto fi = fd_idet_solve(sp, p);
    INFO("FD-IDET status " << fi.status << " r_sum " << fi.r_sum);
    CHECK(fi.status != "infeasible");
    CHECK(fi.eu_field_projected[0] >= p.p0_prime * (1.0 - 1e-6));
    CHECK(fi.total_power <= s.pt * (1.0 + 1e-8));
    CHECK(fi.audit.max_increase <= 1e-6);
    // dropping the harvesting rows can only help the DUs
    CHECK(fd.r_sum >= fi.r_sum - 1e-3);
}

TEST_CASE("MF - matched beams and power split")
{
    const Medium md;
    const auto ap = make_aperture(0.3, 0.3, 48, 48);
    IdetProblem p;
    p.pt = 0.01;
    p.sigma2 = 5.6e-3;
    p.receiver = ReceiverGeometry::isotropic(md, 0.0);
    p.du = {sample_user_channel(ap, Point3(0.5, 0.2, 4.0), md)};

    // one user: the y-polarized matched beam
    const auto one = mf_beamformers(p, ap);
    const auto ref = matched_beam(p.du[0], Vec3c(0, 1, 0), p.pt, ap, p.receiver);
    double diff = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < ap.size(); ++m)
        diff = std::max(diff, (one[0][m] - ref.theta[m]).norm()), scale = std::max(scale, ref.theta[m].norm());
    CHECK(diff <= 1e-12 * scale);

    // no current of equal power beats it on the fixed polarization
    const double best = std::norm(radiate_field(p.du[0], one[0], ap)(1));
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t)
    {
        CurrentMap th(ap.size());
        for (auto &x : th)
            x = Vec3c(cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)));
        const double c = std::sqrt(p.pt / current_power(th, ap));
        for (auto &x : th)
            x *= c;
        CHECK(std::norm(radiate_field(p.du[0], th, ap)(1)) <= best);
    }

    // several users: total power pt, and equal split when asked
    p.du.push_back(sample_user_channel(ap, Point3(-1.0, 0.5, 6.0), md));
    p.eu = {sample_user_channel(ap, Point3(0.2, 0.2, 1.0), md)};
    const auto th = mf_beamformers(p, ap);
    double total = 0.0;
    std::vector<double> g;
    for (const auto &t : th)
        total += current_power(t, ap);
    CHECK_THAT(total, WithinRel(p.pt, 1e-12));
    MfOptions eq;
    eq.equal_power = true;
    for (const auto &t : mf_beamformers(p, ap, eq))
        CHECK_THAT(current_power(t, ap), WithinRel(p.pt / 3.0, 1e-12));

    const auto r = mf_solve(p, ap);
    CHECK(r.scheme == "MF");
    REQUIRE(r.rates.size() == 2);
    CHECK_THAT(r.total_power, WithinRel(p.pt, 1e-12));
    CHECK_THAT(r.r_sum, WithinAbs(r.rates[0] + r.rates[1], 1e-12));
    REQUIRE(r.eu_power_projected.size() == 1);
    CHECK(r.eu_power_projected[0] <= r.eu_power_unprojected[0] * (1.0 + 1e-12));
}

TEST_CASE("UPPER - interference-free rate bounds the achieved rate")
{
    Scenario s = desk_scenario();
    FourierSpace fs(s.basis(), s.aperture());
    const auto p = make_problem(s, fs.aperture());
    const auto r = run_idet(fs, p);
    const auto u = upper_bound_report(fs, p, r);
    CHECK(u.scheme == "UPPER");
    REQUIRE(u.rates.size() == r.rates.size());
    for (std::size_t k = 0; k < u.rates.size(); ++k)
        CHECK(u.rates[k] >= r.rates[k] - 1e-12);
    CHECK(u.r_sum >= r.r_sum);
    CHECK_THAT(u.r_sum, WithinAbs(upper_bound_rate(r.state, transform_all(fs, p), p.sigma2), 1e-12));

    // a lone DU sees no interference
    Scenario one;
    one.dus = {Point3(0, 0, 30)};
    one.basis_n = 10;
    FourierSpace f1(one.basis(), one.aperture());
    const auto p1 = make_problem(one, f1.aperture());
    const auto r1 = run_idet(f1, p1);
    CHECK_THAT(upper_bound_report(f1, p1, r1).r_sum, WithinRel(r1.r_sum, 1e-12));
}
