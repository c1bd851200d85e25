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

#include <holobeam/geometry.hpp>

#include <random>

using namespace holobeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const Medium med = Medium::from_frequency(10e9);

    double rel(const Mat3c &a, const Mat3c &b) { return (a - b).norm() / b.norm(); }
} // namespace

TEST_CASE("make_aperture - midpoint grid")
{
    auto a = make_aperture(0.3, 0.3, 32, 32);
    REQUIRE(a.size() == 1024);
    CHECK_THAT(a.samples[0].weight, WithinRel(0.09 / 1024.0, 1e-14));
    CHECK_THAT(a.samples[0].weight, WithinRel(8.789e-5, 1e-4));
    double sum = 0.0;
    for (const auto &s : a.samples)
    {
        sum += s.weight;
        CHECK(std::abs(s.position.x()) <= 0.15);
        CHECK(std::abs(s.position.y()) <= 0.15);
        CHECK(s.position.z() == 0.0);
    }
    CHECK_THAT(sum, WithinRel(0.09, 1e-12));
    CHECK_THAT(a.samples[a.index(3, 5)].position.x(), WithinAbs(-0.15 + 3.5 * 0.3 / 32, 1e-15));
    CHECK_THAT(a.samples[a.index(3, 5)].position.y(), WithinAbs(-0.15 + 5.5 * 0.3 / 32, 1e-15));

    auto one = make_aperture(1.0, 1.0, 1, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.samples[0].position.norm() == 0.0);
    CHECK(one.samples[0].weight == 1.0);

    auto strip = make_aperture(1.5, 0.5, 60, 20);
    double s2 = 0.0;
    for (const auto &s : strip.samples)
        s2 += s.weight;
    CHECK(strip.size() == 1200);
    CHECK_THAT(s2, WithinRel(0.75, 1e-12));

    CHECK_THROWS_AS(make_aperture(0.0, 1.0, 4, 4), InvalidArgument);
    CHECK_THROWS_AS(make_aperture(1.0, -1.0, 4, 4), InvalidArgument);
    CHECK_THROWS_AS(make_aperture(1.0, 1.0, 0, 4), InvalidArgument);
}

TEST_CASE("dyadic_green - arbitrary precision reference at one metre broadside")
{
    // Reference values from a 40-digit evaluation of each term
    const cplx g11(-5422.763525447839459993627794015598672023, -3165.451003631036090096909519461925415173);
    const cplx g33(-29.73129469470679318932541589392426926003, 52.06867392873884686048570559051749701468);
    const Mat3c g = dyadic_green(Point3(0.1, -0.2, 1.3), Point3(0.1, -0.2, 0.3), med);
    CHECK(std::abs(g(0, 0) - g11) <= 1e-10 * std::abs(g11));
    CHECK(std::abs(g(1, 1) - g11) <= 1e-10 * std::abs(g11));
    CHECK(std::abs(g(2, 2) - g33) <= 1e-9 * std::abs(g33));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                CHECK(std::abs(g(i, j)) <= 1e-12 * std::abs(g11));
}

TEST_CASE("dyadic_green - structure")
{
    // transverse far field along the propagation axis
    for (double d : {0.05, 1.0, 30.0})
    {
        const auto t = dyadic_green_terms(Point3(0, 0, d), Point3::Zero(), med);
        CHECK(std::abs(t.far(2, 2)) == 0.0);
    }

    // middle + near terms fall off like 1/(kd)
    double prev = 0.0;
    for (double d : {0.1, 1.0, 10.0, 100.0})
    {
        const auto t = dyadic_green_terms(Point3(0.3 * d, 0.2 * d, d), Point3::Zero(), med);
        const double ratio = (t.middle + t.near).norm() / t.far.norm();
        const double kd = med.wavenumber * d * std::sqrt(1.13);
        CHECK(ratio * kd < 3.0);
        if (prev > 0.0)
            CHECK(ratio < prev / 5.0);
        prev = ratio;
    }

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i)
    {
        const Point3 r(u(rng), u(rng), u(rng) + 3.0), s(u(rng), u(rng), u(rng));
        const Mat3c g = dyadic_green(r, s, med);
        CHECK((g - g.transpose()).norm() <= 1e-12 * g.norm());
        Medium m2 = med;
        m2.z0 *= 2.5;
        CHECK((dyadic_green(r, s, m2) - 2.5 * g).norm() <= 1e-14 * g.norm());
        // reciprocity of the point pair
        CHECK(rel(dyadic_green(s, r, med), g) <= 1e-12);
    }

    CHECK_THROWS_AS(dyadic_green(Point3(1, 2, 3), Point3(1, 2, 3), med), SingularGeometry);
    CHECK_THROWS_AS(dyadic_green(Point3(0, 0, 1e-4), Point3::Zero(), med), SingularGeometry);
}

TEST_CASE("sample_user_channel")
{
    const auto one = make_aperture(0.2, 0.2, 1, 1);
    const auto c1 = sample_user_channel(one, Point3(1, 2, 3), med);
    REQUIRE(c1.g_samples.size() == 1);
    CHECK((c1.g_samples[0] - dyadic_green(Point3(1, 2, 3), Point3::Zero(), med)).norm() == 0.0);

    const auto ap = make_aperture(0.3, 0.3, 32, 32);
    const auto du = sample_user_channel(ap, Point3(0, 0, 30), med);
    REQUIRE(du.g_samples.size() == 1024);
    for (const auto &g : du.g_samples)
        CHECK(g.allFinite());

    // mirror x -> -x maps the grid onto itself with i -> nx-1-i
    const auto cp = sample_user_channel(ap, Point3(5, 5, 30), med);
    const auto cm = sample_user_channel(ap, Point3(-5, 5, 30), med);
    const Eigen::Matrix3cd refl = Eigen::Vector3cd(-1.0, 1.0, 1.0).asDiagonal();
    double worst = 0.0;
    for (int i = 0; i < ap.nx; ++i)
        for (int j = 0; j < ap.ny; ++j)
        {
            const Mat3c &a = cp.g_samples[ap.index(i, j)];
            const Mat3c b = refl * cm.g_samples[ap.index(ap.nx - 1 - i, j)] * refl;
            worst = std::max(worst, rel(b, a));
        }
    CHECK(worst <= 1e-10);

    CHECK_THROWS_AS(sample_user_channel(ap, Point3(0.01, 0.02, 0.0), med), SingularGeometry);
    CHECK_NOTHROW(sample_user_channel(ap, Point3(1.0, 0.0, 0.0), med));
}

TEST_CASE("radiate_field")
{
    const auto ap = make_aperture(0.3, 0.3, 16, 16);
    const auto ch = sample_user_channel(ap, Point3(1, 1, 1), med);
    CurrentMap zero(ap.size(), Vec3c::Zero());
    CHECK(radiate_field(ch, zero, ap).norm() == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    CurrentMap j(ap.size());
    for (auto &v : j)
        v = Vec3c(cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)), cplx(n01(rng), n01(rng)));
    const Vec3c e = radiate_field(ch, j, ap);
    CurrentMap j2 = j;
    for (auto &v : j2)
        v *= 2.0;
    CHECK((radiate_field(ch, j2, ap) - 2.0 * e).norm() <= 1e-14 * e.norm());

    const auto one = make_aperture(0.1, 0.1, 1, 1);
    const auto c1 = sample_user_channel(one, Point3(0.5, 0, 2), med);
    const Vec3c psi = Vec3c(1.0, cplx(0, 1), 0.5).normalized();
    CurrentMap j1{c1.g_samples[0].adjoint() * psi};
    const Vec3c expect = 0.01 * c1.g_samples[0] * c1.g_samples[0].adjoint() * psi;
    CHECK((radiate_field(c1, j1, one) - expect).norm() <= 1e-12 * expect.norm());

    CHECK_THROWS_AS(radiate_field(ch, CurrentMap(3), ap), InvalidArgument);
}

TEST_CASE("radiate_field - quadrature convergence under grid refinement")
{
    // Beams steered at the user, i.e. no destructive cancellation in the integral
    const auto coarse = make_aperture(0.3, 0.3, 32, 32);
    const auto fine = make_aperture(0.3, 0.3, 64, 64);
    const Vec3c psi = Vec3c(0.3, 1.0, cplx(0.0, 0.2)).normalized();
    for (const Point3 &u : {Point3(0, 0, 1), Point3(1, 1, 1), Point3(-1, 1, 1), Point3(5, 5, 30)})
    {
        auto field = [&](const Aperture &ap) {
            CurrentMap j;
            for (const auto &s : ap.samples)
                j.push_back(dyadic_green(u, s.position, med).adjoint() * psi);
            return radiate_field(sample_user_channel(ap, u, med), j, ap);
        };
        const Vec3c ec = field(coarse), ef = field(fine);
        CHECK((ec - ef).norm() <= 0.01 * ef.norm());
    }
}

TEST_CASE("fresnel_channel")
{
    // broadside, source at the centre: identical to the far-field term
    const Point3 r(0, 0, 3.0);
    const auto t = dyadic_green_terms(r, Point3::Zero(), med);
    for (int order : {1, 2})
        CHECK((fresnel_channel(r, Point3::Zero(), med, order) - t.far).norm() <= 1e-14 * t.far.norm());

    // second order tracks the exact path length at least as well as first order
    const auto ap = make_aperture(1.5, 0.5, 30, 10);
    for (const Point3 &u : {Point3(0, 0, 2), Point3(0.5, 0.2, 4), Point3(-1, 0.3, 8), Point3(0, 0, 25)})
        for (const auto &s : ap.samples)
        {
            const double exact = (u - s.position).norm();
            const double e1 = std::abs(fresnel_path_length(u, s.position, 1) - exact);
            const double e2 = std::abs(fresnel_path_length(u, s.position, 2) - exact);
            CHECK(e2 <= e1 + 1e-15);
        }

    // the gap to the exact kernel closes with distance
    const Point3 corner(0.7, 0.2, 0.0);
    double prev = 1e300;
    for (double z : {2.0, 4.0, 8.0, 16.0, 32.0})
    {
        const Point3 u(0.0, 0.0, z);
        const Mat3c g = dyadic_green(u, corner, med);
        const double gap = (fresnel_channel(u, corner, med, 1) - g).norm() / g.norm();
        CHECK(gap < prev);
        prev = gap;
    }

    CHECK_THROWS_AS(fresnel_channel(Point3(1, 0, 0), Point3::Zero(), med, 1), SingularGeometry);
    CHECK_THROWS_AS(fresnel_channel(Point3(0, 0, 1), Point3::Zero(), med, 3), InvalidArgument);
}

TEST_CASE("fresnel_channel - phase agreement beyond the Fraunhofer distance")
{
    const auto ap = make_aperture(0.3, 0.3, 16, 16);
    const double dfar = fraunhofer_distance(ap.diagonal(), med.wavelength);
    for (double angle : {0.0, 25.0 * std::numbers::pi / 180.0})
        for (double scale : {1.0, 2.0})
        {
            const double d = scale * dfar;
            const Point3 u(d * std::sin(angle), 0.0, d * std::cos(angle));
            double worst = 0.0;
            for (const auto &s : ap.samples)
            {
                const double ph = med.wavenumber * (fresnel_path_length(u, s.position, 1) - (u - s.position).norm());
                worst = std::max(worst, std::abs(ph));
            }
            CHECK(worst <= 0.1);
        }
}

TEST_CASE("scalar_green_linear")
{
    for (const auto &[d, r, s] : {std::tuple{0.6, 0.0, 0.1}, {1.5, 0.2, -0.3}, {3.0, -1.0, 0.05}})
    {
        const Point3 user(d, 0.0, r), src(0.0, 0.0, s);
        const cplx v = scalar_green_linear(user, src, med);
        const auto t = dyadic_green_terms(user, src, med);
        CHECK(std::abs(v - t.far(2, 2)) <= 1e-12 * std::abs(v));
        const double kd = med.wavenumber * (user - src).norm();
        CHECK(std::abs(v - t.total()(2, 2)) <= 2.0 / kd * std::abs(v) * (user - src).squaredNorm() / (d * d));

        const double rr = (r - s) * (r - s) + d * d;
        CHECK_THAT(std::abs(v), WithinRel(med.wavenumber * med.z0 * d * d / (4.0 * std::numbers::pi * rr * std::sqrt(rr)), 1e-12));

        // one wavelength of extra path leaves the phase unchanged
        const Point3 dir = (user - src).normalized();
        const Point3 user2 = user + med.wavelength * dir;
        const cplx v2 = scalar_green_linear(user2, src, med);
        CHECK(std::abs(std::arg(v2 / v)) <= 1e-9);
    }
    CHECK_THROWS_AS(scalar_green_linear(Point3(0, 0, 1), Point3(0, 0, 1), med), SingularGeometry);
}

TEST_CASE("correlation_metric")
{
    const double lam = med.wavelength;
    const Point3 u1(0.6, 0.0, 0.0), u2(1.5, 0.0, 0.2);
    auto metric = [&](double c_lam, const Point3 &a, const Point3 &b) {
        return correlation_metric(c_lam * lam, a, b, med, int(200 * c_lam));
    };
    CHECK_THROWS_AS(correlation_metric(1.0, u1, u1, med, 100), InvalidArgument);
    CHECK_THROWS_AS(correlation_metric(0.0, u1, u2, med, 100), InvalidArgument);

    // continuity towards the self-correlation (1/c) int |g|^2
    const double c = 10 * lam;
    double self = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i)
        self += std::norm(scalar_green_linear(u1, Point3(0, 0, -0.5 * c + (i + 0.5) * c / n), med)) * c / n;
    self /= c;
    CHECK_THAT(correlation_metric(c, u1, u1 + Point3(0, 0, 1e-9), med, n), WithinRel(self, 1e-5));

    const double m10 = metric(10, u1, u2), m100 = metric(100, u1, u2);
    CHECK(m100 < m10);
    CHECK(m100 <= m10 / 3.0);
    double prev = m100;
    for (double cl : {200.0, 400.0, 800.0})
    {
        const double m = metric(cl, u1, u2);
        CHECK(m < prev);
        prev = m;
    }
    // c * metric settles to a constant: 1/c decay
    CHECK_THAT(400 * metric(400, u1, u2), WithinRel(800 * metric(800, u1, u2), 0.01));
}
