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

#include <holobeam/energy.hpp>

using namespace holobeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const Medium med = Medium::from_frequency(10e9);
    const ReceiverGeometry geom = ReceiverGeometry::isotropic(med);
    const EhCircuit circuit{};
} // namespace

TEST_CASE("poynting_power")
{
    std::vector<Vec3c> none{Vec3c::Zero(), Vec3c::Zero()};
    CHECK(poynting_power(none, geom) == 0.0);

    // 40-digit reference: A_R / (2 Z) at 10 GHz, Z = 25 Ohm
    std::vector<Vec3c> unit{Vec3c(0.6, cplx(0, 0.8), 0.0)};
    CHECK_THAT(poynting_power(unit, geom), WithinRel(1.43239448782705802191995387035262925831e-6, 1e-13));
    CHECK_THAT(geom.area, WithinRel(7.161972439135290109599769351763146291551e-5, 1e-14));

    ReceiverGeometry grazing = geom;
    grazing.incidence = 0.5 * std::numbers::pi;
    CHECK_THAT(poynting_power(unit, grazing), WithinAbs(0.0, 1e-22));

    // additive over streams, quadratic under scaling
    std::vector<Vec3c> two{Vec3c(1, 2, 3), Vec3c(cplx(0, 1), 0, 1)};
    std::vector<Vec3c> a{two[0]}, b{two[1]}, scaled{3.0 * two[0], 3.0 * two[1]};
    CHECK_THAT(poynting_power(two, geom), WithinRel(poynting_power(a, geom) + poynting_power(b, geom), 1e-15));
    CHECK_THAT(poynting_power(scaled, geom), WithinRel(9.0 * poynting_power(two, geom), 1e-15));
    CHECK_THROWS_AS(ReceiverGeometry::isotropic(med, 2.0), InvalidArgument);
}

TEST_CASE("eh_output")
{
    CHECK(std::abs(eh_output(0.0, circuit)) <= 1e-15);
    // 40-digit reference for Xi(b)
    CHECK_THAT(eh_output(circuit.b, circuit), WithinRel(0.001878077823567581989381072775754044782209, 1e-13));
    CHECK_THAT(eh_output(1.0, circuit), WithinRel(circuit.m, 1e-12));

    // literal closed form agrees away from the origin
    const double X = std::exp(circuit.a * circuit.b) / (1.0 + std::exp(circuit.a * circuit.b));
    const double Y = circuit.m / std::exp(circuit.a * circuit.b);
    for (double p : {1e-4, 1e-3, 2.2e-3, 5e-3})
        CHECK_THAT(eh_output(p, circuit), WithinRel(circuit.m / (X * (1.0 + std::exp(-circuit.a * (p - circuit.b)))) - Y, 1e-10));

    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i)
    {
        const double v = eh_output(0.02 * i / 1000.0, circuit);
        CHECK(v > prev);
        CHECK(v < circuit.m);
        prev = v;
    }
    CHECK_THROWS_AS(eh_output(-1e-6, circuit), InvalidArgument);
}

TEST_CASE("eh_inverse")
{
    CHECK(eh_inverse(0.0, circuit) == 0.0);
    // 40-digit reference for the inverse at 1, 2, 3 mW
    CHECK_THAT(eh_inverse(1e-3, circuit), WithinRel(0.001579789394347167145436855881462223141646, 1e-12));
    CHECK_THAT(eh_inverse(2e-3, circuit), WithinRel(0.002280497838526232579805320305314470155335, 1e-12));
    CHECK_THAT(eh_inverse(3e-3, circuit), WithinRel(0.003033871255275381063186054399082205437949, 1e-12));
    for (double p0 : {1e-6, 1e-4, 1e-3, 2e-3, 3e-3, 3.8e-3})
        CHECK_THAT(eh_output(eh_inverse(p0, circuit), circuit), WithinRel(p0, 1e-9));
    CHECK_THROWS_AS(eh_inverse(circuit.m, circuit), InfeasibleRequirement);
    CHECK_THROWS_AS(eh_inverse(5e-3, circuit), InfeasibleRequirement);
    CHECK_THROWS_AS(eh_inverse(-1.0, circuit), InvalidArgument);
}

TEST_CASE("eh_threshold")
{
    CHECK(eh_threshold(0.0, circuit, geom) == 0.0);
    CHECK_THAT(eh_threshold(1e-3, circuit, geom), WithinRel(1102.90105677780647521074725105018432233, 1e-12));

    // fields meeting the threshold deliver exactly the inverse power
    const double thr = eh_threshold(2e-3, circuit, geom);
    std::vector<Vec3c> f{Vec3c(std::sqrt(0.25 * thr), 0, 0), Vec3c(0, cplx(0, std::sqrt(0.75 * thr)), 0)};
    CHECK_THAT(poynting_power(f, geom), WithinRel(eh_inverse(2e-3, circuit), 1e-14));

    ReceiverGeometry grazing = geom;
    grazing.incidence = 0.5 * std::numbers::pi;
    CHECK_THROWS_AS(eh_threshold(1e-3, circuit, grazing), InfeasibleRequirement);
    CHECK_THROWS_AS(eh_threshold(4e-3, circuit, geom), InfeasibleRequirement);
}
