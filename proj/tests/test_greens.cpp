// SPDX-License-Identifier: Apache-2.0
//
// emcap: spatial eigenmodes and capacity of line-of-sight EM links
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


#include "emcap/greens.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace emcap;
using V3 = Vector3<double>;
using C = std::complex<double>;

namespace
{
    const double k0 = 2 * std::numbers::pi;

    LinkGeometry fig3_link()
    {
        const double side = 10.0 / std::numbers::sqrt2;
        return make_link(rect_aperture<double>({0, 0, 0}, side, side), rect_aperture<double>({0, 0, 20}, side, side));
    }

    // (I + grad grad / k^2) g by central differences of g in the field point
    Dyadic<double> dgf_by_differences(const V3 &r, const V3 &s, double k)
    {
        const double h = 5e-4;
        Dyadic<double> out = Dyadic<double>::Identity() * sgf_exact(r, s, k);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
            {
                const V3 ea = V3::Unit(a) * h, eb = V3::Unit(b) * h;
                const C d = (sgf_exact<double>(r + ea + eb, s, k) - sgf_exact<double>(r + ea - eb, s, k) -
                             sgf_exact<double>(r - ea + eb, s, k) + sgf_exact<double>(r - ea - eb, s, k)) /
                            (4 * h * h);
                out(a, b) += d / (k * k);
            }
        return out;
    }
}

TEST_CASE("scalar green's function")
{
    const V3 r(1, 2, 3), s(0, 0, 0);
    const double R = std::sqrt(14.0);
    const C g = sgf_exact(r, s, k0);
    CHECK(std::abs(g) == doctest::Approx(1 / (4 * std::numbers::pi * R)));
    CHECK(std::abs(g - std::exp(C(0, -k0 * R)) / (4 * std::numbers::pi * R)) < 1e-15);
    CHECK_THROWS_AS(sgf_exact(s, s, k0), std::invalid_argument);
}

TEST_CASE("dyadic green's function against differentiated scalar kernel")
{
    for (const V3 &r : {V3(0.3, -0.2, 0.9), V3(2, 1, 4), V3(-3.5, 5, 20)})
    {
        const V3 s(0.1, 0.2, -0.1);
        const Dyadic<double> G = dgf_full(r, s, k0);
        const Dyadic<double> ref = dgf_by_differences(r, s, k0);
        CHECK((G - ref).norm() / ref.norm() < 1e-5);
        CHECK((G - G.transpose()).norm() < 1e-14 * G.norm());
    }
    // far zone: the transverse part dominates with relative error O(1/kR)
    const V3 s(0, 0, 0), far(10, 20, 400);
    const Dyadic<double> full = dgf_full(far, s, k0), tr = dgf_transverse(far, s, k0);
    CHECK((full - tr).norm() / tr.norm() < 2.0 / (k0 * far.norm()));
    // transverse dyadic annihilates the propagation direction
    const V3 dir = far.normalized();
    CHECK((tr * dir.cast<C>()).norm() < 1e-14 * tr.norm());
}

TEST_CASE("tukey window")
{
    CHECK(tukey_window<double>(0).size() == 1);
    CHECK(tukey_window<double>(0)(0) == 1.0);
    const auto w = tukey_window<double>(4);
    CHECK(w(0) == 1.0);
    CHECK(w(2) == 1.0);
    CHECK(w(3) == doctest::Approx(0.5));
    CHECK(w(4) == doctest::Approx(0.0).scale(1.0));
    const auto w93 = tukey_window<double>(93);
    for (int l = 1; l <= 93; ++l)
        CHECK(w93(l) <= w93(l - 1));
    CHECK_THROWS_AS(tukey_window<double>(-1), std::invalid_argument);
}

TEST_CASE("translator: L = 0 is a constant h_0")
{
    const auto coef = translator_coefficients(20 * k0, 0, false);
    const C h0 = spherical_hankel(0, 20 * k0)(0);
    for (const double c : {-1.0, 0.0, 0.5, 1.0})
        CHECK(std::abs(translator_value(coef, c) - h0) < 1e-15);
}

TEST_CASE("translator: depends on direction only through the angle to the axis")
{
    const double kr = k0 * 20;
    const V3 axis_a = V3::UnitZ(), axis_b = V3(1, -2, 2).normalized();
    const auto ga = cap_direction_grid<double>(axis_a, 1.0, 12, 24);
    const auto gb = cap_direction_grid<double>(axis_b, 1.0, 12, 24);
    const auto ta = translator_table(ga, k0, V3(axis_a * 20), 75, true);
    const auto tb = translator_table(gb, k0, V3(axis_b * 20), 75, true);
    CHECK(ta.k_rpq == doctest::Approx(kr));
    CHECK((ta.values - tb.values).cwiseAbs().maxCoeff() < 1e-10 * ta.values.cwiseAbs().maxCoeff());
    // mirrored pair: alpha(-k, -r) = alpha(k, r)
    const auto coef = translator_coefficients(kr, 75, false);
    for (Eigen::Index i = 0; i < ga.size(); i += 37)
    {
        const double c = ga.directions.col(i).dot(axis_a);
        CHECK(std::abs(translator_value(coef, (-ga.directions.col(i)).dot(-axis_a)) - translator_value(coef, c)) ==
              doctest::Approx(0.0).scale(1e-9));
    }
    CHECK_THROWS_AS(translator_table(ga, k0, V3(0, 0, 0), 10, false), std::invalid_argument);
}

TEST_CASE("plane-wave expansion: full sphere reproduces the scalar kernel")
{
    const auto link = fig3_link();
    const int L = link.default_truncation();
    CHECK(L == 75);
    const auto grid = cap_direction_grid<double>(link.r_pq(), std::numbers::pi, L + 1, 2 * L + 2);
    const auto table = translator_table(grid, link.k, link.r_pq(), L, false);
    const V3 s(-5, 1, 1), r(-3.5, 5, 20);
    const C approx = sgf_planewave(r, s, link, grid, table);
    const C exact = sgf_exact(r, s, link.k);
    CHECK(std::abs(approx - exact) / std::abs(exact) < 1e-6);

    const auto small = cap_direction_grid<double>(link.r_pq(), 1.0, 4, 4);
    CHECK_THROWS_AS(sgf_planewave(r, s, link, small, table), std::invalid_argument);
}

TEST_CASE("plane-wave expansion: error against cap half-angle")
{
    const auto link = fig3_link();
    std::vector<double> th;
    for (int d = 10; d <= 90; d += 10)
        th.push_back(d * std::numbers::pi / 180.0);
    const V3 s(-5, 1, 1), r(-3.5, 5, 20);
    const auto plain = expansion_error_sweep(link, s, r, th, false);
    const auto tapered = expansion_error_sweep(link, s, r, th, true);
    for (std::size_t i = 1; i < th.size(); ++i)
    {
        CHECK(plain[i].relative_error <= 1.1 * plain[i - 1].relative_error);
        CHECK(tapered[i].relative_error <= 1.1 * tapered[i - 1].relative_error);
    }
    // the taper converges faster and reaches a lower floor
    CHECK(tapered.back().relative_error < plain.back().relative_error);
    CHECK(tapered[5].relative_error < 1e-3);
    CHECK(plain.front().relative_error > 0.1);
}
