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


#include "emcap/channel.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace emcap;
using V3 = Vector3<double>;
using C = std::complex<double>;

namespace
{
    struct Setup
    {
        LinkGeometry link;
        DirectionGrid grid;
        TranslatorTable table;
    };

    Setup make_setup(const LinkGeometry &link, double theta_e, int L, bool windowed)
    {
        Setup s{link, {}, {}};
        s.grid = cap_direction_grid<double>(link.r_pq(), theta_e, default_n_theta(L, theta_e), default_n_phi(L));
        s.table = translator_table(s.grid, link.k, link.r_pq(), L, windowed);
        return s;
    }

    LinkGeometry ci_link()
    {
        return make_link(rect_aperture<double>({0, 0, 0}, 4.0, 4.0), rect_aperture<double>({0, 0, 10.2}, 3.2, 3.2));
    }

    LinkGeometry paper_link()
    {
        return make_link(rect_aperture<double>({0, 0, 0}, 10.0, 10.0), rect_aperture<double>({0, 0, 25.5}, 8.0, 8.0));
    }

    // Low-order Legendre current with random complex coefficients.
    ComplexVectorX<double> random_current(const SurfaceGrid &g, std::mt19937 &rng, int order)
    {
        std::normal_distribution<double> nd;
        ComplexVectorX<double> J = ComplexVectorX<double>::Zero(g.size());
        for (int m = 0; m <= order; ++m)
            for (int n = 0; m + n <= order; ++n)
            {
                const C a(nd(rng), nd(rng));
                for (Eigen::Index p = 0; p < g.size(); ++p)
                {
                    const auto uv = g.aperture.local(g.points.col(p));
                    const double x = std::clamp(2 * uv(0) / g.aperture.side_x, -1.0, 1.0);
                    const double y = std::clamp(2 * uv(1) / g.aperture.side_y, -1.0, 1.0);
                    J(p) += a * legendre_sequence(m, x)(m) * legendre_sequence(n, y)(n);
                }
            }
        return J;
    }

    double rel_max(const ComplexVectorX<double> &a, const ComplexVectorX<double> &b)
    {
        return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
    }
}

TEST_CASE("kernel constants")
{
    const double k = 2 * std::numbers::pi;
    CHECK(omega_mu(k) == doctest::Approx(k * 376.730));
    CHECK(kernel_prefactor(k) == doctest::Approx(-k * k * 376.730 / (16 * std::numbers::pi * std::numbers::pi)));
}

TEST_CASE("kernel point equals -j omega mu times the plane-wave Green's function")
{
    const auto s = make_setup(ci_link(), std::numbers::pi / 3, 42, true);
    const V3 src(0.7, -1.2, 0.0), rcv(-0.4, 1.1, 10.2);
    const C h = kernel_h_point(rcv, src, s.link, s.grid, s.table);
    const C g = sgf_planewave(rcv, src, s.link, s.grid, s.table);
    CHECK(std::abs(h - C(0, -omega_mu(s.link.k)) * g) < 1e-12 * std::abs(h));
}

TEST_CASE("factorized kernel matrix matches entrywise evaluation")
{
    const auto s = make_setup(ci_link(), std::numbers::pi / 3, 42, true);
    for (const int n : {4, 49})
    {
        const auto src = tensor_grid(s.link.transmitter, n);
        const auto rcv = tensor_grid(s.link.receiver, n);
        const auto H = kernel_matrix(src, rcv, s.link, s.grid, s.table);
        const auto ref = kernel_matrix_entrywise(src, rcv, s.link, s.grid, s.table);
        CHECK(H.rows() == rcv.size());
        CHECK(H.cols() == src.size());
        CHECK((H.entries - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("kernel matrix: paper preset spot checks")
{
    const auto s = make_setup(paper_link(), std::numbers::pi / 3, 93, true);
    const auto src = tensor_grid(s.link.transmitter, 512);
    const auto rcv = tensor_grid(s.link.receiver, 512);
    const auto H = kernel_matrix(src, rcv, s.link, s.grid, s.table);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, int(src.size()) - 1);
    const double scale = H.entries.cwiseAbs().maxCoeff();
    for (int t = 0; t < 50; ++t)
    {
        const int i = pick(rng), j = pick(rng);
        const C ref = kernel_h_point<double>(rcv.points.col(i), src.points.col(j), s.link, s.grid, s.table);
        CHECK(std::abs(H.entries(i, j) - ref) <= 1e-12 * scale);
    }
}

TEST_CASE("kernel matrix: entry budget guard")
{
    const auto s = make_setup(ci_link(), 0.5, 20, false);
    const auto src = tensor_grid(s.link.transmitter, 100);
    const auto rcv = tensor_grid(s.link.receiver, 100);
    CHECK_THROWS_AS(kernel_matrix(src, rcv, s.link, s.grid, s.table, 9999), std::length_error);
    CHECK_NOTHROW(kernel_matrix(src, rcv, s.link, s.grid, s.table, 10000));
}

TEST_CASE("propagator: delta current and linearity")
{
    const auto s = make_setup(ci_link(), std::numbers::pi / 3, 42, true);
    const auto src = tensor_grid(s.link.transmitter, 36);
    const auto rcv = tensor_grid(s.link.receiver, 25);
    const auto H = kernel_matrix(src, rcv, s.link, s.grid, s.table);

    ComplexVectorX<double> delta = ComplexVectorX<double>::Zero(src.size());
    delta(7) = 1.0;
    const auto f = propagate_current(delta, src, rcv, s.link, s.grid, s.table);
    const ComplexVectorX<double> col = H.entries.col(7) * src.weights(7);
    CHECK(rel_max(f, col) < 1e-12);

    std::mt19937 rng(3);
    const auto J = random_current(src, rng, 3);
    const ComplexVectorX<double> direct = H.entries * J.cwiseProduct(src.weights.cast<C>());
    CHECK(rel_max(propagate_current(J, src, rcv, s.link, s.grid, s.table), direct) < 1e-12);
    CHECK_THROWS_AS(propagate_current(ComplexVectorX<double>(3), src, rcv, s.link, s.grid, s.table),
                    std::invalid_argument);
}

TEST_CASE("reference field: one-term sum and dense form")
{
    const double k = 2 * std::numbers::pi;
    const auto src = tensor_grid(rect_aperture<double>({0, 0, 0}, 1.0, 1.0), 1);
    const auto rcv = tensor_grid(rect_aperture<double>({0, 0, 5}, 1.0, 1.0), 1);
    ComplexVectorX<double> J(1);
    J(0) = C(0.3, -0.4);
    const auto f = reference_field(J, src, rcv, k);
    const C expect = C(0, -omega_mu(k)) * sgf_exact<double>(rcv.points.col(0), src.points.col(0), k) * 1.0 * J(0);
    CHECK(std::abs(f(0) - expect) < 1e-13 * std::abs(expect));

    const auto link = ci_link();
    const auto s2 = tensor_grid(link.transmitter, 16), r2 = tensor_grid(link.receiver, 9);
    std::mt19937 rng(1);
    const auto J2 = random_current(s2, rng, 2);
    const ComplexVectorX<double> dense = reference_kernel(s2, r2, k) * J2.cwiseProduct(s2.weights.cast<C>());
    CHECK(rel_max(reference_field(J2, s2, r2, k), dense) < 1e-13);
}

TEST_CASE("propagator agrees with direct quadrature")
{
    std::mt19937 rng(11);
    SUBCASE("full sphere, paper geometry")
    {
        const auto link = paper_link();
        const int L = 93;
        Setup s{link, cap_direction_grid<double>(link.r_pq(), std::numbers::pi, L + 1, 2 * L + 2), {}};
        s.table = translator_table(s.grid, link.k, link.r_pq(), L, false);
        const auto src = tensor_grid(link.transmitter, 512), rcv = tensor_grid(link.receiver, 512);
        for (int trial = 0; trial < 2; ++trial)
        {
            const auto J = random_current(src, rng, 4);
            const auto fmm = propagate_current(J, src, rcv, link, s.grid, s.table);
            const auto ref = reference_field(J, src, rcv, link.k);
            CHECK(rel_max(fmm, ref) < 1e-3);
        }
    }
    SUBCASE("60 degree cap, paper geometry")
    {
        const auto s = make_setup(paper_link(), std::numbers::pi / 3, 93, false);
        const auto src = tensor_grid(s.link.transmitter, 512), rcv = tensor_grid(s.link.receiver, 512);
        const ComplexVectorX<double> uniform = ComplexVectorX<double>::Ones(src.size());
        CHECK(rel_max(propagate_current(uniform, src, rcv, s.link, s.grid, s.table),
                      reference_field(uniform, src, rcv, s.link.k)) < 2e-2);
        const auto J = random_current(src, rng, 4);
        CHECK(rel_max(propagate_current(J, src, rcv, s.link, s.grid, s.table),
                      reference_field(J, src, rcv, s.link.k)) < 2e-2);
    }
}
