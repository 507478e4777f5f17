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

#ifndef EMCAP_GREENS_HPP
#define EMCAP_GREENS_HPP

#include "emcap/geometry.hpp"
#include "emcap/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace emcap
{

    template <typename Scalar>
    using Dyadic = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

    namespace detail
    {
        template <typename Scalar>
        Scalar separation(const Vector3<Scalar> &r, const Vector3<Scalar> &s, const char *who)
        {
            const Scalar R = (r - s).norm();
            if (!(R > Scalar(0)))
                throw std::invalid_argument(std::string(who) + ": coincident source and field points");
            return R;
        }
    }

    /// exp(-jkR) / (4 pi R).
    template <typename Scalar>
    std::complex<Scalar> sgf_exact(const Vector3<Scalar> &r, const Vector3<Scalar> &s, Scalar k)
    {
        const Scalar R = detail::separation(r, s, "sgf_exact");
        const Scalar pi = std::numbers::pi_v<Scalar>;
        return std::polar(Scalar(1) / (Scalar(4) * pi * R), -k * R);
    }

    /// Full free-space dyadic Green's function including the reactive terms.
    template <typename Scalar>
    Dyadic<Scalar> dgf_full(const Vector3<Scalar> &r, const Vector3<Scalar> &s, Scalar k)
    {
        using C = std::complex<Scalar>;
        const Scalar R = detail::separation(r, s, "dgf_full");
        const Vector3<Scalar> rh = (r - s) / R;
        const Eigen::Matrix<Scalar, 3, 3> I = Eigen::Matrix<Scalar, 3, 3>::Identity();
        const Eigen::Matrix<Scalar, 3, 3> RR = rh * rh.transpose();
        const Scalar kr = k * R;
        const C g = sgf_exact(r, s, k);
        const C near_coef = C(-Scalar(1) / (kr * kr), -Scalar(1) / kr); // -j/kR - 1/(kR)^2
        Dyadic<Scalar> out = (I - RR).template cast<C>() + (I - Scalar(3) * RR).template cast<C>() * near_coef;
        return out * g;
    }

    /// Far-zone transverse part (I - R^R^) g.
    template <typename Scalar>
    Dyadic<Scalar> dgf_transverse(const Vector3<Scalar> &r, const Vector3<Scalar> &s, Scalar k)
    {
        using C = std::complex<Scalar>;
        const Scalar R = detail::separation(r, s, "dgf_transverse");
        const Vector3<Scalar> rh = (r - s) / R;
        const Eigen::Matrix<Scalar, 3, 3> P = Eigen::Matrix<Scalar, 3, 3>::Identity() - rh * rh.transpose();
        return P.template cast<C>() * sgf_exact(r, s, k);
    }

    /// Flat on [0, L/2], raised-cosine taper on (L/2, L].
    template <typename Scalar>
    VectorX<Scalar> tukey_window(int L)
    {
        if (L < 0)
            throw std::invalid_argument("tukey_window: L must be non-negative");
        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar half = Scalar(L) / Scalar(2);
        VectorX<Scalar> w(L + 1);
        for (int l = 0; l <= L; ++l)
            w(l) = (Scalar(l) <= half) ? Scalar(1)
                                       : Scalar(0.5) * (Scalar(1) + std::cos(pi * (Scalar(l) - half) / half));
        return w;
    }

    /// Translator values alpha(k^ . r^_pq), one per direction sample.
    template <typename Scalar>
    struct TranslatorTableT
    {
        ComplexVectorX<Scalar> values;
        int L = 0;
        bool windowed = false;
        Scalar k_rpq = Scalar(0);
        Vector3<Scalar> axis = Vector3<Scalar>::UnitZ();

        Eigen::Index size() const { return values.size(); }
    };
    using TranslatorTable = TranslatorTableT<double>;

    // Per-order series coefficients (-j)^l (2l+1) h_l(k r_pq) [w_l].
    template <typename Scalar>
    ComplexVectorX<Scalar> translator_coefficients(Scalar k_rpq, int L, bool windowed)
    {
        using C = std::complex<Scalar>;
        if (L < 0)
            throw std::invalid_argument("translator: L must be non-negative");
        const ComplexVectorX<Scalar> h = spherical_hankel(L, k_rpq);
        const VectorX<Scalar> w = windowed ? tukey_window<Scalar>(L) : VectorX<Scalar>::Ones(L + 1);
        ComplexVectorX<Scalar> coef(L + 1);
        static const C minus_j_pow[4] = {C(1, 0), C(0, -1), C(-1, 0), C(0, 1)};
        for (int l = 0; l <= L; ++l)
            coef(l) = minus_j_pow[l % 4] * Scalar(2 * l + 1) * h(l) * w(l);
        return coef;
    }

    // alpha at a single cosine value.
    template <typename Scalar>
    std::complex<Scalar> translator_value(const ComplexVectorX<Scalar> &coef, Scalar cos_angle)
    {
        const int L = static_cast<int>(coef.size()) - 1;
        const VectorX<Scalar> p = legendre_sequence(L, std::clamp(cos_angle, Scalar(-1), Scalar(1)));
        return (coef.array() * p.array().template cast<std::complex<Scalar>>()).sum();
    }

    template <typename Scalar>
    TranslatorTableT<Scalar> translator_table(const DirectionGridT<Scalar> &grid, Scalar k, const Vector3<Scalar> &r_pq,
                                              int L, bool windowed)
    {
        const Scalar dist = r_pq.norm();
        if (!(dist > Scalar(0)))
            throw std::invalid_argument("translator_table: r_pq must be non-zero");
        if (!(k > Scalar(0)))
            throw std::invalid_argument("translator_table: wavenumber must be positive");

        TranslatorTableT<Scalar> t;
        t.L = L;
        t.windowed = windowed;
        t.k_rpq = k * dist;
        t.axis = r_pq / dist;
        const ComplexVectorX<Scalar> coef = translator_coefficients(t.k_rpq, L, windowed);

        t.values.resize(grid.size());
        // Directions on a cap share the same cosine per theta ring; cache by value.
        Scalar last_cos = Scalar(2);
        std::complex<Scalar> last_val{};
        for (Eigen::Index i = 0; i < grid.size(); ++i)
        {
            const Scalar c = grid.directions.col(i).dot(t.axis);
            if (c != last_cos)
            {
                last_cos = c;
                last_val = translator_value(coef, c);
            }
            t.values(i) = last_val;
        }
        return t;
    }

    namespace detail
    {
        template <typename Scalar>
        void check_table(const DirectionGridT<Scalar> &grid, const TranslatorTableT<Scalar> &table)
        {
            if (grid.size() != table.size())
                throw std::invalid_argument("translator table length does not match the direction grid");
        }
    }

    /// Plane-wave (addition theorem) reconstruction of the scalar Green's function.
    template <typename Scalar>
    std::complex<Scalar> sgf_planewave(const Vector3<Scalar> &r, const Vector3<Scalar> &s,
                                       const LinkGeometryT<Scalar> &geometry, const DirectionGridT<Scalar> &grid,
                                       const TranslatorTableT<Scalar> &table)
    {
        using C = std::complex<Scalar>;
        detail::check_table(grid, table);
        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar k = geometry.k;
        // The two exponentials combine into one phase along r_qs + r_rp.
        const Vector3<Scalar> d = (geometry.transmitter.center - s) + (r - geometry.receiver.center);
        C acc(0);
        for (Eigen::Index i = 0; i < grid.size(); ++i)
        {
            const Scalar phase = -k * grid.directions.col(i).dot(d);
            acc += grid.weights(i) * table.values(i) * std::polar(Scalar(1), phase);
        }
        return C(0, -k / (Scalar(16) * pi * pi)) * acc;
    }

    template <typename Scalar>
    struct ErrorSample
    {
        Scalar theta_e;
        Scalar relative_error;
    };

    struct SweepOptions
    {
        int L = 0;             // 0: derive from the geometry
        int n_theta = 0;       // 0: default_n_theta
        int n_phi = 0;         // 0: default_n_phi
    };

    /// |G_cap - G| / |G| as a function of the cap half-angle.
    template <typename Scalar>
    std::vector<ErrorSample<Scalar>> expansion_error_sweep(const LinkGeometryT<Scalar> &geometry,
                                                           const Vector3<Scalar> &s, const Vector3<Scalar> &r,
                                                           const std::vector<Scalar> &theta_list, bool windowed,
                                                           SweepOptions opt = {})
    {
        const int L = opt.L > 0 ? opt.L : geometry.default_truncation();
        const std::complex<Scalar> exact = sgf_exact(r, s, geometry.k);
        std::vector<ErrorSample<Scalar>> out;
        out.reserve(theta_list.size());
        for (const Scalar th : theta_list)
        {
            const int nt = opt.n_theta > 0 ? opt.n_theta : default_n_theta(L, static_cast<double>(th));
            const int np = opt.n_phi > 0 ? opt.n_phi : default_n_phi(L);
            const auto grid = cap_direction_grid<Scalar>(geometry.r_pq(), th, nt, np);
            const auto table = translator_table(grid, geometry.k, geometry.r_pq(), L, windowed);
            const auto approx = sgf_planewave(r, s, geometry, grid, table);
            out.push_back({th, std::abs(approx - exact) / std::abs(exact)});
        }
        return out;
    }

} // namespace emcap

#endif
