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

#ifndef EMCAP_SPECFUN_HPP
#define EMCAP_SPECFUN_HPP

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace emcap
{

    template <typename Scalar>
    using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <typename Scalar>
    using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

    /// Legendre polynomials P_0(x) .. P_lmax(x) by the three-term recursion.
    template <typename Scalar>
    VectorX<Scalar> legendre_sequence(int l_max, Scalar x)
    {
        if (l_max < 0)
            throw std::invalid_argument("legendre_sequence: l_max must be non-negative");
        if (!(std::abs(x) <= Scalar(1)))
            throw std::domain_error("legendre_sequence: |x| > 1");

        VectorX<Scalar> p(l_max + 1);
        p(0) = Scalar(1);
        if (l_max >= 1)
            p(1) = x;
        for (int n = 2; n <= l_max; ++n)
            p(n) = (Scalar(2 * n - 1) * x * p(n - 1) - Scalar(n - 1) * p(n - 2)) / Scalar(n);
        return p;
    }

    /// Gauss-Legendre rule on [-1, 1].
    template <typename Scalar>
    struct QuadratureRule
    {
        VectorX<Scalar> nodes;   // strictly increasing
        VectorX<Scalar> weights; // positive, sum to 2
        int order = 0;

        Eigen::Index size() const { return nodes.size(); }
    };

    // Newton iteration on P_n from the asymptotic cosine guess. Nodes are
    // symmetric, so only the positive half is iterated.
    template <typename Scalar>
    QuadratureRule<Scalar> gauss_legendre_rule(int n)
    {
        if (n < 1)
            throw std::invalid_argument("gauss_legendre_rule: n must be >= 1");

        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar tol = Scalar(1e-15);
        constexpr int max_iter = 100;

        QuadratureRule<Scalar> rule;
        rule.order = n;
        rule.nodes.resize(n);
        rule.weights.resize(n);

        const int half = (n + 1) / 2;
        for (int i = 0; i < half; ++i)
        {
            Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
            Scalar dp = Scalar(0);
            for (int iter = 0; iter < max_iter; ++iter)
            {
                Scalar p0 = Scalar(1), p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    const Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1)
                {
                    p0 = Scalar(1);
                    p1 = x;
                }
                // p1 = P_n(x), p0 = P_{n-1}(x)
                dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
                const Scalar dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) <= tol * std::max(Scalar(1), std::abs(x)))
                    break;
            }
            // Derivative at the converged node.
            {
                Scalar p0 = Scalar(1), p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    const Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
                    p0 = p1;
                    p1 = p2;
                }
                dp = (n == 1) ? Scalar(1) : Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
            }
            if (n % 2 == 1 && i == half - 1)
                x = Scalar(0);
            const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
            rule.nodes(i) = -x;
            rule.weights(i) = w;
            rule.nodes(n - 1 - i) = x;
            rule.weights(n - 1 - i) = w;
        }
        return rule;
    }

    namespace detail
    {
        template <typename Scalar>
        void require_positive_argument(Scalar x, const char *who)
        {
            if (!(x > Scalar(0)))
                throw std::domain_error(std::string(who) + ": argument must be positive");
        }
    }

    /// Spherical Bessel functions of the first kind j_0(x) .. j_lmax(x).
    ///
    /// Orders below x use the (stable) upward recurrence; everything above is
    /// obtained by downward Miller recurrence normalised against j_0 or j_1.
    template <typename Scalar>
    VectorX<Scalar> spherical_bessel_j(int l_max, Scalar x)
    {
        if (l_max < 0)
            throw std::invalid_argument("spherical_bessel_j: l_max must be non-negative");
        detail::require_positive_argument(x, "spherical_bessel_j");

        VectorX<Scalar> j(l_max + 1);
        const Scalar s = std::sin(x), c = std::cos(x);
        const Scalar j0 = s / x;
        const Scalar j1 = s / (x * x) - c / x;

        if (Scalar(l_max) <= x)
        {
            j(0) = j0;
            if (l_max >= 1)
                j(1) = j1;
            for (int l = 1; l < l_max; ++l)
                j(l + 1) = Scalar(2 * l + 1) / x * j(l) - j(l - 1);
            return j;
        }

        const Scalar top = std::max(Scalar(l_max), x);
        const int start = static_cast<int>(std::ceil(top + Scalar(30) + Scalar(2) * std::sqrt(top)));
        const Scalar big = Scalar(1e200);

        Scalar f_up = Scalar(0);       // f_{l+1}
        Scalar f = Scalar(1e-300);     // f_l, arbitrary seed
        j.setZero();
        for (int l = start; l >= 1; --l)
        {
            const Scalar f_down = Scalar(2 * l + 1) / x * f - f_up; // f_{l-1}
            f_up = f;
            f = f_down;
            if (l - 1 <= l_max)
                j(l - 1) = f;
            if (l <= l_max)
                j(l) = f_up;
            if (std::abs(f) > big)
            {
                f /= big;
                f_up /= big;
                const int lo = std::max(l - 1, 0);
                if (lo <= l_max)
                    j.segment(lo, l_max + 1 - lo) /= big;
            }
        }
        // f = j_0 up to scale; f_up = j_1 up to scale.
        const Scalar scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f : j1 / f_up;
        j *= scale;
        return j;
    }

    /// Spherical Bessel functions of the second kind y_0(x) .. y_lmax(x).
    template <typename Scalar>
    VectorX<Scalar> spherical_neumann_y(int l_max, Scalar x)
    {
        if (l_max < 0)
            throw std::invalid_argument("spherical_neumann_y: l_max must be non-negative");
        detail::require_positive_argument(x, "spherical_neumann_y");

        VectorX<Scalar> y(l_max + 1);
        const Scalar s = std::sin(x), c = std::cos(x);
        y(0) = -c / x;
        if (l_max >= 1)
            y(1) = -c / (x * x) - s / x;
        for (int l = 1; l < l_max; ++l)
        {
            y(l + 1) = Scalar(2 * l + 1) / x * y(l) - y(l - 1);
            if (!std::isfinite(y(l + 1)))
                throw std::range_error("spherical_neumann_y: overflow at order " + std::to_string(l + 1));
        }
        return y;
    }

    /// Spherical Hankel functions h_l(x) = j_l(x) - i y_l(x).
    ///
    /// This is the sign convention paired with the exp(-jkR) time-harmonic
    /// phase used throughout the library (standard second-kind Hankel).
    template <typename Scalar>
    ComplexVectorX<Scalar> spherical_hankel(int l_max, Scalar x)
    {
        const VectorX<Scalar> j = spherical_bessel_j(l_max, x);
        const VectorX<Scalar> y = spherical_neumann_y(l_max, x);
        ComplexVectorX<Scalar> h(l_max + 1);
        for (int l = 0; l <= l_max; ++l)
            h(l) = std::complex<Scalar>(j(l), -y(l));
        return h;
    }

} // namespace emcap

#endif
