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

#ifndef EMCAP_GEOMETRY_HPP
#define EMCAP_GEOMETRY_HPP

#include "emcap/specfun.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace emcap
{

    template <typename Scalar>
    using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

    // Points are stored column-wise: 3 x N.
    template <typename Scalar>
    using Points3 = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

    /// Planar rectangular aperture. Lengths are in wavelengths.
    template <typename Scalar>
    struct ApertureT
    {
        Vector3<Scalar> center = Vector3<Scalar>::Zero();
        Scalar side_x = Scalar(1);
        Scalar side_y = Scalar(1);
        Vector3<Scalar> normal = Vector3<Scalar>::UnitZ();

        Scalar area() const { return side_x * side_y; }
        Scalar diagonal() const { return std::hypot(side_x, side_y); }
        Scalar half_diagonal() const { return diagonal() / Scalar(2); }

        // In-plane unit axes (u along side_x, v along side_y).
        Vector3<Scalar> u_axis() const
        {
            if (std::abs(normal.z() - Scalar(1)) < Scalar(1e-12))
                return Vector3<Scalar>::UnitX();
            const Vector3<Scalar> ref = std::abs(normal.x()) < Scalar(0.9) ? Vector3<Scalar>::UnitX()
                                                                           : Vector3<Scalar>::UnitY();
            return (ref - normal * normal.dot(ref)).normalized();
        }
        Vector3<Scalar> v_axis() const { return normal.cross(u_axis()); }

        // Local (u, v) coordinates of a point relative to the center.
        Eigen::Matrix<Scalar, 2, 1> local(const Vector3<Scalar> &p) const
        {
            const Vector3<Scalar> d = p - center;
            return {d.dot(u_axis()), d.dot(v_axis())};
        }

        bool contains(const Vector3<Scalar> &p, Scalar tol = Scalar(1e-9)) const
        {
            const Vector3<Scalar> d = p - center;
            if (std::abs(d.dot(normal)) > tol * std::max(Scalar(1), diagonal()))
                return false;
            const auto uv = local(p);
            return std::abs(uv(0)) <= side_x / Scalar(2) * (Scalar(1) + tol) &&
                   std::abs(uv(1)) <= side_y / Scalar(2) * (Scalar(1) + tol);
        }
    };
    using Aperture = ApertureT<double>;

    template <typename Scalar>
    ApertureT<Scalar> rect_aperture(const Vector3<Scalar> &center, Scalar side_x, Scalar side_y)
    {
        if (!(side_x > Scalar(0)) || !(side_y > Scalar(0)))
            throw std::invalid_argument("rect_aperture: side lengths must be positive");
        ApertureT<Scalar> a;
        a.center = center;
        a.side_x = side_x;
        a.side_y = side_y;
        a.normal = Vector3<Scalar>::UnitZ();
        return a;
    }

    /// Quadrature points on an aperture with area weights.
    template <typename Scalar>
    struct SurfaceGridT
    {
        Points3<Scalar> points;
        VectorX<Scalar> weights;
        ApertureT<Scalar> aperture;
        int per_axis = 0;

        Eigen::Index size() const { return weights.size(); }
    };
    using SurfaceGrid = SurfaceGridT<double>;

    /// Tensor product of two ceil(sqrt(n_total))-point Gauss-Legendre rules.
    template <typename Scalar>
    SurfaceGridT<Scalar> tensor_grid(const ApertureT<Scalar> &a, int n_total)
    {
        if (n_total < 1)
            throw std::invalid_argument("tensor_grid: n_total must be >= 1");
        int n = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_total))));
        while (n * n < n_total)
            ++n;
        while (n > 1 && (n - 1) * (n - 1) >= n_total)
            --n;
        const auto rule = gauss_legendre_rule<Scalar>(n);
        const Vector3<Scalar> u = a.u_axis(), v = a.v_axis();

        SurfaceGridT<Scalar> g;
        g.aperture = a;
        g.per_axis = n;
        g.points.resize(3, n * n);
        g.weights.resize(n * n);
        const Scalar jac = a.side_x * a.side_y / Scalar(4);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
            {
                const int idx = i * n + j;
                g.points.col(idx) = a.center + u * (rule.nodes(i) * a.side_x / Scalar(2)) +
                                    v * (rule.nodes(j) * a.side_y / Scalar(2));
                g.weights(idx) = rule.weights(i) * rule.weights(j) * jac;
            }
        return g;
    }

    /// Unit wavevector samples on a spherical cap {angle to axis <= theta_e}.
    template <typename Scalar>
    struct DirectionGridT
    {
        Points3<Scalar> directions;
        VectorX<Scalar> weights; // steradians
        Vector3<Scalar> axis = Vector3<Scalar>::UnitZ();
        Scalar theta_e = std::numbers::pi_v<Scalar>;
        int n_theta = 0;
        int n_phi = 0;

        Eigen::Index size() const { return weights.size(); }
    };
    using DirectionGrid = DirectionGridT<double>;

    // Orthonormal frame (e1, e2, axis).
    template <typename Scalar>
    Eigen::Matrix<Scalar, 3, 3> frame_around(const Vector3<Scalar> &axis)
    {
        const Vector3<Scalar> z = axis.normalized();
        Vector3<Scalar> e1;
        if (std::abs(z.z() - Scalar(1)) < Scalar(1e-15))
            e1 = Vector3<Scalar>::UnitX();
        else
        {
            const Vector3<Scalar> ref = std::abs(z.x()) < Scalar(0.9) ? Vector3<Scalar>::UnitX()
                                                                      : Vector3<Scalar>::UnitY();
            e1 = (ref - z * z.dot(ref)).normalized();
        }
        Eigen::Matrix<Scalar, 3, 3> f;
        f.col(0) = e1;
        f.col(1) = z.cross(e1);
        f.col(2) = z;
        return f;
    }

    /// Gauss-Legendre in u = cos(theta) on [cos theta_e, 1] times a uniform
    /// phi rule, rotated so the cap is centred on `axis`.
    template <typename Scalar>
    DirectionGridT<Scalar> cap_direction_grid(const Vector3<Scalar> &axis, Scalar theta_e, int n_theta, int n_phi)
    {
        const Scalar pi = std::numbers::pi_v<Scalar>;
        if (!(theta_e > Scalar(0)) || theta_e > pi * (Scalar(1) + Scalar(1e-12)))
            throw std::invalid_argument("cap_direction_grid: theta_e must lie in (0, pi]");
        if (n_theta < 1 || n_phi < 1)
            throw std::invalid_argument("cap_direction_grid: grid sizes must be >= 1");
        if (!(axis.norm() > Scalar(0)))
            throw std::invalid_argument("cap_direction_grid: zero axis");
        theta_e = std::min(theta_e, pi);

        const auto rule = gauss_legendre_rule<Scalar>(n_theta);
        const Scalar c = std::cos(theta_e);
        const Scalar half = (Scalar(1) - c) / Scalar(2);
        const Scalar dphi = Scalar(2) * pi / Scalar(n_phi);
        const auto f = frame_around(axis);

        DirectionGridT<Scalar> g;
        g.axis = axis.normalized();
        g.theta_e = theta_e;
        g.n_theta = n_theta;
        g.n_phi = n_phi;
        g.directions.resize(3, n_theta * n_phi);
        g.weights.resize(n_theta * n_phi);
        for (int i = 0; i < n_theta; ++i)
        {
            const Scalar uu = c + (rule.nodes(i) + Scalar(1)) * half;
            const Scalar st = std::sqrt(std::max(Scalar(0), Scalar(1) - uu * uu));
            const Scalar w = rule.weights(i) * half * dphi;
            for (int j = 0; j < n_phi; ++j)
            {
                const Scalar phi = dphi * Scalar(j);
                const Vector3<Scalar> local(st * std::cos(phi), st * std::sin(phi), uu);
                const int idx = i * n_phi + j;
                g.directions.col(idx) = f * local;
                g.weights(idx) = w;
            }
        }
        return g;
    }

    /// Default cap densities: n_phi = 2L, n_theta = max(8, min(L, ceil(2 L theta_e / pi))).
    inline int default_n_theta(int L, double theta_e)
    {
        const int dense = static_cast<int>(std::ceil(2.0 * L * theta_e / std::numbers::pi));
        return std::max(8, std::min(std::max(L, 1), dense));
    }
    inline int default_n_phi(int L) { return std::max(8, 2 * L); }

    /// Series truncation L = ceil(kD + 2.9 (kD)^(1/3)).
    template <typename Scalar>
    int truncation_order(Scalar k, Scalar D)
    {
        if (!(k > Scalar(0)) || !(D > Scalar(0)))
            throw std::invalid_argument("truncation_order: k and D must be positive");
        const Scalar kd = k * D;
        return static_cast<int>(std::ceil(kd + Scalar(2.9) * std::cbrt(kd)));
    }

    /// Transmitter/receiver pair with wavenumber.
    template <typename Scalar>
    struct LinkGeometryT
    {
        ApertureT<Scalar> transmitter;
        ApertureT<Scalar> receiver;
        Scalar k = Scalar(2) * std::numbers::pi_v<Scalar>;

        Vector3<Scalar> r_pq() const { return receiver.center - transmitter.center; }
        Scalar distance() const { return r_pq().norm(); }
        // Largest |r_rp + r_qs| the expansion must cover.
        Scalar translator_span() const { return transmitter.half_diagonal() + receiver.half_diagonal(); }
        int default_truncation() const { return truncation_order(k, translator_span()); }
    };
    using LinkGeometry = LinkGeometryT<double>;

    template <typename Scalar>
    LinkGeometryT<Scalar> make_link(const ApertureT<Scalar> &tx, const ApertureT<Scalar> &rx,
                                    Scalar k = Scalar(2) * std::numbers::pi_v<Scalar>)
    {
        if (!(k > Scalar(0)))
            throw std::invalid_argument("make_link: wavenumber must be positive");
        LinkGeometryT<Scalar> g{tx, rx, k};
        if (g.distance() < g.translator_span())
            throw std::invalid_argument("make_link: center separation " + std::to_string(g.distance()) +
                                        " is below the addition-theorem bound " +
                                        std::to_string(g.translator_span()));
        return g;
    }

} // namespace emcap

#endif
