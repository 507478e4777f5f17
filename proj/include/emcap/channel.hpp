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

#ifndef EMCAP_CHANNEL_HPP
#define EMCAP_CHANNEL_HPP

#include "emcap/geometry.hpp"
#include "emcap/greens.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace emcap
{

    template <typename Scalar>
    using ComplexMatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

    inline constexpr double free_space_impedance = 376.730; // ohms

    // With lengths in wavelengths, omega * mu = k * eta.
    template <typename Scalar>
    Scalar omega_mu(Scalar k)
    {
        return k * Scalar(free_space_impedance);
    }

    // -k omega mu / (16 pi^2)
    template <typename Scalar>
    Scalar kernel_prefactor(Scalar k)
    {
        const Scalar pi = std::numbers::pi_v<Scalar>;
        return -k * omega_mu(k) / (Scalar(16) * pi * pi);
    }

    /// Scalar channel kernel H(r, s) through the plane-wave expansion on `grid`.
    template <typename Scalar>
    std::complex<Scalar> kernel_h_point(const Vector3<Scalar> &r, const Vector3<Scalar> &s,
                                        const LinkGeometryT<Scalar> &geometry, const DirectionGridT<Scalar> &grid,
                                        const TranslatorTableT<Scalar> &table)
    {
        detail::check_table(grid, table);
        const Scalar k = geometry.k;
        const Vector3<Scalar> r_qs = geometry.transmitter.center - s;
        const Vector3<Scalar> r_rp = r - geometry.receiver.center;
        std::complex<Scalar> acc(0);
        for (Eigen::Index i = 0; i < grid.size(); ++i)
        {
            const auto kh = grid.directions.col(i);
            acc += grid.weights(i) * std::polar(Scalar(1), -k * kh.dot(r_qs)) * table.values(i) *
                   std::polar(Scalar(1), -k * kh.dot(r_rp));
        }
        return kernel_prefactor(k) * acc;
    }

    /// Dense H sampled on (receiver points x source points).
    template <typename Scalar>
    struct KernelMatrixT
    {
        ComplexMatrixX<Scalar> entries;
        SurfaceGridT<Scalar> src;
        SurfaceGridT<Scalar> rcv;
        int L = 0;
        bool windowed = false;
        Scalar theta_e = Scalar(0);
        Eigen::Index n_directions = 0;

        Eigen::Index rows() const { return entries.rows(); }
        Eigen::Index cols() const { return entries.cols(); }
    };
    using KernelMatrix = KernelMatrixT<double>;

    inline constexpr std::int64_t default_entry_budget = 10'000'000;

    namespace detail
    {
        inline void check_budget(Eigen::Index rows, Eigen::Index cols, std::int64_t budget)
        {
            const std::int64_t n = static_cast<std::int64_t>(rows) * static_cast<std::int64_t>(cols);
            if (n > budget)
                throw std::length_error("kernel matrix of " + std::to_string(n) + " entries exceeds the budget of " +
                                        std::to_string(budget));
        }

        // exp(-jk k^ . (sign * (x - center))) for one block of directions: (block x points)
        template <typename Scalar>
        ComplexMatrixX<Scalar> plane_wave_block(const Points3<Scalar> &dirs, Eigen::Index first, Eigen::Index count,
                                                const Points3<Scalar> &pts, const Vector3<Scalar> &center,
                                                Scalar sign, Scalar k)
        {
            const Points3<Scalar> rel = (pts.colwise() - center) * sign;
            const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> phase =
                -k * (dirs.middleCols(first, count).transpose() * rel);
            ComplexMatrixX<Scalar> out(phase.rows(), phase.cols());
            for (Eigen::Index j = 0; j < phase.cols(); ++j)
                for (Eigen::Index i = 0; i < phase.rows(); ++i)
                    out(i, j) = std::polar(Scalar(1), phase(i, j));
            return out;
        }
    }

    /// H = B^T diag(alpha w) A, accumulated over blocks of directions, where
    /// A aggregates from the source center and B disaggregates at the receiver.
    template <typename Scalar>
    KernelMatrixT<Scalar> kernel_matrix(const SurfaceGridT<Scalar> &src, const SurfaceGridT<Scalar> &rcv,
                                        const LinkGeometryT<Scalar> &geometry, const DirectionGridT<Scalar> &grid,
                                        const TranslatorTableT<Scalar> &table,
                                        std::int64_t entry_budget = default_entry_budget)
    {
        detail::check_table(grid, table);
        detail::check_budget(rcv.size(), src.size(), entry_budget);

        KernelMatrixT<Scalar> km;
        km.src = src;
        km.rcv = rcv;
        km.L = table.L;
        km.windowed = table.windowed;
        km.theta_e = grid.theta_e;
        km.n_directions = grid.size();
        km.entries = ComplexMatrixX<Scalar>::Zero(rcv.size(), src.size());

        constexpr Eigen::Index block = 512;
        const ComplexVectorX<Scalar> aw = table.values.cwiseProduct(grid.weights.template cast<std::complex<Scalar>>());
        for (Eigen::Index first = 0; first < grid.size(); first += block)
        {
            const Eigen::Index count = std::min(block, grid.size() - first);
            // r_qs = q - s  ->  sign -1 on (s - q)
            const ComplexMatrixX<Scalar> A = detail::plane_wave_block(grid.directions, first, count, src.points,
                                                                      geometry.transmitter.center, Scalar(-1),
                                                                      geometry.k);
            const ComplexMatrixX<Scalar> B = detail::plane_wave_block(grid.directions, first, count, rcv.points,
                                                                      geometry.receiver.center, Scalar(1), geometry.k);
            km.entries.noalias() += B.transpose() * (aw.segment(first, count).asDiagonal() * A);
        }
        km.entries *= kernel_prefactor(geometry.k);
        return km;
    }

    /// Entry-by-entry evaluation via kernel_h_point. Test oracle for kernel_matrix.
    template <typename Scalar>
    ComplexMatrixX<Scalar> kernel_matrix_entrywise(const SurfaceGridT<Scalar> &src, const SurfaceGridT<Scalar> &rcv,
                                                   const LinkGeometryT<Scalar> &geometry,
                                                   const DirectionGridT<Scalar> &grid,
                                                   const TranslatorTableT<Scalar> &table)
    {
        ComplexMatrixX<Scalar> H(rcv.size(), src.size());
        for (Eigen::Index i = 0; i < rcv.size(); ++i)
            for (Eigen::Index j = 0; j < src.size(); ++j)
                H(i, j) = kernel_h_point<Scalar>(rcv.points.col(i), src.points.col(j), geometry, grid, table);
        return H;
    }

    /// Field on the receiver grid through aggregation, translation and
    /// disaggregation.
    template <typename Scalar>
    ComplexVectorX<Scalar> propagate_current(const ComplexVectorX<Scalar> &current, const SurfaceGridT<Scalar> &src,
                                             const SurfaceGridT<Scalar> &rcv, const LinkGeometryT<Scalar> &geometry,
                                             const DirectionGridT<Scalar> &grid,
                                             const TranslatorTableT<Scalar> &table)
    {
        using C = std::complex<Scalar>;
        detail::check_table(grid, table);
        if (current.size() != src.size())
            throw std::invalid_argument("propagate_current: current length does not match the source grid");

        const ComplexVectorX<Scalar> weighted = current.cwiseProduct(src.weights.template cast<C>());
        ComplexVectorX<Scalar> field = ComplexVectorX<Scalar>::Zero(rcv.size());
        constexpr Eigen::Index block = 512;
        for (Eigen::Index first = 0; first < grid.size(); first += block)
        {
            const Eigen::Index count = std::min(block, grid.size() - first);
            const ComplexMatrixX<Scalar> A = detail::plane_wave_block(grid.directions, first, count, src.points,
                                                                      geometry.transmitter.center, Scalar(-1),
                                                                      geometry.k);
            // aggregate
            ComplexVectorX<Scalar> spectrum = A * weighted;
            // translate
            spectrum.array() *= table.values.segment(first, count).array() *
                                grid.weights.segment(first, count).template cast<C>().array();
            // disaggregate
            const ComplexMatrixX<Scalar> B = detail::plane_wave_block(grid.directions, first, count, rcv.points,
                                                                      geometry.receiver.center, Scalar(1), geometry.k);
            field.noalias() += B.transpose() * spectrum;
        }
        return field * kernel_prefactor(geometry.k);
    }

    /// Direct quadrature of the radiation integral with the exact scalar
    /// Green's function.
    template <typename Scalar>
    ComplexVectorX<Scalar> reference_field(const ComplexVectorX<Scalar> &current, const SurfaceGridT<Scalar> &src,
                                           const SurfaceGridT<Scalar> &rcv, Scalar k)
    {
        using C = std::complex<Scalar>;
        if (current.size() != src.size())
            throw std::invalid_argument("reference_field: current length does not match the source grid");
        const C coef(0, -omega_mu(k));
        ComplexVectorX<Scalar> field(rcv.size());
        for (Eigen::Index i = 0; i < rcv.size(); ++i)
        {
            C acc(0);
            for (Eigen::Index j = 0; j < src.size(); ++j)
                acc += src.weights(j) * sgf_exact<Scalar>(rcv.points.col(i), src.points.col(j), k) * current(j);
            field(i) = coef * acc;
        }
        return field;
    }

    /// Dense version of reference_field's operator, -j omega mu g(r_i, s_j).
    template <typename Scalar>
    ComplexMatrixX<Scalar> reference_kernel(const SurfaceGridT<Scalar> &src, const SurfaceGridT<Scalar> &rcv, Scalar k)
    {
        const std::complex<Scalar> coef(0, -omega_mu(k));
        ComplexMatrixX<Scalar> H(rcv.size(), src.size());
        for (Eigen::Index j = 0; j < src.size(); ++j)
            for (Eigen::Index i = 0; i < rcv.size(); ++i)
                H(i, j) = coef * sgf_exact<Scalar>(rcv.points.col(i), src.points.col(j), k);
        return H;
    }

} // namespace emcap

#endif
