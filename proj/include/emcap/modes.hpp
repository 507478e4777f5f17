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

#ifndef EMCAP_MODES_HPP
#define EMCAP_MODES_HPP

#include "emcap/channel.hpp"
#include "emcap/geometry.hpp"
#include "emcap/greens.hpp"
#include "emcap/specfun.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emcap
{

    template <typename Scalar>
    using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    /// (m, n) order pairs grouped by total order j = m + n, m ascending within a group.
    struct BasisIndexTable
    {
        std::vector<std::pair<int, int>> orders;
        int max_total_order = 0;

        std::size_t size() const { return orders.size(); }
    };

    inline BasisIndexTable basis_order_table(int t)
    {
        if (t < 0)
            throw std::invalid_argument("basis_order_table: t must be non-negative");
        BasisIndexTable table;
        table.max_total_order = t;
        table.orders.reserve(static_cast<std::size_t>((t + 1) * (t + 2) / 2));
        for (int j = 0; j <= t; ++j)
            for (int m = 0; m <= j; ++m)
                table.orders.emplace_back(m, j - m);
        return table;
    }

    /// Orthonormal 2-D Legendre functions sampled on a grid: (points x basis).
    template <typename Scalar>
    MatrixX<Scalar> basis_eval(const ApertureT<Scalar> &a, const BasisIndexTable &table,
                               const Points3<Scalar> &points)
    {
        const int t = table.max_total_order;
        const Eigen::Index np = points.cols();
        const Scalar lx = a.side_x, ly = a.side_y;
        MatrixX<Scalar> E(np, static_cast<Eigen::Index>(table.size()));
        for (Eigen::Index p = 0; p < np; ++p)
        {
            const Vector3<Scalar> pt = points.col(p);
            if (!a.contains(pt))
                throw std::invalid_argument("basis_eval: grid point lies outside the aperture");
            const auto uv = a.local(pt);
            const Scalar xs = std::clamp(Scalar(2) * uv(0) / lx, Scalar(-1), Scalar(1));
            const Scalar ys = std::clamp(Scalar(2) * uv(1) / ly, Scalar(-1), Scalar(1));
            const VectorX<Scalar> px = legendre_sequence(t, xs);
            const VectorX<Scalar> py = legendre_sequence(t, ys);
            for (std::size_t i = 0; i < table.size(); ++i)
            {
                const auto [m, n] = table.orders[i];
                E(p, static_cast<Eigen::Index>(i)) =
                    std::sqrt(Scalar((2 * m + 1) * (2 * n + 1)) / (lx * ly)) * px(m) * py(n);
            }
        }
        return E;
    }

    template <typename Scalar>
    MatrixX<Scalar> basis_eval(const ApertureT<Scalar> &a, const BasisIndexTable &table,
                               const SurfaceGridT<Scalar> &grid)
    {
        return basis_eval(a, table, grid.points);
    }

    /// Hermitian Galerkin matrix of the power-coupling operator.
    template <typename Scalar>
    struct GalerkinMatrixT
    {
        ComplexMatrixX<Scalar> B;

        // max |B - B^H| / max |B|
        Scalar hermitian_residual() const
        {
            const Scalar scale = B.cwiseAbs().maxCoeff();
            if (scale == Scalar(0))
                return Scalar(0);
            return (B - B.adjoint()).cwiseAbs().maxCoeff() / scale;
        }
    };
    using GalerkinMatrix = GalerkinMatrixT<double>;

    /// B = (H W_s E)^H W_r (H W_s E).
    template <typename Scalar>
    GalerkinMatrixT<Scalar> assemble_galerkin(const ComplexMatrixX<Scalar> &H, const MatrixX<Scalar> &E_src,
                                              const VectorX<Scalar> &w_src, const VectorX<Scalar> &w_rcv)
    {
        using C = std::complex<Scalar>;
        if (H.cols() != E_src.rows() || w_src.size() != H.cols() || w_rcv.size() != H.rows())
            throw std::invalid_argument("assemble_galerkin: dimension mismatch");
        const ComplexMatrixX<Scalar> WE = (w_src.asDiagonal() * E_src).template cast<C>();
        ComplexMatrixX<Scalar> G = H * WE;
        G = w_rcv.cwiseSqrt().template cast<C>().asDiagonal() * G;
        GalerkinMatrixT<Scalar> out;
        out.B = G.adjoint() * G;
        return out;
    }

    template <typename Scalar>
    GalerkinMatrixT<Scalar> assemble_galerkin(const KernelMatrixT<Scalar> &H, const MatrixX<Scalar> &E_src)
    {
        return assemble_galerkin(H.entries, E_src, H.src.weights, H.rcv.weights);
    }

    template <typename Scalar>
    struct HermitianEigT
    {
        VectorX<Scalar> eigenvalues;         // descending, clamped at 0
        ComplexMatrixX<Scalar> eigenvectors; // columns, orthonormal
        int clamped = 0;                     // roundoff-negative eigenvalues set to 0
        Scalar max_residual = Scalar(0);     // max_n |B v - beta v| / beta_1
    };
    using HermitianEig = HermitianEigT<double>;

    /// Descending eigenpairs. Each eigenvector is rotated so its
    /// largest-magnitude coefficient is real and positive.
    template <typename Scalar>
    HermitianEigT<Scalar> hermitian_eig(const GalerkinMatrixT<Scalar> &gm, Scalar tol = Scalar(1e-8))
    {
        using C = std::complex<Scalar>;
        const Eigen::Index n = gm.B.rows();
        if (gm.B.cols() != n)
            throw std::invalid_argument("hermitian_eig: matrix is not square");
        if (gm.hermitian_residual() > tol)
            throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within tolerance");

        const ComplexMatrixX<Scalar> Bh = (gm.B + gm.B.adjoint()) * Scalar(0.5);
        Eigen::SelfAdjointEigenSolver<ComplexMatrixX<Scalar>> solver(Bh);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("hermitian_eig: eigensolver did not converge");

        HermitianEigT<Scalar> out;
        out.eigenvalues.resize(n);
        out.eigenvectors.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
            out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
        }

        const Scalar top = n > 0 ? std::max(out.eigenvalues(0), Scalar(0)) : Scalar(0);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            Eigen::Index imax = 0;
            out.eigenvectors.col(i).cwiseAbs().maxCoeff(&imax);
            const C pivot = out.eigenvectors(imax, i);
            if (std::abs(pivot) > Scalar(0))
            {
                out.eigenvectors.col(i) *= std::conj(pivot) / std::abs(pivot);
                out.eigenvectors(imax, i) = C(std::abs(pivot), Scalar(0));
            }

            if (top > Scalar(0))
            {
                const Scalar res = (Bh * out.eigenvectors.col(i) - out.eigenvalues(i) * out.eigenvectors.col(i)).norm();
                out.max_residual = std::max(out.max_residual, res / top);
            }
            if (out.eigenvalues(i) < Scalar(0))
            {
                out.eigenvalues(i) = Scalar(0);
                ++out.clamped;
            }
        }
        return out;
    }

    /// Eigenvalues and Galerkin coefficients of the mode currents.
    template <typename Scalar>
    struct ModeSetT
    {
        VectorX<Scalar> eigenvalues;            // raw beta_n, descending
        VectorX<Scalar> normalized;             // beta_n / beta_1
        ComplexMatrixX<Scalar> coefficients;    // (mode x basis), orthonormal rows
        Scalar scale = Scalar(1);               // sqrt(P_t / eta)
        Scalar power = Scalar(1);               // P_t [W]
        Scalar eta = Scalar(free_space_impedance);
        ApertureT<Scalar> transmitter;
        BasisIndexTable basis;
        int clamped = 0;

        Eigen::Index count() const { return eigenvalues.size(); }
    };
    using ModeSet = ModeSetT<double>;

    template <typename Scalar>
    ModeSetT<Scalar> build_mode_set(const HermitianEigT<Scalar> &eig, Scalar power, Scalar eta,
                                    const ApertureT<Scalar> &transmitter, const BasisIndexTable &basis)
    {
        if (!(power > Scalar(0)) || !(eta > Scalar(0)))
            throw std::invalid_argument("build_mode_set: power and impedance must be positive");
        if (static_cast<std::size_t>(eig.eigenvectors.rows()) != basis.size())
            throw std::invalid_argument("build_mode_set: eigenvector length does not match the basis");
        ModeSetT<Scalar> ms;
        ms.eigenvalues = eig.eigenvalues;
        ms.normalized = eig.eigenvalues;
        if (ms.eigenvalues.size() > 0 && ms.eigenvalues(0) > Scalar(0))
            ms.normalized /= ms.eigenvalues(0);
        ms.coefficients = eig.eigenvectors.transpose();
        ms.scale = std::sqrt(power / eta);
        ms.power = power;
        ms.eta = eta;
        ms.transmitter = transmitter;
        ms.basis = basis;
        ms.clamped = eig.clamped;
        return ms;
    }

    namespace detail
    {
        template <typename Scalar>
        void check_mode_count(const ModeSetT<Scalar> &modes, Eigen::Index count, const char *who)
        {
            if (count < 0 || count > modes.count())
                throw std::out_of_range(std::string(who) + ": mode index out of range");
        }
    }

    /// Scaled mode currents phi_0..phi_{count-1} at the given points: (points x count).
    template <typename Scalar>
    ComplexMatrixX<Scalar> mode_currents(const ModeSetT<Scalar> &modes, Eigen::Index count,
                                         const Points3<Scalar> &points)
    {
        using C = std::complex<Scalar>;
        detail::check_mode_count(modes, count, "mode_currents");
        const MatrixX<Scalar> E = basis_eval(modes.transmitter, modes.basis, points);
        return E.template cast<C>() * modes.coefficients.topRows(count).transpose() * C(modes.scale);
    }

    template <typename Scalar>
    ComplexVectorX<Scalar> mode_current_field(const ModeSetT<Scalar> &modes, Eigen::Index n,
                                              const SurfaceGridT<Scalar> &src)
    {
        detail::check_mode_count(modes, n + 1, "mode_current_field");
        const ComplexMatrixX<Scalar> phi = mode_currents(modes, n + 1, src.points);
        return phi.col(n);
    }

    /// psi = sum_s w_s H(r, s) phi(s) for the first `count` modes: (receiver points x count).
    template <typename Scalar>
    ComplexMatrixX<Scalar> received_fields(const ModeSetT<Scalar> &modes, Eigen::Index count,
                                           const KernelMatrixT<Scalar> &H)
    {
        using C = std::complex<Scalar>;
        const ComplexMatrixX<Scalar> phi = mode_currents(modes, count, H.src.points);
        return H.entries * (H.src.weights.template cast<C>().asDiagonal() * phi);
    }

    template <typename Scalar>
    ComplexVectorX<Scalar> received_field(const ModeSetT<Scalar> &modes, Eigen::Index n, const KernelMatrixT<Scalar> &H)
    {
        detail::check_mode_count(modes, n + 1, "received_field");
        return received_fields(modes, n + 1, H).col(n);
    }

    /// chi_n = psi_n / sqrt(beta_n).
    template <typename Scalar>
    ComplexVectorX<Scalar> combiner(const ModeSetT<Scalar> &modes, Eigen::Index n, const KernelMatrixT<Scalar> &H)
    {
        detail::check_mode_count(modes, n + 1, "combiner");
        const Scalar beta = modes.eigenvalues(n);
        if (!(beta > Scalar(1e-12) * modes.eigenvalues(0)))
            throw std::domain_error("combiner: mode " + std::to_string(n) + " is numerically null");
        return received_field(modes, n, H) / std::sqrt(beta);
    }

    // G(m, n) = sum_p w_p f_m(p) conj(f_n(p))
    template <typename Scalar>
    ComplexMatrixX<Scalar> weighted_gram(const ComplexMatrixX<Scalar> &F, const VectorX<Scalar> &w)
    {
        using C = std::complex<Scalar>;
        return F.transpose() * w.template cast<C>().asDiagonal() * F.conjugate();
    }

    /// Current Gram matrix on a grid that integrates basis products exactly.
    template <typename Scalar>
    ComplexMatrixX<Scalar> gram_currents(const ModeSetT<Scalar> &modes, Eigen::Index count)
    {
        detail::check_mode_count(modes, count, "gram_currents");
        const int n = modes.basis.max_total_order + 1;
        const auto grid = tensor_grid(modes.transmitter, n * n);
        return weighted_gram<Scalar>(mode_currents(modes, count, grid.points), grid.weights);
    }

    /// Received-field Gram matrix over the receiver grid of H.
    template <typename Scalar>
    ComplexMatrixX<Scalar> gram_fields(const ModeSetT<Scalar> &modes, Eigen::Index count, const KernelMatrixT<Scalar> &H)
    {
        detail::check_mode_count(modes, count, "gram_fields");
        return weighted_gram<Scalar>(received_fields(modes, count, H), H.rcv.weights);
    }

    /// max |off-diagonal| / max |diagonal|
    template <typename Scalar>
    Scalar off_diagonal_leakage(const ComplexMatrixX<Scalar> &G)
    {
        Scalar diag = 0, off = 0;
        for (Eigen::Index i = 0; i < G.rows(); ++i)
            for (Eigen::Index j = 0; j < G.cols(); ++j)
            {
                if (i == j)
                    diag = std::max(diag, std::abs(G(i, j)));
                else
                    off = std::max(off, std::abs(G(i, j)));
            }
        return diag > 0 ? off / diag : Scalar(0);
    }

    // ------------------------------------------------------------------
    // End-to-end solve of the mode problem for one link.

    struct SolverSettings
    {
        double theta_e = 60.0 * std::numbers::pi / 180.0; // radians
        int L = 0;                                        // 0: derive from geometry
        bool windowed = true;
        int n_theta = 0; // 0: default_n_theta
        int n_phi = 0;   // 0: default_n_phi
        int tx_points = 512;
        int rx_points = 512;
        int basis_order = 36;
        double power = 1.0;
        std::int64_t entry_budget = default_entry_budget;
    };

    template <typename Scalar>
    struct ModeSolutionT
    {
        LinkGeometryT<Scalar> geometry;
        SurfaceGridT<Scalar> src;
        SurfaceGridT<Scalar> rcv;
        DirectionGridT<Scalar> directions;
        TranslatorTableT<Scalar> translator;
        KernelMatrixT<Scalar> kernel;
        MatrixX<Scalar> basis_matrix;
        GalerkinMatrixT<Scalar> galerkin;
        HermitianEigT<Scalar> eig;
        ModeSetT<Scalar> modes;
    };
    using ModeSolution = ModeSolutionT<double>;

    template <typename Scalar>
    ModeSolutionT<Scalar> solve_link_modes(const LinkGeometryT<Scalar> &geometry, const SolverSettings &opt)
    {
        ModeSolutionT<Scalar> sol;
        sol.geometry = geometry;
        const int L = opt.L > 0 ? opt.L : geometry.default_truncation();
        const int nt = opt.n_theta > 0 ? opt.n_theta : default_n_theta(L, opt.theta_e);
        const int np = opt.n_phi > 0 ? opt.n_phi : default_n_phi(L);
        sol.src = tensor_grid(geometry.transmitter, opt.tx_points);
        sol.rcv = tensor_grid(geometry.receiver, opt.rx_points);
        sol.directions = cap_direction_grid<Scalar>(geometry.r_pq(), Scalar(opt.theta_e), nt, np);
        sol.translator = translator_table(sol.directions, geometry.k, geometry.r_pq(), L, opt.windowed);
        sol.kernel = kernel_matrix(sol.src, sol.rcv, geometry, sol.directions, sol.translator, opt.entry_budget);
        const BasisIndexTable table = basis_order_table(opt.basis_order);
        sol.basis_matrix = basis_eval(geometry.transmitter, table, sol.src);
        sol.galerkin = assemble_galerkin(sol.kernel, sol.basis_matrix);
        sol.eig = hermitian_eig(sol.galerkin);
        sol.modes = build_mode_set(sol.eig, Scalar(opt.power), Scalar(free_space_impedance), geometry.transmitter, table);
        return sol;
    }

} // namespace emcap

#endif
