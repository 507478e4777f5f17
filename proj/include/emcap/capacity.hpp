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

#ifndef EMCAP_CAPACITY_HPP
#define EMCAP_CAPACITY_HPP

#include "emcap/specfun.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace emcap
{

    /// Descending coupling strengths. `raw` is kept as computed, `normalized` has beta_1 = 1.
    template <typename Scalar>
    struct EigenSpectrumT
    {
        VectorX<Scalar> raw;
        VectorX<Scalar> normalized;

        Eigen::Index size() const { return raw.size(); }
    };
    using EigenSpectrum = EigenSpectrumT<double>;

    template <typename Scalar>
    EigenSpectrumT<Scalar> make_spectrum(const VectorX<Scalar> &betas)
    {
        EigenSpectrumT<Scalar> s;
        s.raw = betas.cwiseMax(Scalar(0));
        for (Eigen::Index i = 1; i < s.raw.size(); ++i)
            if (s.raw(i) > s.raw(i - 1))
                throw std::invalid_argument("make_spectrum: eigenvalues must be sorted descending");
        s.normalized = s.raw;
        if (s.raw.size() > 0 && s.raw(0) > Scalar(0))
            s.normalized /= s.raw(0);
        return s;
    }

    /// N = A_t A_r / (lambda d)^2.
    template <typename Scalar>
    Scalar dof_geometric(Scalar area_t, Scalar area_r, Scalar d, Scalar lambda = Scalar(1))
    {
        if (!(area_t > 0) || !(area_r > 0) || !(d > 0) || !(lambda > 0))
            throw std::invalid_argument("dof_geometric: arguments must be positive");
        return area_t * area_r / (lambda * lambda * d * d);
    }

    template <typename Scalar>
    struct PowerAllocationT
    {
        VectorX<Scalar> powers; // watts, one per channel
        Eigen::Index active = 0;
        Scalar water_level = Scalar(0);
    };
    using PowerAllocation = PowerAllocationT<double>;

    /// Water-filling over the descending spectrum `betas`. Starts from every
    /// positive channel and drops the weakest until all powers are nonnegative.
    template <typename Scalar>
    PowerAllocationT<Scalar> waterfill(const VectorX<Scalar> &betas, Scalar P_t, Scalar sigma2)
    {
        if (!(P_t > 0) || !(sigma2 > 0))
            throw std::invalid_argument("waterfill: power and noise must be positive");
        Eigen::Index M = 0;
        while (M < betas.size() && betas(M) > Scalar(0))
            ++M;
        if (M == 0)
            throw std::invalid_argument("waterfill: spectrum has no positive eigenvalue");

        PowerAllocationT<Scalar> out;
        out.powers = VectorX<Scalar>::Zero(betas.size());
        for (; M >= 1; --M)
        {
            Scalar inv_sum = 0;
            for (Eigen::Index i = 0; i < M; ++i)
                inv_sum += sigma2 / betas(i);
            const Scalar level = (P_t + inv_sum) / Scalar(M);
            // the weakest channel is the first to go negative
            if (level - sigma2 / betas(M - 1) >= Scalar(0) || M == 1)
            {
                out.active = M;
                out.water_level = level;
                for (Eigen::Index i = 0; i < M; ++i)
                    out.powers(i) = std::max(Scalar(0), level - sigma2 / betas(i));
                break;
            }
        }
        return out;
    }

    template <typename Scalar>
    PowerAllocationT<Scalar> waterfill(const EigenSpectrumT<Scalar> &s, Scalar P_t, Scalar sigma2)
    {
        return waterfill(s.raw, P_t, sigma2);
    }

    /// sum_n log2(1 + beta_n P_n / sigma2).
    template <typename Scalar>
    Scalar capacity_with_powers(const VectorX<Scalar> &betas, const VectorX<Scalar> &powers, Scalar sigma2)
    {
        if (powers.size() > betas.size())
            throw std::invalid_argument("capacity_with_powers: more powers than channels");
        Scalar c = 0;
        for (Eigen::Index i = 0; i < powers.size(); ++i)
            c += std::log2(Scalar(1) + betas(i) * powers(i) / sigma2);
        return c;
    }

    template <typename Scalar>
    Scalar capacity_waterfill(const VectorX<Scalar> &betas, Scalar P_t, Scalar sigma2)
    {
        return capacity_with_powers(betas, waterfill(betas, P_t, sigma2).powers, sigma2);
    }

    /// N log2(1 + beta P_t / (N sigma2)).
    template <typename Scalar>
    Scalar capacity_equal(Scalar beta_avg, int N, Scalar P_t, Scalar sigma2)
    {
        if (N < 1)
            throw std::invalid_argument("capacity_equal: N must be >= 1");
        return Scalar(N) * std::log2(Scalar(1) + beta_avg * P_t / (Scalar(N) * sigma2));
    }

    /// Largest n (1-based) with beta_n * P~_n >= sigma2, scanning the active
    /// channels. P~_n is the power of channel n+1, or P_n for the last active one.
    template <typename Scalar>
    int effective_dof(const VectorX<Scalar> &betas, Scalar sigma2, const PowerAllocationT<Scalar> &alloc)
    {
        if (betas.size() == 0)
            throw std::invalid_argument("effective_dof: empty spectrum");
        if (alloc.powers.size() != betas.size())
            throw std::invalid_argument("effective_dof: allocation does not match the spectrum");
        int ne = 0;
        const Eigen::Index M = alloc.active;
        for (Eigen::Index n = 0; n < M; ++n)
        {
            const Scalar p_next = (n + 1 < M) ? alloc.powers(n + 1) : alloc.powers(n);
            if (betas(n) * p_next >= sigma2)
                ne = static_cast<int>(n + 1);
        }
        return ne;
    }

    template <typename Scalar>
    struct SpectrumFitT
    {
        Scalar plateau_avg = 0;
        Scalar c = 0;         // decay per mode in log10 units
        Scalar intercept = 0; // log10 beta at n = N + 1
        Scalar r_squared = 0;
        int plateau = 0;
        int tail_points = 0;
    };
    using SpectrumFit = SpectrumFitT<double>;

    inline constexpr double default_fit_floor = 1e-7;

    /// Piecewise fit: plateau average over the first N values, then
    /// log10 beta_n = intercept - c (n - N - 1) over the tail above `floor * beta_1`.
    /// R^2 compares the piecewise model with the spectrum on every point above the floor.
    template <typename Scalar>
    SpectrumFitT<Scalar> spectrum_fit(const VectorX<Scalar> &normalized, int N, Scalar floor = Scalar(default_fit_floor))
    {
        const Eigen::Index len = normalized.size();
        if (N < 1 || len < N + 3)
            throw std::invalid_argument("spectrum_fit: spectrum must be longer than N + 2");
        const Scalar top = normalized(0);
        if (!(top > 0))
            throw std::invalid_argument("spectrum_fit: non-positive leading eigenvalue");

        SpectrumFitT<Scalar> fit;
        fit.plateau = N;
        fit.plateau_avg = normalized.head(N).mean();

        std::vector<Scalar> xs, ys;
        for (Eigen::Index n = N; n < len; ++n) // 0-based n = N is mode N + 1
            if (normalized(n) > floor * top)
            {
                xs.push_back(Scalar(n - N));
                ys.push_back(std::log10(normalized(n)));
            }
        fit.tail_points = static_cast<int>(xs.size());
        if (xs.size() < 2)
            throw std::invalid_argument("spectrum_fit: fewer than two tail points above the floor");

        const Scalar m = Scalar(xs.size());
        Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const Scalar den = m * sxx - sx * sx;
        const Scalar slope = (m * sxy - sx * sy) / den;
        fit.c = -slope;
        fit.intercept = (sy - slope * sx) / m;
        if (!(fit.c > 0))
            throw std::invalid_argument("spectrum_fit: tail does not decay");

        // R^2 of the piecewise model, log10 domain
        std::vector<Scalar> obs, model;
        const Scalar lp = std::log10(fit.plateau_avg);
        for (Eigen::Index n = 0; n < len; ++n)
        {
            if (!(normalized(n) > floor * top))
                continue;
            obs.push_back(std::log10(normalized(n)));
            model.push_back(n < N ? lp : fit.intercept - fit.c * Scalar(n - N));
        }
        Scalar mean = 0;
        for (const Scalar v : obs)
            mean += v;
        mean /= Scalar(obs.size());
        Scalar ss_res = 0, ss_tot = 0;
        for (std::size_t i = 0; i < obs.size(); ++i)
        {
            ss_res += (obs[i] - model[i]) * (obs[i] - model[i]);
            ss_tot += (obs[i] - mean) * (obs[i] - mean);
        }
        fit.r_squared = ss_tot > 0 ? Scalar(1) - ss_res / ss_tot : Scalar(1);
        return fit;
    }

    template <typename Scalar>
    struct CapacityPointT
    {
        Scalar snr_db = 0;
        Scalar sigma2 = 0;
        Scalar c_waterfill = 0;
        Scalar c_equal = 0;
        PowerAllocationT<Scalar> allocation;
    };

    template <typename Scalar>
    struct CapacityCurveT
    {
        std::vector<CapacityPointT<Scalar>> points;
        int equal_channels = 1;
        Scalar equal_beta = 0;
    };
    using CapacityCurve = CapacityCurveT<double>;

    /// Both capacities over an SNR sweep with sigma2 = P_t 10^(-SNR/10).
    /// The equal-allocation reference uses `N` channels of gain `beta_avg`.
    template <typename Scalar>
    CapacityCurveT<Scalar> capacity_vs_snr(const VectorX<Scalar> &betas, Scalar P_t, const std::vector<Scalar> &snr_db,
                                           int N, Scalar beta_avg)
    {
        if (snr_db.empty())
            throw std::invalid_argument("capacity_vs_snr: empty SNR list");
        CapacityCurveT<Scalar> curve;
        curve.equal_channels = N;
        curve.equal_beta = beta_avg;
        for (const Scalar snr : snr_db)
        {
            CapacityPointT<Scalar> p;
            p.snr_db = snr;
            p.sigma2 = P_t * std::pow(Scalar(10), -snr / Scalar(10));
            p.allocation = waterfill(betas, P_t, p.sigma2);
            p.c_waterfill = capacity_with_powers(betas, p.allocation.powers, p.sigma2);
            p.c_equal = capacity_equal(beta_avg, N, P_t, p.sigma2);
            curve.points.push_back(p);
        }
        return curve;
    }

} // namespace emcap

#endif
