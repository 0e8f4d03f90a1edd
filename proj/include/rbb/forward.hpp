// SPDX-License-Identifier: Apache-2.0
//
// rbb: robust broadband beamforming via bilinear least squares
// Copyright (C) 2026 The rbb authors
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

#ifndef RBB_FORWARD_HPP
#define RBB_FORWARD_HPP

#include "rbb/errors.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"
#include "rbb/slepian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace rbb
{
    // Snapshot instants shared by all elements.
    class SamplingPlan
    {
    public:
        SamplingPlan(std::vector<double> times, double rate) : times_(std::move(times)), rate_(rate)
        {
            if (times_.empty())
                throw invalid_argument("SamplingPlan: at least one snapshot required");
            if (!(rate_ > 0.0))
                throw invalid_argument("SamplingPlan: sample rate must be positive");
            for (std::size_t n = 1; n < times_.size(); ++n)
                if (!(times_[n] > times_[n - 1]))
                    throw invalid_argument("SamplingPlan: snapshot times must be strictly increasing");
        }

        // t_n = start + n / rate, n = 0..count-1
        static SamplingPlan uniform(std::size_t count, double rate, double start = 0.0)
        {
            if (count < 1)
                throw invalid_argument("SamplingPlan: at least one snapshot required");
            if (!(rate > 0.0))
                throw invalid_argument("SamplingPlan: sample rate must be positive");
            std::vector<double> t(count);
            for (std::size_t n = 0; n < count; ++n)
                t[n] = start + double(n) / rate;
            return SamplingPlan(std::move(t), rate);
        }

        std::size_t size() const noexcept { return times_.size(); }
        double rate() const noexcept { return rate_; }
        const std::vector<double> &times() const noexcept { return times_; }
        double front() const { return times_.front(); }
        double back() const { return times_.back(); }
        double span() const { return times_.back() - times_.front(); }

    private:
        std::vector<double> times_;
        double rate_;
    };

    // Measurement index for element m at snapshot n (snapshot-major stacking).
    constexpr std::size_t row_index(std::size_t m, std::size_t n, std::size_t element_count) noexcept
    {
        return n * element_count + m;
    }

    struct ForwardModel
    {
        MatrixXc A; // MN x K, A[row_index(m, n), k] = exp(-j 2 pi fc tau_m) psi_k(t_n - tau_m)
        std::size_t element_count = 0;
        std::size_t snapshot_count = 0;
        AngleOfArrival aoa;
        double carrier = 0.0;
    };

    // Element-time arguments t_n - tau_m in row order.
    inline std::vector<double> sample_arguments(const Eigen::VectorXd &tau, const SamplingPlan &plan)
    {
        const auto M = std::size_t(tau.size());
        std::vector<double> args(M * plan.size());
        for (std::size_t n = 0; n < plan.size(); ++n)
            for (std::size_t m = 0; m < M; ++m)
                args[row_index(m, n, M)] = plan.times()[n] - tau(Eigen::Index(m));
        return args;
    }

    inline ForwardModel forward_matrix(const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan,
                                       double carrier, const AngleOfArrival &aoa)
    {
        const Eigen::VectorXd tau = delays(geom, aoa);
        const std::size_t M = geom.element_count();
        const std::vector<double> args = sample_arguments(tau, plan);
        const Eigen::MatrixXd psi = basis.eval(std::span<const double>(args));

        ForwardModel fm;
        fm.A.resize(psi.rows(), psi.cols());
        for (std::size_t n = 0; n < plan.size(); ++n)
            for (std::size_t m = 0; m < M; ++m)
            {
                const auto l = Eigen::Index(row_index(m, n, M));
                const cplx phase = std::polar(1.0, -2.0 * std::numbers::pi * carrier * tau(Eigen::Index(m)));
                fm.A.row(l) = phase * psi.row(l).cast<cplx>();
            }
        fm.element_count = M;
        fm.snapshot_count = plan.size();
        fm.aoa = aoa;
        fm.carrier = carrier;
        return fm;
    }

    // Known-angle coefficients: argmin_alpha ||y - A alpha||_2.
    inline VectorXc ls_recover(const ForwardModel &model, const VectorXc &y)
    {
        return solve_least_squares(model.A, y, "ls_recover");
    }

    // s(t) = sum_k alpha_k psi_k(t) at each requested time.
    inline VectorXc synthesize(const SlepianBasis &basis, const VectorXc &alpha, std::span<const double> times)
    {
        if (std::size_t(alpha.size()) != basis.size())
            throw invalid_argument("synthesize: coefficient count does not match basis size");
        return basis.eval(times).cast<cplx>() * alpha;
    }

} // namespace rbb

#endif
