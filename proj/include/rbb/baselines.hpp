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

#ifndef RBB_BASELINES_HPP
#define RBB_BASELINES_HPP

#include "rbb/errors.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"
#include "rbb/slepian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace rbb
{
    // Linear Slepian recovery steered at the interval midpoint.
    inline VectorXc crude_linear(const VectorXc &y, const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan,
                                 double carrier, const UncertaintyInterval &interval)
    {
        return ls_recover(forward_matrix(geom, basis, plan, carrier, interval.midpoint()), y);
    }

    struct DelayAndSumConfig
    {
        std::size_t taps = 21; // odd
        double sample_rate = 0.0;
        AngleOfArrival steering;
    };

    // Phase-compensate each element, advance it by tau_m with an R-tap truncated-sinc fractional
    // delay filter, and average. The integer part of f_s tau_m is applied as a shift so the taps
    // sinc(frac - r), r = -(R-1)/2..(R-1)/2, always straddle the interpolation point. Samples
    // outside the snapshot window are treated as zero.
    inline VectorXc delay_and_sum(const VectorXc &y, const ArrayGeometry &geom, const SamplingPlan &plan, double carrier,
                                  const DelayAndSumConfig &config)
    {
        const std::size_t M = geom.element_count();
        const std::size_t N = plan.size();
        if (config.taps < 1 || config.taps % 2 == 0)
            throw invalid_argument("delay_and_sum: tap count must be odd and positive");
        if (config.taps > N)
            throw invalid_argument("delay_and_sum: tap count exceeds snapshot count");
        if (!(config.sample_rate > 0.0))
            throw invalid_argument("delay_and_sum: sample rate must be positive");
        if (std::size_t(y.size()) != M * N)
            throw invalid_argument("delay_and_sum: measurement length does not match geometry and plan");

        const Eigen::VectorXd tau = delays(geom, config.steering);
        const auto half = std::ptrdiff_t(config.taps / 2);
        VectorXc out = VectorXc::Zero(Eigen::Index(N));
        for (std::size_t m = 0; m < M; ++m)
        {
            const double shift = config.sample_rate * tau(Eigen::Index(m));
            const double whole = std::round(shift);
            const double frac = shift - whole;
            const auto offset = std::ptrdiff_t(whole);
            const cplx derotate = std::polar(1.0, 2.0 * std::numbers::pi * carrier * tau(Eigen::Index(m)));
            for (std::size_t n = 0; n < N; ++n)
            {
                cplx acc{0.0, 0.0};
                for (std::ptrdiff_t r = -half; r <= half; ++r)
                {
                    const std::ptrdiff_t src = std::ptrdiff_t(n) + offset + r;
                    if (src < 0 || src >= std::ptrdiff_t(N))
                        continue;
                    acc += sinc(frac - double(r)) * y(Eigen::Index(row_index(m, std::size_t(src), M)));
                }
                out(Eigen::Index(n)) += derotate * acc;
            }
        }
        return out / double(M);
    }

} // namespace rbb

#endif
