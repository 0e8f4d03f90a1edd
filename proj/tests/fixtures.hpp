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

// Small desk-scale scenes shared by the unit suites.

#ifndef RBB_TESTS_FIXTURES_HPP
#define RBB_TESTS_FIXTURES_HPP

#include "rbb/embedding.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/slepian.hpp"

#include <random>

namespace fixture
{
    inline constexpr double c0 = 3e8;
    inline constexpr double fc = 10e9;
    inline constexpr double bw = 2.5e9;

    struct Scene
    {
        rbb::ArrayGeometry geom;
        rbb::SamplingPlan plan;
        rbb::UncertaintyInterval interval;
        rbb::SlepianBasis basis;
    };

    // Basis interval padded by the largest delay over the interval.
    inline rbb::SlepianBasis padded_basis(const rbb::ArrayGeometry &g, const rbb::SamplingPlan &p, const rbb::UncertaintyInterval &iv,
                                          std::size_t K)
    {
        const auto dr = rbb::delay_range(g, iv);
        return rbb::build_slepian_basis(bw, p.front() - dr.max_abs, p.back() + dr.max_abs, K);
    }

    inline Scene ula(std::size_t M, std::size_t N, double center, double half, std::size_t guard = 8, double spacing = c0 / (2 * fc))
    {
        auto g = rbb::make_ula(M, spacing, c0);
        auto p = rbb::SamplingPlan::uniform(N, 2 * bw);
        rbb::UncertaintyInterval iv(rbb::AngleOfArrival::linear(center), half);
        const std::size_t K = rbb::default_K(bw, rbb::aperture(g, iv, p.span()), guard);
        auto b = padded_basis(g, p, iv, K);
        return Scene{g, p, iv, std::move(b)};
    }

    // Fixed-K variant for tiny instances.
    inline Scene ula_k(std::size_t M, std::size_t N, double spacing, double center, double half, std::size_t K)
    {
        auto g = rbb::make_ula(M, spacing, c0);
        auto p = rbb::SamplingPlan::uniform(N, 2 * bw);
        rbb::UncertaintyInterval iv(rbb::AngleOfArrival::linear(center), half);
        auto b = padded_basis(g, p, iv, K);
        return Scene{g, p, iv, std::move(b)};
    }

    inline rbb::VectorXc random_vector(std::mt19937_64 &rng, Eigen::Index n)
    {
        std::normal_distribution<double> nd;
        rbb::VectorXc v(n);
        for (auto &x : v)
            x = {nd(rng), nd(rng)};
        return v;
    }

    inline rbb::MatrixXc random_matrix(std::mt19937_64 &rng, Eigen::Index r, Eigen::Index c)
    {
        std::normal_distribution<double> nd;
        rbb::MatrixXc m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i)
                m(i, j) = {nd(rng), nd(rng)};
        return m;
    }
} // namespace fixture

#endif
