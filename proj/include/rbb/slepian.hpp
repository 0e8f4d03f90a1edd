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

#ifndef RBB_SLEPIAN_HPP
#define RBB_SLEPIAN_HPP

#include "rbb/errors.hpp"
#include "rbb/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace rbb
{
    // K = ceil(2 * bandlimit * duration) + guard
    inline std::size_t default_K(double bandlimit, double duration, std::size_t guard = 0)
    {
        if (!(bandlimit > 0.0) || !(duration > 0.0))
            throw invalid_argument("default_K: bandlimit and duration must be positive");
        // Round away products that are integral up to floating-point noise before taking the ceiling.
        const double tbw = 2.0 * bandlimit * duration;
        const double nearest = std::round(tbw);
        const double base = std::abs(tbw - nearest) <= 1e-9 * std::max(1.0, tbw) ? nearest : std::ceil(tbw);
        return std::size_t(base) + guard;
    }

    namespace detail
    {
        // Endpoint weights of the Gregory-corrected trapezoid rule with `order` correction nodes
        // (exact for polynomials of degree < order on unit spacing). Interior weights are 1.
        // order = 1 reproduces the trapezoid rule.
        inline std::vector<double> gregory_end_weights(std::size_t order)
        {
            if (order < 1 || order > 8)
                throw invalid_argument("gregory_end_weights: order must be in [1, 8]");
            // Euler-Maclaurin left-end functional applied to x^d: -1/2 for d = 0, B_{d+1}/(d+1) for odd d.
            constexpr std::array<long double, 5> bernoulli{1.0L, 1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30}; // B_0, B_2, ..., B_8
            const std::size_t p = order;
            std::vector<long double> a(p * p), rhs(p);
            for (std::size_t d = 0; d < p; ++d)
            {
                for (std::size_t j = 0; j < p; ++j)
                    a[d * p + j] = d == 0 ? 1.0L : std::pow((long double)j, (long double)d);
                rhs[d] = d == 0 ? -0.5L : (d % 2 == 1 ? bernoulli[(d + 1) / 2] / (long double)(d + 1) : 0.0L);
            }
            // Gaussian elimination with partial pivoting.
            for (std::size_t col = 0; col < p; ++col)
            {
                std::size_t piv = col;
                for (std::size_t r = col + 1; r < p; ++r)
                    if (std::abs(a[r * p + col]) > std::abs(a[piv * p + col]))
                        piv = r;
                for (std::size_t c = 0; c < p; ++c)
                    std::swap(a[col * p + c], a[piv * p + c]);
                std::swap(rhs[col], rhs[piv]);
                for (std::size_t r = col + 1; r < p; ++r)
                {
                    const long double f = a[r * p + col] / a[col * p + col];
                    for (std::size_t c = col; c < p; ++c)
                        a[r * p + c] -= f * a[col * p + c];
                    rhs[r] -= f * rhs[col];
                }
            }
            std::vector<double> w(p);
            for (std::size_t i = p; i-- > 0;)
            {
                long double s = rhs[i];
                for (std::size_t c = i + 1; c < p; ++c)
                    s -= a[i * p + c] * (long double)(w[c] - 1.0);
                w[i] = double(1.0L + s / a[i * p + i]);
            }
            return w;
        }
    } // namespace detail

    // Quadrature weights for `count` uniformly spaced nodes with spacing `step`.
    inline Eigen::VectorXd uniform_quadrature_weights(std::size_t count, double step, std::size_t order = 8)
    {
        if (count < 2)
            throw invalid_argument("uniform_quadrature_weights: need at least 2 nodes");
        order = std::min(order, count / 2);
        const std::vector<double> end = detail::gregory_end_weights(std::max<std::size_t>(order, 1));
        Eigen::VectorXd w = Eigen::VectorXd::Ones(Eigen::Index(count));
        for (std::size_t j = 0; j < end.size(); ++j)
        {
            w(Eigen::Index(j)) = end[j];
            w(Eigen::Index(count - 1 - j)) = end[j];
        }
        return w * step;
    }

    // Prolate (Slepian) functions for signals bandlimited to [-bandlimit, bandlimit] observed on
    // [lower, upper]. The functions are the leading eigenfunctions of the time-limited sinc kernel
    //     lambda psi(t) = int_lower^upper 2W sinc(2W (t - s)) psi(s) ds,
    // discretized by Nystrom's method on a uniform grid. Off-grid values use the Nystrom extension
    //     psi(t) = (1/lambda) sum_i w_i 2W sinc(2W (t - t_i)) psi(t_i),
    // which is exactly bandlimited and reproduces the grid samples.
    class SlepianBasis
    {
    public:
        struct Parts
        {
            double bandlimit = 0.0;
            double lower = 0.0;
            double upper = 0.0;
            double oversampling = 0.0;
            Eigen::VectorXd times;
            Eigen::VectorXd weights;
            Eigen::MatrixXd values; // grid size x K
            Eigen::VectorXd eigenvalues;
        };

        explicit SlepianBasis(Parts parts) : p_(std::move(parts))
        {
            const auto g = p_.times.size();
            if (g < 2 || p_.weights.size() != g || p_.values.rows() != g || p_.eigenvalues.size() != p_.values.cols() || p_.values.cols() < 1)
                throw invalid_argument("SlepianBasis: inconsistent parts");
            if ((p_.eigenvalues.array() <= 0.0).any())
                throw numeric_failure("SlepianBasis: non-positive concentration eigenvalue");
            step_ = (p_.upper - p_.lower) / double(g - 1);
            nystrom_ = p_.weights.asDiagonal() * p_.values * p_.eigenvalues.cwiseInverse().asDiagonal();
        }

        std::size_t size() const noexcept { return std::size_t(p_.values.cols()); }
        std::size_t grid_size() const noexcept { return std::size_t(p_.times.size()); }
        double bandlimit() const noexcept { return p_.bandlimit; }
        double lower() const noexcept { return p_.lower; }
        double upper() const noexcept { return p_.upper; }
        double step() const noexcept { return step_; }
        double oversampling() const noexcept { return p_.oversampling; }
        const Eigen::VectorXd &grid_times() const noexcept { return p_.times; }
        const Eigen::VectorXd &weights() const noexcept { return p_.weights; }
        const Eigen::MatrixXd &grid_values() const noexcept { return p_.values; }
        const Eigen::VectorXd &eigenvalues() const noexcept { return p_.eigenvalues; }
        const Parts &parts() const noexcept { return p_; }

        // Accepts t within one grid step of [lower, upper].
        bool in_domain(double t) const noexcept { return t >= p_.lower - step_ && t <= p_.upper + step_; }

        // All K functions at time t.
        Eigen::VectorXd eval(double t) const
        {
            check_domain(t);
            const Eigen::Index i = exact_node(t);
            if (i >= 0)
                return p_.values.row(i).transpose();
            return nystrom_.transpose() * kernel_row(t);
        }

        // Row j holds the K function values at times[j].
        Eigen::MatrixXd eval(std::span<const double> times) const
        {
            const Eigen::Index g = p_.times.size();
            Eigen::MatrixXd kern(Eigen::Index(times.size()), g);
            for (std::size_t j = 0; j < times.size(); ++j)
            {
                check_domain(times[j]);
                kern.row(Eigen::Index(j)) = kernel_row(times[j]).transpose();
            }
            Eigen::MatrixXd out = kern * nystrom_;
            for (std::size_t j = 0; j < times.size(); ++j)
            {
                const Eigen::Index i = exact_node(times[j]);
                if (i >= 0)
                    out.row(Eigen::Index(j)) = p_.values.row(i);
            }
            return out;
        }

    private:
        void check_domain(double t) const
        {
            if (!in_domain(t))
                throw out_of_domain("SlepianBasis: t = " + std::to_string(t) + " outside [" + std::to_string(p_.lower) +
                                    ", " + std::to_string(p_.upper) + "] (basis interval too small)");
        }

        Eigen::Index exact_node(double t) const
        {
            const double u = (t - p_.lower) / step_;
            const double r = std::round(u);
            if (r < 0.0 || r >= double(p_.times.size()))
                return -1;
            const auto i = Eigen::Index(r);
            return p_.times(i) == t ? i : -1;
        }

        Eigen::VectorXd kernel_row(double t) const
        {
            const double two_w = 2.0 * p_.bandlimit;
            Eigen::VectorXd k(p_.times.size());
            for (Eigen::Index i = 0; i < k.size(); ++i)
                k(i) = two_w * sinc(two_w * (t - p_.times(i)));
            return k;
        }

        Parts p_;
        double step_ = 0.0;
        Eigen::MatrixXd nystrom_;
    };

    inline constexpr double default_oversampling = 32.0;
    inline constexpr std::size_t default_quadrature_order = 8;

    // Grid step is at most 1 / (2 * bandlimit * oversampling). Each psi_k has unit L2 norm on
    // [lower, upper] under the grid quadrature; signs are fixed so that the (k mod 2)-th moment
    // about the interval center is positive.
    inline SlepianBasis build_slepian_basis(double bandlimit, double lower, double upper, std::size_t K,
                                            double oversampling = default_oversampling,
                                            std::size_t quadrature_order = default_quadrature_order)
    {
        if (!(bandlimit > 0.0) || !std::isfinite(bandlimit))
            throw invalid_argument("build_slepian_basis: bandlimit must be positive");
        if (!(upper > lower))
            throw invalid_argument("build_slepian_basis: interval must have positive length");
        if (!(oversampling >= 4.0))
            throw invalid_argument("build_slepian_basis: oversampling must be at least 4");
        if (K < 1)
            throw invalid_argument("build_slepian_basis: K must be at least 1");

        const double len = upper - lower;
        const auto g = std::size_t(std::ceil(len * 2.0 * bandlimit * oversampling)) + 1;
        if (K > g)
            throw invalid_argument("build_slepian_basis: K = " + std::to_string(K) + " exceeds grid size " + std::to_string(g));
        const double dt = len / double(g - 1);

        Eigen::VectorXd t(static_cast<Eigen::Index>(g));
        for (std::size_t i = 0; i < g; ++i)
            t(Eigen::Index(i)) = lower + double(i) * dt;
        t(Eigen::Index(g - 1)) = upper;
        const Eigen::VectorXd w = uniform_quadrature_weights(g, dt, quadrature_order);
        const Eigen::VectorXd sw = w.cwiseSqrt();

        // Symmetrized kernel D^(1/2) B D^(1/2) with B_ij = 2W sinc(2W (t_i - t_j)).
        const double two_w = 2.0 * bandlimit;
        Eigen::MatrixXd s(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g));
        for (Eigen::Index i = 0; i < s.rows(); ++i)
            for (Eigen::Index j = 0; j <= i; ++j)
            {
                const double v = sw(i) * two_w * sinc(two_w * (t(i) - t(j))) * sw(j);
                s(i, j) = v;
                s(j, i) = v;
            }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        if (es.info() != Eigen::Success)
            throw numeric_failure("build_slepian_basis: eigensolver did not converge");

        SlepianBasis::Parts parts;
        parts.bandlimit = bandlimit;
        parts.lower = lower;
        parts.upper = upper;
        parts.oversampling = oversampling;
        parts.times = t;
        parts.weights = w;
        parts.values.resize(Eigen::Index(g), Eigen::Index(K));
        parts.eigenvalues.resize(Eigen::Index(K));
        const double mid = 0.5 * (lower + upper);
        for (std::size_t k = 0; k < K; ++k)
        {
            const Eigen::Index src = Eigen::Index(g - 1 - k); // eigenvalues ascending
            const double lambda = es.eigenvalues()(src);
            if (!(lambda > 0.0))
                throw numeric_failure("build_slepian_basis: eigenvalue " + std::to_string(k + 1) +
                                      " is not positive; K exceeds the resolvable dimension");
            Eigen::VectorXd psi = es.eigenvectors().col(src).cwiseQuotient(sw);
            double moment = 0.0;
            for (Eigen::Index i = 0; i < psi.size(); ++i)
                moment += w(i) * psi(i) * (k % 2 == 0 ? 1.0 : t(i) - mid);
            if (moment < 0.0)
                psi = -psi;
            parts.values.col(Eigen::Index(k)) = psi;
            parts.eigenvalues(Eigen::Index(k)) = std::min(lambda, 1.0);
        }
        return SlepianBasis(std::move(parts));
    }

} // namespace rbb

#endif
