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

#include <catch_amalgamated.hpp>

#include "rbb/slepian.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace rbb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Gauss-Legendre nodes and weights on [lo, hi] from the Jacobi matrix (Golub-Welsch).
    void gauss_legendre(int n, double lo, double hi, Eigen::VectorXd &x, Eigen::VectorXd &w)
    {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k < n; ++k)
        {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            J(k, k - 1) = J(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        x = 0.5 * (hi - lo) * es.eigenvalues().array() + 0.5 * (hi + lo);
        w = (hi - lo) * es.eigenvectors().row(0).transpose().array().square();
    }

    struct GaussOracle
    {
        Eigen::VectorXd x, w, lambda;
        Eigen::MatrixXd psi; // at nodes, columns sorted by descending lambda
        double two_w;

        GaussOracle(double bandlimit, double lo, double hi, int n) : two_w(2 * bandlimit)
        {
            gauss_legendre(n, lo, hi, x, w);
            Eigen::MatrixXd s(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                {
                    const double d = two_w * (x(i) - x(j));
                    const double sn = d == 0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
                    s(i, j) = std::sqrt(w(i)) * two_w * sn * std::sqrt(w(j));
                }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
            lambda = es.eigenvalues().reverse();
            psi = (es.eigenvectors().rowwise().reverse().array().colwise() / w.cwiseSqrt().array()).matrix();
        }

        double eval(int k, double t) const
        {
            double acc = 0;
            for (int i = 0; i < x.size(); ++i)
            {
                const double d = two_w * (t - x(i));
                const double sn = d == 0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
                acc += w(i) * two_w * sn * psi(i, k);
            }
            return acc / lambda(k);
        }
    };
} // namespace

TEST_CASE("default K", "[slepian]")
{
    CHECK(default_K(0.5, 4.0) == 4);
    CHECK(default_K(1.0, 1.3) == 3);
    CHECK(default_K(1.0, 1.3, 2) == 5);
    CHECK(default_K(0.5, 4.0, 2) == 6);
    CHECK(default_K(2.5e9, 3.2e-9) == 16); // 2 * 2.5e9 * 3.2e-9 is 16 up to rounding
    CHECK_THROWS_AS(default_K(0.0, 1.0), invalid_argument);
    CHECK_THROWS_AS(default_K(1.0, -1.0), invalid_argument);
}

TEST_CASE("Gregory end weights", "[slepian]")
{
    auto w1 = detail::gregory_end_weights(1);
    CHECK_THAT(w1[0], WithinAbs(0.5, 1e-15));
    auto w2 = detail::gregory_end_weights(2);
    CHECK_THAT(w2[0], WithinAbs(5.0 / 12, 1e-15));
    CHECK_THAT(w2[1], WithinAbs(13.0 / 12, 1e-15));
    auto w3 = detail::gregory_end_weights(3);
    CHECK_THAT(w3[0], WithinAbs(3.0 / 8, 1e-15));
    CHECK_THAT(w3[1], WithinAbs(7.0 / 6, 1e-15));
    CHECK_THAT(w3[2], WithinAbs(23.0 / 24, 1e-15));
    CHECK_THROWS_AS(detail::gregory_end_weights(0), invalid_argument);
    CHECK_THROWS_AS(detail::gregory_end_weights(9), invalid_argument);

    // Order 8 integrates polynomials of degree 7 essentially exactly and smooth functions to h^8.
    const std::size_t n = 41;
    const Eigen::VectorXd qw = uniform_quadrature_weights(n, 1.0 / double(n - 1));
    double poly = 0, expo = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double t = double(i) / double(n - 1);
        poly += qw(Eigen::Index(i)) * std::pow(t, 7);
        expo += qw(Eigen::Index(i)) * std::exp(3 * t);
    }
    CHECK_THAT(poly, WithinAbs(1.0 / 8, 1e-14));
    CHECK_THAT(expo, WithinRel((std::exp(3.0) - 1) / 3, 1e-11));
}

TEST_CASE("eigenvalues on a 2WT = 8 instance", "[slepian]")
{
    const auto b = build_slepian_basis(0.5, 0.0, 8.0, 20);
    const Eigen::VectorXd &lam = b.eigenvalues();
    for (Eigen::Index k = 0; k < lam.size(); ++k)
    {
        CHECK(lam(k) > 0.0);
        CHECK(lam(k) <= 1.0);
        if (k > 0)
            CHECK(lam(k) <= lam(k - 1));
    }
    for (int k = 0; k < 7; ++k)
        CHECK(lam(k) > 0.5);
    for (int k = 12; k < 20; ++k)
        CHECK(lam(k) < 1e-3);
    CHECK(lam(17) < 1e-4); // ceil(2WT) + 10

    GaussOracle ref(0.5, 0.0, 8.0, 120);
    for (int k = 0; k < 14; ++k)
        CHECK_THAT(lam(k), WithinAbs(ref.lambda(k), 1e-9));
}

TEST_CASE("grid functions are orthonormal", "[slepian]")
{
    for (double rho : {4.0, 8.0, 16.0, 32.0})
    {
        const auto b = build_slepian_basis(1.0, -1.5, 2.5, 10, rho);
        const Eigen::MatrixXd gram = b.grid_values().transpose() * b.weights().asDiagonal() * b.grid_values();
        CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(b.step() <= 1.0 / (2.0 * 1.0 * rho) + 1e-15);
    }
}

TEST_CASE("evaluation", "[slepian]")
{
    const double W = 0.5, lo = 0.0, hi = 8.0;
    const auto b = build_slepian_basis(W, lo, hi, 12);
    const auto fine = build_slepian_basis(W, lo, hi, 12, 4 * default_oversampling);

    SECTION("grid nodes are reproduced exactly")
    {
        for (Eigen::Index i : {Eigen::Index(0), Eigen::Index(17), b.grid_times().size() - 1})
        {
            const Eigen::VectorXd v = b.eval(b.grid_times()(i));
            CHECK(v == b.grid_values().row(i).transpose());
        }
    }

    SECTION("midpoints agree with refined grid and the Gauss-Legendre Nystrom oracle")
    {
        GaussOracle ref(W, lo, hi, 120);
        double worst_refine = 0, worst_oracle = 0;
        for (Eigen::Index i = 0; i + 1 < b.grid_times().size(); i += 7)
        {
            const double t = 0.5 * (b.grid_times()(i) + b.grid_times()(i + 1));
            const Eigen::VectorXd v = b.eval(t), vf = fine.eval(t);
            for (int k = 0; k < 12; ++k)
            {
                // Oracle eigenvectors carry an arbitrary sign; align on the grid.
                const double sgn = (ref.eval(k, b.grid_times()(40)) * b.grid_values()(40, k)) >= 0 ? 1.0 : -1.0;
                worst_refine = std::max(worst_refine, std::abs(v(k) - vf(k)) / b.grid_values().col(k).cwiseAbs().maxCoeff());
                worst_oracle = std::max(worst_oracle, std::abs(v(k) - sgn * ref.eval(k, t)) / b.grid_values().col(k).cwiseAbs().maxCoeff());
            }
        }
        CHECK(worst_refine <= 1e-6);
        CHECK(worst_oracle <= 1e-6);
    }

    SECTION("vectorised evaluation matches scalar")
    {
        std::vector<double> ts{0.013, 3.3333, 7.99, 8.0, b.grid_times()(5)};
        const Eigen::MatrixXd m = b.eval(ts);
        for (std::size_t j = 0; j < ts.size(); ++j)
            CHECK((m.row(Eigen::Index(j)).transpose() - b.eval(ts[j])).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("domain")
    {
        CHECK_NOTHROW(b.eval(hi + 0.5 * b.step()));
        CHECK_THROWS_AS(b.eval(hi + 10 * b.step()), out_of_domain);
        CHECK_THROWS_AS(b.eval(lo - 10 * b.step()), out_of_domain);
    }
}

TEST_CASE("spectral concentration", "[slepian]")
{
    // Direct-sum transform of each gridded function; energy in |f| <= W should equal lambda_k.
    const double W = 0.5, lo = 0.0, hi = 8.0;
    const auto b = build_slepian_basis(W, lo, hi, 12);
    const int nf = 2001;
    const int base_k = int(default_K(W, hi - lo)); // 8
    for (int k = 0; k < 12; ++k)
    {
        auto energy = [&](double fmax) {
            const double df = 2 * fmax / (nf - 1);
            double acc = 0;
            for (int j = 0; j < nf; ++j)
            {
                const double f = -fmax + j * df;
                std::complex<double> s = 0;
                for (Eigen::Index i = 0; i < b.grid_times().size(); ++i)
                    s += b.weights()(i) * b.grid_values()(i, k) * std::polar(1.0, -2 * std::numbers::pi * f * b.grid_times()(i));
                const double wj = (j == 0 || j == nf - 1) ? 1.0 / 3 : (j % 2 ? 4.0 / 3 : 2.0 / 3);
                acc += wj * df * std::norm(s);
            }
            return acc;
        };
        const double inband = energy(W);
        CHECK_THAT(inband, WithinAbs(b.eigenvalues()(k), 1e-6));
        if (k < base_k - 3)
            CHECK(inband >= 1 - 1e-3);
    }
}

TEST_CASE("construction errors", "[slepian]")
{
    CHECK_THROWS_AS(build_slepian_basis(1.0, 0.0, 1.0, 3, 2.0), invalid_argument);
    CHECK_THROWS_AS(build_slepian_basis(1.0, 1.0, 1.0, 3), invalid_argument);
    CHECK_THROWS_AS(build_slepian_basis(1.0, 0.0, 1.0, 0), invalid_argument);
    CHECK_THROWS_AS(build_slepian_basis(1.0, 0.0, 0.25, 100, 4.0), invalid_argument); // grid of 3 points
    CHECK_THROWS_AS(build_slepian_basis(-1.0, 0.0, 1.0, 2), invalid_argument);
}

TEST_CASE("sign convention is deterministic", "[slepian]")
{
    const auto a = build_slepian_basis(1.0, 0.0, 3.0, 6);
    const auto b = build_slepian_basis(1.0, 0.0, 3.0, 6);
    CHECK(a.grid_values() == b.grid_values());
    const Eigen::VectorXd &t = a.grid_times();
    for (int k = 0; k < 6; ++k)
    {
        double moment = 0;
        for (Eigen::Index i = 0; i < t.size(); ++i)
            moment += a.weights()(i) * a.grid_values()(i, k) * (k % 2 == 0 ? 1.0 : t(i) - 1.5);
        CHECK(moment > 0);
    }
}
