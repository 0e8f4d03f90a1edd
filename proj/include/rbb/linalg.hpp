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

#ifndef RBB_LINALG_HPP
#define RBB_LINALG_HPP

#include "rbb/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace rbb
{
    using cplx = std::complex<double>;
    using VectorXc = Eigen::VectorXcd;
    using MatrixXc = Eigen::MatrixXcd;

    // Relative pivot threshold below which a column of a least-squares system counts as dependent.
    inline constexpr double rank_threshold = 1e-12;

    // Minimizer of ||b - A x||_2 via column-pivoted Householder QR.
    // Throws rank_deficiency when A does not have full column rank.
    inline VectorXc solve_least_squares(const MatrixXc &A, const VectorXc &b, const char *context = "least squares")
    {
        if (A.rows() != b.size())
            throw invalid_argument(std::string(context) + ": row count " + std::to_string(A.rows()) +
                                   " does not match right-hand side length " + std::to_string(b.size()));
        if (A.cols() == 0)
            throw invalid_argument(std::string(context) + ": system has no unknowns");
        if (A.rows() < A.cols())
            throw rank_deficiency(std::string(context) + ": underdetermined system", std::size_t(A.rows()), std::size_t(A.cols()));
        if (!A.allFinite() || !b.allFinite())
            throw numeric_failure(std::string(context) + ": non-finite entries in system");

        Eigen::ColPivHouseholderQR<MatrixXc> qr(A);
        qr.setThreshold(rank_threshold);
        if (qr.rank() < A.cols())
            throw rank_deficiency(std::string(context) + ": rank-deficient system", std::size_t(qr.rank()), std::size_t(A.cols()));
        return qr.solve(b);
    }

    // sin(pi x) / (pi x)
    inline double sinc(double x)
    {
        if (x == 0.0)
            return 1.0;
        const double px = std::numbers::pi * x;
        return std::sin(px) / px;
    }

} // namespace rbb

#endif
