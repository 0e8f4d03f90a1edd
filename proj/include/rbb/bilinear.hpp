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

#ifndef RBB_BILINEAR_HPP
#define RBB_BILINEAR_HPP

#include "rbb/embedding.hpp"
#include "rbb/errors.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace rbb
{
    // Measurement model y_l = c^H U_l^H alpha = (U_l c)^H alpha.

    namespace detail
    {
        inline void check_alpha(const EmbeddingBasis &emb, const VectorXc &alpha, const char *who)
        {
            if (std::size_t(alpha.size()) != emb.basis_size)
                throw invalid_argument(std::string(who) + ": alpha has length " + std::to_string(alpha.size()) +
                                       ", embedding expects " + std::to_string(emb.basis_size));
        }
        inline void check_c(const EmbeddingBasis &emb, const VectorXc &c, const char *who)
        {
            if (std::size_t(c.size()) != emb.rank())
                throw invalid_argument(std::string(who) + ": c has length " + std::to_string(c.size()) +
                                       ", embedding rank is " + std::to_string(emb.rank()));
        }
        inline void check_y(const EmbeddingBasis &emb, const VectorXc &y, const char *who)
        {
            if (std::size_t(y.size()) != emb.measurements)
                throw invalid_argument(std::string(who) + ": y has length " + std::to_string(y.size()) +
                                       ", embedding expects " + std::to_string(emb.measurements));
        }
    } // namespace detail

    // MN x K system matrix for alpha with c fixed: row l = (U_l c)^H.
    inline MatrixXc alpha_system(const EmbeddingBasis &emb, const VectorXc &c)
    {
        detail::check_c(emb, c, "alpha_system");
        const VectorXc uc = emb.U * c;
        return Eigen::Map<const MatrixXc>(uc.data(), Eigen::Index(emb.basis_size), Eigen::Index(emb.measurements)).adjoint();
    }

    // MN x P system matrix for c with alpha fixed: row l = alpha^H U_l. Its right-hand side is conj(y).
    inline MatrixXc c_system(const EmbeddingBasis &emb, const VectorXc &alpha)
    {
        detail::check_alpha(emb, alpha, "c_system");
        MatrixXc out(Eigen::Index(emb.measurements), Eigen::Index(emb.rank()));
        for (std::size_t l = 0; l < emb.measurements; ++l)
            out.row(Eigen::Index(l)) = alpha.adjoint() * emb.row_block(l);
        return out;
    }

    inline VectorXc predict(const EmbeddingBasis &emb, const VectorXc &alpha, const VectorXc &c)
    {
        detail::check_alpha(emb, alpha, "predict");
        return alpha_system(emb, c) * alpha;
    }

    inline VectorXc alpha_step(const EmbeddingBasis &emb, const VectorXc &y, const VectorXc &c)
    {
        detail::check_y(emb, y, "alpha_step");
        return solve_least_squares(alpha_system(emb, c), y, "alpha_step");
    }

    inline VectorXc c_step(const EmbeddingBasis &emb, const VectorXc &y, const VectorXc &alpha)
    {
        detail::check_y(emb, y, "c_step");
        return solve_least_squares(c_system(emb, alpha), y.conjugate(), "c_step");
    }

    struct Disambiguation
    {
        cplx gamma{1.0, 0.0};     // c_{q*} ~ gamma * c_hat
        std::size_t q_star = 0;   // best codebook index
        AngleOfArrival theta_hat; // grid angle at q_star
        VectorXc alpha_corrected; // alpha_hat / conj(gamma)
    };

    // gamma_q = (c_hat^H c_q) / (c_hat^H c_hat), q* = argmin_q ||c_q - gamma_q c_hat||, lowest index on ties.
    // Since the model is conjugate-linear in c, rescaling c_hat by gamma rescales alpha_hat by 1/conj(gamma).
    inline Disambiguation disambiguate(const VectorXc &c_hat, const VectorXc &alpha_hat, const MatrixXc &codebook,
                                       std::span<const AngleOfArrival> angles)
    {
        if (codebook.cols() == 0)
            throw invalid_argument("disambiguate: empty codebook");
        if (codebook.rows() != c_hat.size())
            throw invalid_argument("disambiguate: codebook rows do not match length of c_hat");
        if (!angles.empty() && std::size_t(codebook.cols()) != angles.size())
            throw invalid_argument("disambiguate: one angle per codebook column required");
        const double energy = c_hat.squaredNorm();
        if (!(energy > 0.0))
            throw degenerate_solution("disambiguate: c_hat is zero");

        Disambiguation d;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index q = 0; q < codebook.cols(); ++q)
        {
            const cplx g = c_hat.dot(codebook.col(q)) / energy; // Eigen's dot conjugates the left operand
            const double r = (codebook.col(q) - g * c_hat).norm();
            if (r < best)
            {
                best = r;
                d.q_star = std::size_t(q);
                d.gamma = g;
            }
        }
        if (!std::isfinite(best))
            throw numeric_failure("disambiguate: non-finite codebook residuals");
        if (std::abs(d.gamma) == 0.0)
            throw disambiguation_failure("disambiguate: matched scale is zero");
        if (!angles.empty())
            d.theta_hat = angles[d.q_star];
        d.alpha_corrected = alpha_hat / std::conj(d.gamma);
        return d;
    }

    struct AltMinOptions
    {
        std::size_t max_iters = 50;
        double rel_tol = 1e-8;
        std::optional<std::size_t> init_index; // codebook column used as c^0
        std::optional<VectorXc> init_c;        // explicit c^0; overrides init_index
    };

    struct BilinearSolution
    {
        VectorXc alpha;                      // raw alpha_hat
        VectorXc c;                          // raw c_hat
        std::vector<double> residual_history; // ||y - y_hat|| after every half-step (alpha, c, alpha, ...)
        std::size_t iterations = 0;
        bool converged = false;
        cplx gamma{1.0, 0.0};
        std::size_t q_star = 0;
        AngleOfArrival theta_hat;
        VectorXc alpha_corrected;
    };

    // Codebook column nearest the interval midpoint (or the angle centroid when no interval is stored).
    inline std::size_t midpoint_index(const EmbeddingBasis &emb)
    {
        if (emb.angles.empty())
            return std::size_t(emb.codebook.cols()) / 2;
        AngleOfArrival target = emb.angles.front();
        if (emb.interval)
            target = emb.interval->midpoint();
        else
        {
            std::array<double, 2> mean{0.0, 0.0};
            for (const auto &a : emb.angles)
                for (std::size_t i = 0; i < a.size(); ++i)
                    mean[i] += a[i] / double(emb.angles.size());
            target = AngleOfArrival::from_values(std::span<const double>(mean.data(), target.size()));
        }
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < emb.angles.size(); ++q)
        {
            const double d = angle_distance(emb.angles[q], target);
            if (d < best_d)
            {
                best_d = d;
                best = q;
            }
        }
        return best;
    }

    inline BilinearSolution solve_altmin(const EmbeddingBasis &emb, const VectorXc &y, const AltMinOptions &opts = {})
    {
        if (opts.max_iters < 1)
            throw invalid_argument("solve_altmin: max_iters must be at least 1");
        if (!(opts.rel_tol > 0.0))
            throw invalid_argument("solve_altmin: rel_tol must be positive");
        detail::check_y(emb, y, "solve_altmin");
        if (emb.measurements < std::max(emb.basis_size, emb.rank()))
            throw invalid_argument("solve_altmin: need at least max(K, P) measurements");

        VectorXc c;
        if (opts.init_c)
            c = *opts.init_c;
        else
        {
            const std::size_t q0 = opts.init_index.value_or(midpoint_index(emb));
            if (q0 >= std::size_t(emb.codebook.cols()))
                throw invalid_argument("solve_altmin: initial codebook index out of range");
            c = emb.codebook.col(Eigen::Index(q0));
        }
        detail::check_c(emb, c, "solve_altmin");

        BilinearSolution sol;
        const double floor = 1e-15 * y.norm();
        VectorXc alpha;
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t it = 1; it <= opts.max_iters; ++it)
        {
            alpha = alpha_step(emb, y, c);
            const double r_alpha = (y - predict(emb, alpha, c)).norm();
            c = c_step(emb, y, alpha);
            const double r_c = (y - predict(emb, alpha, c)).norm();
            sol.residual_history.push_back(r_alpha);
            sol.residual_history.push_back(r_c);
            sol.iterations = it;

            const double ref = it == 1 ? r_alpha : previous;
            if (r_c <= floor || std::abs(ref - r_c) < opts.rel_tol * ref)
            {
                sol.converged = true;
                break;
            }
            previous = r_c;
        }
        sol.alpha = alpha;
        sol.c = c;

        const Disambiguation d = disambiguate(sol.c, sol.alpha, emb.codebook, std::span<const AngleOfArrival>(emb.angles));
        sol.gamma = d.gamma;
        sol.q_star = d.q_star;
        sol.theta_hat = d.theta_hat;
        sol.alpha_corrected = d.alpha_corrected;
        return sol;
    }

    // Diagnostic trace: one row per half-step.
    inline void write_trace_csv(std::ostream &os, const BilinearSolution &sol)
    {
        os << "half_step,iteration,variable,residual\n";
        const auto flags = os.flags();
        const auto prec = os.precision();
        os << std::setprecision(17);
        for (std::size_t i = 0; i < sol.residual_history.size(); ++i)
            os << i << ',' << (i / 2 + 1) << ',' << (i % 2 == 0 ? "alpha" : "c") << ',' << sol.residual_history[i] << '\n';
        os.flags(flags);
        os.precision(prec);
    }

} // namespace rbb

#endif
