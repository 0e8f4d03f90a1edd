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

#ifndef RBB_EMBEDDING_HPP
#define RBB_EMBEDDING_HPP

#include "rbb/errors.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"
#include "rbb/slepian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace rbb
{
    // Uniform inclusive grid over an uncertainty interval; tensor product in two dimensions
    // with index q = i_theta * Q + i_phi.
    class AngularGrid
    {
    public:
        AngularGrid(UncertaintyInterval interval, std::size_t points_per_dim) : interval_(interval), per_dim_(points_per_dim)
        {
            if (points_per_dim < 2)
                throw invalid_argument("AngularGrid: need at least 2 points per dimension");
            const std::size_t d = interval_.size();
            const std::size_t n2 = d == 2 ? per_dim_ : 1;
            points_.reserve(per_dim_ * n2);
            for (std::size_t i = 0; i < per_dim_; ++i)
                for (std::size_t j = 0; j < n2; ++j)
                {
                    std::array<double, 2> v{coord(0, i), d == 2 ? coord(1, j) : 0.0};
                    points_.push_back(AngleOfArrival::from_values(std::span<const double>(v.data(), d)));
                }
        }

        std::size_t size() const noexcept { return points_.size(); }
        std::size_t points_per_dim() const noexcept { return per_dim_; }
        const UncertaintyInterval &interval() const noexcept { return interval_; }
        const std::vector<AngleOfArrival> &points() const noexcept { return points_; }
        const AngleOfArrival &operator[](std::size_t q) const { return points_[q]; }

        // Closest grid point, lowest index on ties.
        std::size_t nearest(const AngleOfArrival &aoa) const
        {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < points_.size(); ++q)
            {
                const double d = angle_distance(points_[q], aoa);
                if (d < best_d)
                {
                    best_d = d;
                    best = q;
                }
            }
            return best;
        }

    private:
        double coord(std::size_t dim, std::size_t i) const
        {
            if (i + 1 == per_dim_)
                return interval_.upper(dim);
            return interval_.lower(dim) + 2.0 * interval_.half_width(dim) * double(i) / double(per_dim_ - 1);
        }

        UncertaintyInterval interval_;
        std::size_t per_dim_;
        std::vector<AngleOfArrival> points_;
    };

    inline AngularGrid sample_grid(const UncertaintyInterval &interval, std::size_t points_per_dim)
    {
        return AngularGrid(interval, points_per_dim);
    }

    // w(theta): the rows a_l(theta) = conj(A(theta)[l, :]) stacked into one MNK vector, entry l*K + k.
    inline VectorXc stacked_operator_column(const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan,
                                            double carrier, const AngleOfArrival &aoa)
    {
        const ForwardModel fm = forward_matrix(geom, basis, plan, carrier, aoa);
        const MatrixXc rows = fm.A.transpose().conjugate(); // K x MN, column l = a_l
        return Eigen::Map<const VectorXc>(rows.data(), rows.size());
    }

    struct SampledOperator
    {
        MatrixXc W;                   // MNK x Q_tot, column q = w(theta_q)
        std::size_t basis_size = 0;   // K
        std::size_t measurements = 0; // MN
        std::vector<AngleOfArrival> angles;
        std::optional<UncertaintyInterval> interval;
    };

    inline SampledOperator build_W(const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan,
                                   double carrier, std::span<const AngleOfArrival> angles)
    {
        if (angles.empty())
            throw invalid_argument("build_W: no angles");
        SampledOperator op;
        op.basis_size = basis.size();
        op.measurements = geom.element_count() * plan.size();
        op.W.resize(Eigen::Index(op.basis_size * op.measurements), Eigen::Index(angles.size()));
        for (std::size_t q = 0; q < angles.size(); ++q)
            op.W.col(Eigen::Index(q)) = stacked_operator_column(geom, basis, plan, carrier, angles[q]);
        op.angles.assign(angles.begin(), angles.end());
        return op;
    }

    inline SampledOperator build_W(const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan,
                                   double carrier, const AngularGrid &grid)
    {
        SampledOperator op = build_W(geom, basis, plan, carrier, std::span<const AngleOfArrival>(grid.points()));
        op.interval = grid.interval();
        return op;
    }

    // Either a fixed truncation rank, or the smallest P with sigma_{P+1} / sigma_1 <= tolerance.
    struct RankRule
    {
        std::size_t fixed_rank = 0; // nonzero selects fixed-rank mode
        double tolerance = 1e-3;

        static RankRule fixed(std::size_t rank) { return RankRule{rank, 0.0}; }
        static RankRule relative(double tol) { return RankRule{0, tol}; }
    };

    struct EmbeddingBasis
    {
        std::size_t basis_size = 0;         // K
        std::size_t measurements = 0;       // MN
        Eigen::VectorXd singular_values;    // sigma_1 >= ... >= sigma_P > 0
        Eigen::VectorXd spectrum;           // all sigma from the Gram eigendecomposition, descending
        MatrixXc V;                         // Q_tot x P
        MatrixXc U;                         // MNK x P, u_p = W v_p / sigma_p
        MatrixXc codebook;                  // P x Q_tot, c_q = U^H w(theta_q)
        double embed_error = 0.0;           // ||W - U U^H W||_F / ||W||_F
        std::vector<AngleOfArrival> angles; // grid angle for each codebook column
        std::optional<UncertaintyInterval> interval;

        std::size_t rank() const noexcept { return std::size_t(U.cols()); }

        // K x P slice U_l.
        auto row_block(std::size_t l) const { return U.middleRows(Eigen::Index(l * basis_size), Eigen::Index(basis_size)); }
    };

    // Gram eigenvalues below this fraction of the largest are treated as numerically zero.
    inline constexpr double gram_rank_tolerance = 1e-13;

    inline EmbeddingBasis truncated_embedding(const SampledOperator &op, const RankRule &rule)
    {
        const MatrixXc &W = op.W;
        if (W.size() == 0 || W.norm() == 0.0)
            throw invalid_argument("truncated_embedding: operator is zero");
        if (rule.fixed_rank == 0 && !(rule.tolerance > 0.0 && rule.tolerance < 1.0))
            throw invalid_argument("truncated_embedding: relative tolerance must lie in (0, 1); P = 0 is not allowed");

        const MatrixXc gram = W.adjoint() * W;
        if (!gram.allFinite())
            throw numeric_failure("truncated_embedding: non-finite Gram entries");
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(gram);
        if (es.info() != Eigen::Success)
            throw numeric_failure("truncated_embedding: Gram eigendecomposition failed");

        const Eigen::Index q = gram.rows();
        Eigen::VectorXd eig = es.eigenvalues().reverse();
        const MatrixXc vecs = es.eigenvectors().rowwise().reverse();
        const double top = eig(0);
        std::size_t numerical_rank = 0;
        for (Eigen::Index i = 0; i < q; ++i)
            if (eig(i) > gram_rank_tolerance * top)
                ++numerical_rank;
        const Eigen::VectorXd sigma = eig.cwiseMax(0.0).cwiseSqrt();

        std::size_t P = 0;
        if (rule.fixed_rank > 0)
        {
            if (rule.fixed_rank > numerical_rank)
                throw rank_deficiency("truncated_embedding: requested rank exceeds numerical rank of W", numerical_rank, rule.fixed_rank);
            P = rule.fixed_rank;
        }
        else
        {
            P = numerical_rank;
            for (std::size_t p = 1; p < numerical_rank; ++p)
                if (sigma(Eigen::Index(p)) <= rule.tolerance * sigma(0))
                {
                    P = p;
                    break;
                }
        }

        EmbeddingBasis e;
        e.basis_size = op.basis_size;
        e.measurements = op.measurements;
        e.spectrum = sigma;
        e.singular_values = sigma.head(Eigen::Index(P));
        e.V = vecs.leftCols(Eigen::Index(P));
        e.U = (W * e.V) * e.singular_values.cwiseInverse().asDiagonal();
        e.codebook = e.U.adjoint() * W;
        e.embed_error = (W - e.U * e.codebook).norm() / W.norm();
        e.angles = op.angles;
        e.interval = op.interval;
        return e;
    }

    // Projection coefficients U^H w(theta) for an arbitrary angle.
    inline VectorXc codebook_vector(const EmbeddingBasis &emb, const ArrayGeometry &geom, const SlepianBasis &basis,
                                    const SamplingPlan &plan, double carrier, const AngleOfArrival &aoa)
    {
        return emb.U.adjoint() * stacked_operator_column(geom, basis, plan, carrier, aoa);
    }

    // ||w - U U^H w|| / ||w|| at an angle inside the embedding interval.
    inline double embedding_residual(const EmbeddingBasis &emb, const ArrayGeometry &geom, const SlepianBasis &basis,
                                     const SamplingPlan &plan, double carrier, const AngleOfArrival &aoa)
    {
        if (emb.interval && !emb.interval->contains(aoa))
            throw out_of_domain("embedding_residual: angle outside the embedding interval");
        const VectorXc w = stacked_operator_column(geom, basis, plan, carrier, aoa);
        return (w - emb.U * (emb.U.adjoint() * w)).norm() / w.norm();
    }

} // namespace rbb

#endif
