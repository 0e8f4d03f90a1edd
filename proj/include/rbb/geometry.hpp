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

#ifndef RBB_GEOMETRY_HPP
#define RBB_GEOMETRY_HPP

#include "rbb/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rbb
{
    enum class ArrayKind
    {
        linear, // ULA along x; one angle (theta from broadside)
        planar  // UPA in the x-y plane; elevation theta and azimuth phi
    };

    inline std::size_t angle_dims(ArrayKind kind) { return kind == ArrayKind::linear ? 1 : 2; }

    class AngleOfArrival
    {
    public:
        AngleOfArrival() = default;

        static AngleOfArrival linear(double theta) { return AngleOfArrival({theta, 0.0}, 1); }
        static AngleOfArrival planar(double elevation, double azimuth) { return AngleOfArrival({elevation, azimuth}, 2); }

        static AngleOfArrival from_values(std::span<const double> values)
        {
            if (values.size() == 1)
                return linear(values[0]);
            if (values.size() == 2)
                return planar(values[0], values[1]);
            throw invalid_argument("AngleOfArrival: expected 1 or 2 angles, got " + std::to_string(values.size()));
        }

        std::size_t size() const noexcept { return dims_; }
        double operator[](std::size_t i) const { return values_[i]; }
        double elevation() const noexcept { return values_[0]; }
        double azimuth() const noexcept { return values_[1]; }

        friend bool operator==(const AngleOfArrival &a, const AngleOfArrival &b)
        {
            return a.dims_ == b.dims_ && a.values_[0] == b.values_[0] && (a.dims_ == 1 || a.values_[1] == b.values_[1]);
        }

    private:
        AngleOfArrival(std::array<double, 2> v, std::size_t dims) : values_(v), dims_(dims)
        {
            for (std::size_t i = 0; i < dims_; ++i)
                if (!std::isfinite(values_[i]))
                    throw invalid_argument("AngleOfArrival: non-finite angle");
        }

        std::array<double, 2> values_{0.0, 0.0};
        std::size_t dims_ = 1;
    };

    // Euclidean distance between two angles of equal dimensionality.
    inline double angle_distance(const AngleOfArrival &a, const AngleOfArrival &b)
    {
        if (a.size() != b.size())
            throw invalid_argument("angle_distance: dimensionality mismatch");
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d2 += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(d2);
    }

    // Box [center - half_width, center + half_width] per angle dimension.
    class UncertaintyInterval
    {
    public:
        UncertaintyInterval(AngleOfArrival center, std::span<const double> half_width) : center_(center)
        {
            if (half_width.size() != center.size())
                throw invalid_argument("UncertaintyInterval: half-width count does not match angle dimensionality");
            for (std::size_t i = 0; i < half_width.size(); ++i)
            {
                if (!(half_width[i] > 0.0) || !std::isfinite(half_width[i]))
                    throw invalid_argument("UncertaintyInterval: half-width must be positive and finite");
                half_width_[i] = half_width[i];
            }
        }
        UncertaintyInterval(AngleOfArrival center, double half_width)
            : UncertaintyInterval(center, std::vector<double>(center.size(), half_width)) {}

        std::size_t size() const noexcept { return center_.size(); }
        const AngleOfArrival &center() const noexcept { return center_; }
        const AngleOfArrival &midpoint() const noexcept { return center_; }
        double half_width(std::size_t i) const { return half_width_[i]; }
        double lower(std::size_t i) const { return center_[i] - half_width_[i]; }
        double upper(std::size_t i) const { return center_[i] + half_width_[i]; }

        bool contains(const AngleOfArrival &aoa, double slack = 1e-12) const
        {
            if (aoa.size() != size())
                return false;
            for (std::size_t i = 0; i < size(); ++i)
                if (aoa[i] < lower(i) - slack || aoa[i] > upper(i) + slack)
                    return false;
            return true;
        }

        // Point at fractional position u_i in [0, 1] along each dimension.
        AngleOfArrival at(std::span<const double> u) const
        {
            std::array<double, 2> v{};
            for (std::size_t i = 0; i < size(); ++i)
                v[i] = lower(i) + u[i] * 2.0 * half_width_[i];
            return AngleOfArrival::from_values(std::span<const double>(v.data(), size()));
        }

    private:
        AngleOfArrival center_;
        std::array<double, 2> half_width_{0.0, 0.0};
    };

    class ArrayGeometry
    {
    public:
        // Positions (3 x M, meters) are recentred so their centroid is the origin.
        ArrayGeometry(ArrayKind kind, Eigen::Matrix3Xd positions, double wave_speed)
            : kind_(kind), positions_(std::move(positions)), wave_speed_(wave_speed)
        {
            if (positions_.cols() < 1)
                throw invalid_argument("ArrayGeometry: at least one element required");
            if (!(wave_speed_ > 0.0) || !std::isfinite(wave_speed_))
                throw invalid_argument("ArrayGeometry: wave speed must be positive");
            if (!positions_.allFinite())
                throw invalid_argument("ArrayGeometry: non-finite element position");
            const Eigen::Vector3d centroid = positions_.rowwise().mean();
            positions_.colwise() -= centroid;
            for (Eigen::Index i = 0; i < positions_.cols(); ++i)
                for (Eigen::Index j = i + 1; j < positions_.cols(); ++j)
                    if ((positions_.col(i) - positions_.col(j)).norm() == 0.0)
                        throw invalid_argument("ArrayGeometry: coincident element positions");
        }

        ArrayKind kind() const noexcept { return kind_; }
        std::size_t element_count() const noexcept { return std::size_t(positions_.cols()); }
        const Eigen::Matrix3Xd &positions() const noexcept { return positions_; }
        double wave_speed() const noexcept { return wave_speed_; }

    private:
        ArrayKind kind_;
        Eigen::Matrix3Xd positions_;
        double wave_speed_;
    };

    // Elements at x_m = (m - (M-1)/2) * spacing.
    inline ArrayGeometry make_ula(std::size_t count, double spacing, double wave_speed)
    {
        if (count < 2)
            throw invalid_argument("make_ula: need at least 2 elements");
        if (!(spacing > 0.0))
            throw invalid_argument("make_ula: spacing must be positive");
        Eigen::Matrix3Xd pos = Eigen::Matrix3Xd::Zero(3, Eigen::Index(count));
        for (std::size_t m = 0; m < count; ++m)
            pos(0, Eigen::Index(m)) = (double(m) - 0.5 * double(count - 1)) * spacing;
        return ArrayGeometry(ArrayKind::linear, std::move(pos), wave_speed);
    }

    // Mx x My grid in the x-y plane, element index m = ix * My + iy.
    inline ArrayGeometry make_upa(std::size_t count_x, std::size_t count_y, double dx, double dy, double wave_speed)
    {
        if (count_x < 2 || count_y < 2)
            throw invalid_argument("make_upa: need at least 2 elements per axis");
        if (!(dx > 0.0) || !(dy > 0.0))
            throw invalid_argument("make_upa: spacing must be positive");
        Eigen::Matrix3Xd pos = Eigen::Matrix3Xd::Zero(3, Eigen::Index(count_x * count_y));
        for (std::size_t ix = 0; ix < count_x; ++ix)
            for (std::size_t iy = 0; iy < count_y; ++iy)
            {
                const auto m = Eigen::Index(ix * count_y + iy);
                pos(0, m) = (double(ix) - 0.5 * double(count_x - 1)) * dx;
                pos(1, m) = (double(iy) - 0.5 * double(count_y - 1)) * dy;
            }
        return ArrayGeometry(ArrayKind::planar, std::move(pos), wave_speed);
    }

    // Plane-wave delay of each element relative to the array center, in seconds.
    //   linear: tau_m = x_m sin(theta) / c
    //   planar: tau_m = (x_m sin(theta) cos(phi) + y_m sin(theta) sin(phi)) / c
    inline Eigen::VectorXd delays(const ArrayGeometry &geom, const AngleOfArrival &aoa)
    {
        if (aoa.size() != angle_dims(geom.kind()))
            throw invalid_argument("delays: angle dimensionality does not match array geometry");
        const Eigen::Matrix3Xd &p = geom.positions();
        Eigen::Vector3d dir = Eigen::Vector3d::Zero();
        if (geom.kind() == ArrayKind::linear)
            dir(0) = std::sin(aoa[0]);
        else
        {
            dir(0) = std::sin(aoa[0]) * std::cos(aoa[1]);
            dir(1) = std::sin(aoa[0]) * std::sin(aoa[1]);
        }
        return (p.transpose() * dir) / geom.wave_speed();
    }

    struct DelayRange
    {
        double min = 0.0;     // smallest tau_m over the interval
        double max = 0.0;     // largest tau_m over the interval
        double spread = 0.0;  // largest (max_m tau_m - min_m tau_m) seen at any single angle
        double max_abs = 0.0; // largest |tau_m|
    };

    inline constexpr std::size_t delay_scan_points = 64;

    // Delay statistics over a uniform scan of the interval (64 points per dimension).
    inline DelayRange delay_range(const ArrayGeometry &geom, const UncertaintyInterval &interval)
    {
        if (interval.size() != angle_dims(geom.kind()))
            throw invalid_argument("delay_range: interval dimensionality does not match array geometry");
        DelayRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0, 0.0};
        const std::size_t n = delay_scan_points;
        const std::size_t n2 = interval.size() == 2 ? n : 1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n2; ++j)
            {
                const std::array<double, 2> u{double(i) / double(n - 1), n2 > 1 ? double(j) / double(n2 - 1) : 0.0};
                const Eigen::VectorXd tau = delays(geom, interval.at(std::span<const double>(u.data(), interval.size())));
                const double lo = tau.minCoeff(), hi = tau.maxCoeff();
                r.min = std::min(r.min, lo);
                r.max = std::max(r.max, hi);
                r.spread = std::max(r.spread, hi - lo);
                r.max_abs = std::max(r.max_abs, tau.cwiseAbs().maxCoeff());
            }
        return r;
    }

    // Time extent any basis function is evaluated over: snapshot span plus the delay excursion over the interval.
    inline double aperture(const ArrayGeometry &geom, const UncertaintyInterval &interval, double snapshot_span)
    {
        if (!(snapshot_span >= 0.0))
            throw invalid_argument("aperture: snapshot span must be non-negative");
        const DelayRange r = delay_range(geom, interval);
        return snapshot_span + (r.max - r.min);
    }

} // namespace rbb

#endif
