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

#ifndef RBB_SIMULATE_HPP
#define RBB_SIMULATE_HPP

#include "rbb/errors.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/linalg.hpp"
#include "rbb/slepian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace rbb
{
    // splitmix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Stream-splitting rule: fold each tag into the master seed through mix64.
    inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept
    {
        std::uint64_t s = mix64(master);
        for (auto t : tags)
            s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
        return s;
    }

    // mt19937_64 with distributions written out explicitly so draws do not depend on the
    // standard library's distribution implementations.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Circular complex Gaussian with E|z|^2 = variance (Box-Muller).
        cplx complex_normal(double variance)
        {
            const double u1 = 1.0 - uniform(); // (0, 1]
            const double u2 = uniform();
            const double r = std::sqrt(-std::log(u1) * variance);
            return std::polar(r, 2.0 * std::numbers::pi * u2);
        }

    private:
        std::mt19937_64 engine_;
    };

    // Sum of complex exponentials s(t) = sum_i a_i exp(j 2 pi f_i t).
    struct SignalSpec
    {
        double bandlimit = 0.0;
        double carrier = 0.0;
        std::vector<double> frequencies;
        std::vector<cplx> amplitudes;

        cplx value(double t) const
        {
            cplx s{0.0, 0.0};
            for (std::size_t i = 0; i < frequencies.size(); ++i)
                s += amplitudes[i] * std::polar(1.0, 2.0 * std::numbers::pi * frequencies[i] * t);
            return s;
        }

        VectorXc values(std::span<const double> times) const
        {
            VectorXc out(Eigen::Index(times.size()));
            for (std::size_t j = 0; j < times.size(); ++j)
                out(Eigen::Index(j)) = value(times[j]);
            return out;
        }
    };

    // Frequencies uniform on [-bandlimit, bandlimit], unit-modulus amplitudes with uniform phase.
    inline SignalSpec gen_signal(double bandlimit, std::size_t num_tones, double carrier, Rng &rng)
    {
        if (num_tones < 1)
            throw invalid_argument("gen_signal: at least one tone required");
        if (!(bandlimit > 0.0))
            throw invalid_argument("gen_signal: bandlimit must be positive");
        SignalSpec spec;
        spec.bandlimit = bandlimit;
        spec.carrier = carrier;
        for (std::size_t i = 0; i < num_tones; ++i)
        {
            spec.frequencies.push_back(rng.uniform(-bandlimit, bandlimit));
            spec.amplitudes.push_back(std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform()));
        }
        return spec;
    }

    inline constexpr double noiseless = std::numeric_limits<double>::infinity();

    struct ArrayMeasurement
    {
        VectorXc y;     // noisy samples, row_index(m, n) ordering
        VectorXc clean; // noise-free samples
        double nominal_snr_db = noiseless;
        double noise_variance = 0.0;
        std::uint64_t rng_seed = 0;
        AngleOfArrival true_aoa;
    };

    // y_m[n] = exp(-j 2 pi fc tau_m) s(t_n - tau_m) + noise, evaluated from the tone model directly.
    // Noise variance is the mean clean power over all MN samples divided by 10^(snr/10); pass
    // `noiseless` (+inf) to disable noise.
    inline ArrayMeasurement sample_array(const ArrayGeometry &geom, const SignalSpec &spec, const SamplingPlan &plan,
                                         const AngleOfArrival &true_aoa, double nominal_snr_db, std::uint64_t seed)
    {
        const Eigen::VectorXd tau = delays(geom, true_aoa);
        const std::size_t M = geom.element_count();
        ArrayMeasurement meas;
        meas.clean.resize(Eigen::Index(M * plan.size()));
        for (std::size_t n = 0; n < plan.size(); ++n)
            for (std::size_t m = 0; m < M; ++m)
            {
                const double tm = tau(Eigen::Index(m));
                meas.clean(Eigen::Index(row_index(m, n, M))) =
                    std::polar(1.0, -2.0 * std::numbers::pi * spec.carrier * tm) * spec.value(plan.times()[n] - tm);
            }
        meas.nominal_snr_db = nominal_snr_db;
        meas.rng_seed = seed;
        meas.true_aoa = true_aoa;
        meas.y = meas.clean;
        if (std::isinf(nominal_snr_db) && nominal_snr_db > 0.0)
            return meas;
        if (!std::isfinite(nominal_snr_db))
            throw invalid_argument("sample_array: nominal SNR must be finite or +inf");

        const double power = meas.clean.squaredNorm() / double(meas.clean.size());
        meas.noise_variance = power / std::pow(10.0, nominal_snr_db / 10.0);
        Rng rng(seed);
        for (Eigen::Index i = 0; i < meas.y.size(); ++i)
            meas.y(i) += rng.complex_normal(meas.noise_variance);
        return meas;
    }

    // Known-angle, noise-free benchmark coefficients.
    inline VectorXc true_alpha(const ArrayGeometry &geom, const SlepianBasis &basis, const SamplingPlan &plan, double carrier,
                               const AngleOfArrival &true_aoa, const VectorXc &clean_y)
    {
        return ls_recover(forward_matrix(geom, basis, plan, carrier, true_aoa), clean_y);
    }

    // ||alpha_hat - alpha_true|| / ||alpha_true||
    inline double nmse(const VectorXc &alpha_hat, const VectorXc &alpha_true)
    {
        if (alpha_hat.size() != alpha_true.size())
            throw invalid_argument("nmse: length mismatch");
        const double ref = alpha_true.norm();
        if (!(ref > 0.0))
            throw invalid_argument("nmse: alpha_true is zero");
        return (alpha_hat - alpha_true).norm() / ref;
    }

    inline constexpr double beamformed_snr_cap_db = 300.0;

    // 10 log10(||s_ref||^2 / ||s_hat - s_ref||^2), capped at 300 dB.
    inline double beamformed_snr(const VectorXc &s_hat, const VectorXc &s_ref)
    {
        if (s_hat.size() != s_ref.size())
            throw invalid_argument("beamformed_snr: length mismatch");
        const double sig = s_ref.squaredNorm();
        if (!(sig > 0.0))
            throw invalid_argument("beamformed_snr: reference signal is zero");
        const double err = (s_hat - s_ref).squaredNorm();
        if (err == 0.0)
            return beamformed_snr_cap_db;
        return std::min(beamformed_snr_cap_db, 10.0 * std::log10(sig / err));
    }

} // namespace rbb

#endif
