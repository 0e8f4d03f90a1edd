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

#ifndef RBB_HARNESS_EXPERIMENT_HPP
#define RBB_HARNESS_EXPERIMENT_HPP

#include "rbb/baselines.hpp"
#include "rbb/bilinear.hpp"
#include "rbb/cache.hpp"
#include "rbb/embedding.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/harness/config.hpp"
#include "rbb/simulate.hpp"
#include "rbb/slepian.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace rbb::harness
{
    // Everything that depends on the uncertainty interval but not on the trial.
    struct Scenario
    {
        std::size_t delta_index = 0;
        UncertaintyInterval interval;
        ArrayGeometry geometry;
        SamplingPlan plan;
        SlepianBasis basis;
        EmbeddingBasis embedding;
    };

    struct TrialResult
    {
        std::string method;
        std::size_t delta_index = 0;
        double delta = 0.0; // half width of the first angle dimension
        double snr_db = 0.0;
        std::size_t trial = 0;
        std::optional<double> nmse;
        std::optional<double> beamformed_snr_db;
        std::optional<double> iterations;
        std::optional<double> theta_error;
        std::string status = "ok";
        double wall_time = 0.0;
    };

    namespace detail
    {
        inline std::optional<std::filesystem::path> cache_dir_from_env()
        {
            if (const char *v = std::getenv("RBB_CACHE_DIR"); v && *v)
                return std::filesystem::path(v);
            return std::nullopt;
        }

        inline std::string status_of(const std::exception &e)
        {
            if (dynamic_cast<const rank_deficiency *>(&e))
                return "rank_deficiency";
            if (dynamic_cast<const disambiguation_failure *>(&e))
                return "disambiguation_failure";
            if (dynamic_cast<const degenerate_solution *>(&e))
                return "degenerate_solution";
            if (dynamic_cast<const numeric_failure *>(&e))
                return "numeric_failure";
            if (dynamic_cast<const out_of_domain *>(&e))
                return "out_of_domain";
            return "error";
        }
    } // namespace detail

    inline Scenario prepare_scenario(const ExperimentConfig &cfg, std::size_t delta_index, const DumpCache *cache = nullptr)
    {
        const ArrayGeometry geom = cfg.make_geometry();
        const SamplingPlan plan = SamplingPlan::uniform(cfg.snapshots, cfg.effective_sample_rate());
        const UncertaintyInterval interval = cfg.interval(delta_index);
        const DelayRange dr = delay_range(geom, interval);
        const double lo = plan.front() - dr.max_abs;
        const double hi = plan.back() + dr.max_abs;
        const std::size_t K = default_K(cfg.bandlimit, aperture(geom, interval, plan.span()), cfg.guard);

        const std::string bkey = slepian_key(cfg.bandlimit, lo, hi, K, cfg.oversampling);
        auto make_basis = [&] { return build_slepian_basis(cfg.bandlimit, lo, hi, K, cfg.oversampling); };
        SlepianBasis basis = cache ? cache->slepian(bkey, make_basis) : make_basis();

        const std::string ekey = embedding_key(geom, bkey, plan, cfg.carrier, interval, cfg.grid_points, cfg.rank_rule);
        auto make_embedding = [&] {
            return truncated_embedding(build_W(geom, basis, plan, cfg.carrier, sample_grid(interval, cfg.grid_points)), cfg.rank_rule);
        };
        EmbeddingBasis emb = cache ? cache->embedding(ekey, make_embedding) : make_embedding();
        return Scenario{delta_index, interval, geom, plan, std::move(basis), std::move(emb)};
    }

    inline AngleOfArrival place_true_aoa(const ExperimentConfig &cfg, const UncertaintyInterval &interval, std::size_t delta_index,
                                         std::size_t trial)
    {
        switch (cfg.placement)
        {
        case PlacementRule::fixed:
            return AngleOfArrival::from_values(cfg.placement_value);
        case PlacementRule::center:
            return interval.midpoint();
        case PlacementRule::edge:
        {
            std::vector<double> u(interval.size(), 1.0);
            return interval.at(u);
        }
        case PlacementRule::uniform:
            break;
        }
        Rng rng(derive_seed(cfg.seed, {3, delta_index, trial}));
        std::vector<double> u(interval.size());
        for (auto &x : u)
            x = rng.uniform();
        return interval.at(u);
    }

    // All methods on one (interval, SNR, trial) cell. The source signal depends only on the trial
    // and the noise only on (trial, SNR), so methods and intervals see the same data.
    inline std::vector<TrialResult> run_trial(const ExperimentConfig &cfg, const Scenario &sc, std::size_t snr_index,
                                              std::size_t trial)
    {
        const double snr = cfg.snr_db.at(snr_index);
        const AngleOfArrival theta = place_true_aoa(cfg, sc.interval, sc.delta_index, trial);
        Rng sig_rng(derive_seed(cfg.seed, {1, trial}));
        const SignalSpec spec = gen_signal(cfg.bandlimit, cfg.num_tones, cfg.carrier, sig_rng);
        const ArrayMeasurement meas =
            sample_array(sc.geometry, spec, sc.plan, theta, snr, derive_seed(cfg.seed, {2, trial, snr_index}));
        const VectorXc s_ref = spec.values(sc.plan.times());
        const VectorXc alpha_true = true_alpha(sc.geometry, sc.basis, sc.plan, cfg.carrier, theta, meas.clean);

        std::vector<TrialResult> out;
        auto base = [&](const std::string &label) {
            TrialResult r;
            r.method = label;
            r.delta_index = sc.delta_index;
            r.delta = sc.interval.half_width(0);
            r.snr_db = snr;
            r.trial = trial;
            return r;
        };
        auto score_alpha = [&](TrialResult &r, const VectorXc &alpha) {
            r.nmse = nmse(alpha, alpha_true);
            r.beamformed_snr_db = beamformed_snr(synthesize(sc.basis, alpha, sc.plan.times()), s_ref);
        };

        for (const auto &label : cfg.method_labels())
        {
            TrialResult r = base(label);
            const auto t0 = std::chrono::steady_clock::now();
            try
            {
                if (label == "oracle")
                    score_alpha(r, ls_recover(forward_matrix(sc.geometry, sc.basis, sc.plan, cfg.carrier, theta), meas.y));
                else if (label == "crude")
                    score_alpha(r, crude_linear(meas.y, sc.geometry, sc.basis, sc.plan, cfg.carrier, sc.interval));
                else if (label == "bilinear")
                {
                    AltMinOptions opts;
                    opts.max_iters = cfg.max_iters;
                    opts.rel_tol = cfg.rel_tol;
                    const BilinearSolution sol = solve_altmin(sc.embedding, meas.y, opts);
                    r.iterations = double(sol.iterations);
                    r.theta_error = angle_distance(sol.theta_hat, theta);
                    score_alpha(r, sol.alpha_corrected);
                    if (!sol.converged)
                        r.status = "max_iters";
                }
                else
                {
                    const bool crude = label.starts_with("das-crude-R");
                    DelayAndSumConfig dc;
                    dc.taps = std::stoul(label.substr(label.rfind('R') + 1));
                    dc.sample_rate = sc.plan.rate();
                    dc.steering = crude ? sc.interval.midpoint() : theta;
                    r.beamformed_snr_db = beamformed_snr(delay_and_sum(meas.y, sc.geometry, sc.plan, cfg.carrier, dc), s_ref);
                }
            }
            catch (const std::exception &e)
            {
                r.nmse.reset();
                r.beamformed_snr_db.reset();
                r.status = detail::status_of(e);
            }
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.push_back(std::move(r));
        }
        return out;
    }

    struct SweepOptions
    {
        std::size_t threads = 1; // 0 selects hardware concurrency
        std::optional<std::filesystem::path> cache_dir; // falls back to RBB_CACHE_DIR
    };

    struct SweepResult
    {
        std::vector<TrialResult> rows; // canonical order: method, delta, snr, trial
        std::vector<std::string> methods;
    };

    inline SweepResult run_sweep(const ExperimentConfig &cfg, const SweepOptions &opts = {})
    {
        cfg.validate();
        std::optional<DumpCache> cache;
        if (auto dir = opts.cache_dir ? opts.cache_dir : detail::cache_dir_from_env())
            cache.emplace(*dir);

        std::vector<Scenario> scenarios;
        for (std::size_t d = 0; d < cfg.half_widths.size(); ++d)
            scenarios.push_back(prepare_scenario(cfg, d, cache ? &*cache : nullptr));

        const std::size_t S = cfg.snr_db.size(), T = cfg.trials;
        const std::size_t cells = scenarios.size() * S * T;
        std::vector<std::vector<TrialResult>> by_cell(cells);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < cells;)
            {
                try
                {
                    const std::size_t d = i / (S * T), s = (i / T) % S, t = i % T;
                    by_cell[i] = run_trial(cfg, scenarios[d], s, t);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        };
        std::size_t nthreads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
        nthreads = std::min(nthreads, std::max<std::size_t>(cells, 1));
        if (nthreads <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t k = 0; k < nthreads; ++k)
                pool.emplace_back(worker);
        }
        if (failure)
            std::rethrow_exception(failure);

        SweepResult res;
        res.methods = cfg.method_labels();
        for (std::size_t m = 0; m < res.methods.size(); ++m)
            for (auto &cell : by_cell)
                res.rows.push_back(cell.at(m));
        return res;
    }

} // namespace rbb::harness

#endif
