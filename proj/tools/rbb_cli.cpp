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

#include "rbb/harness/config.hpp"
#include "rbb/harness/experiment.hpp"
#include "rbb/harness/results.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{
    int run_command(const std::string &config_path, const std::string &preset_name, const std::vector<double> &snr,
                    std::optional<std::size_t> trials, std::optional<std::uint64_t> seed, const std::string &out,
                    const std::string &cache_dir, std::size_t threads, bool timing)
    {
        using namespace rbb::harness;
        ExperimentConfig cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
        if (!snr.empty())
            cfg.snr_db = snr;
        if (trials)
            cfg.trials = *trials;
        if (seed)
            cfg.seed = *seed;
        cfg.validate();

        SweepOptions opts;
        opts.threads = threads;
        if (!cache_dir.empty())
            opts.cache_dir = cache_dir;
        const auto rows = tabulate(run_sweep(cfg, opts), timing);
        if (out.empty() || out == "-")
            write_csv(std::cout, rows, timing);
        else
            write_csv_file(out, rows, timing);
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rbb: broadband beamforming experiments over an uncertain angle of arrival"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out = "results.csv", cache_dir;
    std::vector<double> snr;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    bool timing = false;

    auto *run = app.add_subcommand("run", "run a Monte-Carlo sweep and write per-trial and mean rows as CSV");
    auto *cfg_opt = run->add_option("--config", config_path, "JSON scenario file")->check(CLI::ExistingFile);
    run->add_option("--preset", preset_name, "built-in scenario (ula-broadband, upa-broadband)")->excludes(cfg_opt);
    run->add_option("--snr", snr, "nominal SNR ladder in dB, overrides the config")->delimiter(',');
    run->add_option("--trials", trials, "trials per SNR point");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out, "output CSV path, '-' for stdout")->capture_default_str();
    run->add_option("--cache-dir", cache_dir, "basis/embedding cache directory (default: $RBB_CACHE_DIR)");
    run->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();
    run->add_flag("--timing", timing, "append a wall_time_s column (output is then not reproducible)");

    std::string in_path, out_dir = "figs";
    auto *figures = app.add_subcommand("figures", "aggregate a results file into per-figure CSV tables");
    figures->add_option("--in", in_path, "results CSV from `run`")->required();
    figures->add_option("--out-dir", out_dir, "output directory")->capture_default_str();

    auto *presets = app.add_subcommand("presets", "list built-in scenarios, or print one as JSON");
    std::string show;
    presets->add_option("name", show, "preset to print");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            if (config_path.empty() && preset_name.empty())
            {
                std::cerr << "rbb run: one of --config or --preset is required\n";
                return 2;
            }
            return run_command(config_path, preset_name, snr, trials, seed, out, cache_dir, threads, timing);
        }
        if (*figures)
        {
            for (const auto &p : rbb::harness::write_figures(rbb::harness::read_csv_file(in_path), out_dir))
                std::cout << p.string() << '\n';
            return 0;
        }
        if (*presets)
        {
            if (show.empty())
            {
                for (const auto &n : rbb::harness::preset_names())
                    std::cout << n << '\n';
                return 0;
            }
            const char *text = rbb::harness::preset_text(show);
            if (!text)
            {
                std::cerr << "rbb presets: unknown preset '" << show << "'\n";
                return 2;
            }
            std::cout << text;
            return 0;
        }
    }
    catch (const rbb::harness::config_error &e)
    {
        std::cerr << "rbb: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "rbb: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
