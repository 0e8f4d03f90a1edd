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

#include "rbb/harness/config.hpp"
#include "rbb/harness/experiment.hpp"
#include "rbb/harness/results.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace rbb;
using namespace rbb::harness;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            std::random_device rd;
            path = fs::temp_directory_path() / ("rbb-harness-test-" + std::to_string(rd()) + std::to_string(rd()));
            fs::create_directories(path);
        }
        ~TempDir()
        {
            std::error_code ec;
            fs::remove_all(path, ec);
        }
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    int cli(const std::string &args)
    {
        const std::string cmd = std::string("'") + RBB_CLI_PATH + "' " + args + " >/dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    ExperimentConfig small_config()
    {
        ExperimentConfig cfg = preset("ula-broadband");
        cfg.half_widths = {{std::numbers::pi / 40}};
        cfg.methods = {"oracle", "bilinear"};
        cfg.snr_db = {10.0, 20.0, 30.0};
        cfg.trials = 2;
        cfg.grid_points = 16;
        return cfg;
    }

    const char *small_json = R"({
  // comments are allowed
  "name": "small",
  "geometry": {"kind": "ula", "elements": 8},
  "snapshots": 16,
  "interval": {"center": 0.5, "half_widths": [0.05]},
  "true_aoa": {"rule": "uniform"},
  "methods": ["oracle", "crude", "bilinear", "das"],
  "das": {"taps": [5]},
  "embedding": {"grid_points": 16},
  "snr_db": [10, 30, "inf"],
  "trials": 3,
  "seed": 11
})";
}

TEST_CASE("config parsing", "[harness]")
{
    const ExperimentConfig c = parse_config_text(small_json);
    CHECK(c.name == "small");
    CHECK(c.geometry.elements_x == 8);
    CHECK(c.dims() == 1);
    CHECK(c.center == std::vector<double>{0.5});
    REQUIRE(c.half_widths.size() == 1);
    CHECK(c.half_widths[0] == std::vector<double>{0.05});
    CHECK(c.placement == PlacementRule::uniform);
    CHECK(std::isinf(c.snr_db.back()));
    CHECK(c.effective_sample_rate() == 2 * c.bandlimit);
    CHECK(c.spacing_x() == Catch::Approx(c.geometry.wave_speed / (2 * c.carrier)));
    CHECK(c.method_labels() == std::vector<std::string>{"oracle", "crude", "bilinear", "das-R5"});
    CHECK(c.trials == 3);
    CHECK(c.seed == 11);

    const ExperimentConfig upa = parse_config_text(R"({"geometry": {"kind": "upa"}, "methods": ["bilinear"]})");
    CHECK(upa.dims() == 2);
    CHECK(upa.make_geometry().element_count() == 16);
    CHECK(upa.center.size() == 2);

    for (const auto &name : preset_names())
    {
        const ExperimentConfig p = preset(name);
        CHECK_NOTHROW(p.validate());
        CHECK(parse_config_text(preset_text(name)).method_labels() == p.method_labels());
    }
    CHECK(preset_text("nope") == nullptr);
    CHECK_THROWS_AS(preset("nope"), config_error);
}

TEST_CASE("config errors", "[harness]")
{
    const char *bad[] = {
        "{",
        R"({"geometry": {"kind": "circle"}})",
        R"({"methods": ["magic"]})",
        R"({"methods": ["das-R5"]})",
        R"({"methods": ["das"], "das": {"taps": [4]}})",
        R"({"methods": ["das"], "das": {"taps": [21]}, "snapshots": 16})",
        R"({"snapshots": 0})",
        R"({"trials": 0})",
        R"({"interval": {"half_widths": [-0.1]}})",
        R"({"interval": {"center": [0.1, 0.2]}})",
        R"({"true_aoa": {"rule": "sideways"}})",
        R"({"true_aoa": {"rule": "fixed"}})",
        R"({"snr_db": ["loud"]})",
        R"({"carrier_hz": -1})",
        R"({"bandlimit_hz": 0})",
        R"({"embedding": {"grid_points": 1}})",
    };
    for (const char *b : bad)
    {
        INFO(b);
        CHECK_THROWS_AS(parse_config_text(b), config_error);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/rbb.json"), config_error);
}

TEST_CASE("sweep row structure and aggregation", "[harness]")
{
    const ExperimentConfig cfg = small_config();
    const SweepResult res = run_sweep(cfg);
    REQUIRE(res.rows.size() == 12);
    for (std::size_t i = 0; i < res.rows.size(); ++i)
    {
        const auto &r = res.rows[i];
        CHECK(r.method == (i < 6 ? "oracle" : "bilinear"));
        CHECK(r.snr_db == cfg.snr_db[(i / 2) % 3]);
        CHECK(r.trial == i % 2);
        REQUIRE(r.nmse);
        CHECK(std::isfinite(*r.nmse));
        if (r.method == "bilinear")
        {
            CHECK(r.iterations);
            CHECK(r.theta_error);
        }
    }

    const auto rows = tabulate(res);
    REQUIRE(rows.size() == 18);
    for (std::size_t g = 0; g < 6; ++g)
    {
        const CsvRow &m = rows[12 + g];
        CHECK(m.kind == "mean");
        CHECK(!m.trial);
        CHECK(m.status == "n=2/2");
        CHECK(m.method == res.rows[2 * g].method);
        CHECK(*m.nmse == Catch::Approx((*res.rows[2 * g].nmse + *res.rows[2 * g + 1].nmse) / 2).epsilon(1e-14));
        CHECK(*m.beamformed_snr_db ==
              Catch::Approx((*res.rows[2 * g].beamformed_snr_db + *res.rows[2 * g + 1].beamformed_snr_db) / 2).epsilon(1e-14));
    }
}

TEST_CASE("sweep edge cases", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {"oracle"};
    cfg.snr_db = {60.0};
    cfg.trials = 4;
    const SweepResult res = run_sweep(cfg);
    REQUIRE(res.rows.size() == 4);
    for (const auto &r : res.rows)
    {
        CHECK(r.status == "ok");
        CHECK(*r.nmse <= 1e-2);
        CHECK(!r.iterations);
    }

    // Signal and noise are shared across methods, so the oracle rows do not depend on what else runs.
    ExperimentConfig more = cfg;
    more.methods = {"crude", "oracle"};
    const SweepResult both = run_sweep(more);
    for (std::size_t t = 0; t < 4; ++t)
        CHECK(both.rows[4 + t].nmse == res.rows[t].nmse);

    ExperimentConfig fixed = cfg;
    fixed.placement = PlacementRule::fixed;
    fixed.placement_value = {cfg.center[0] + 0.1};
    CHECK_THROWS_AS(run_sweep(fixed), config_error);
}

TEST_CASE("sweeps are deterministic across thread counts", "[harness]")
{
    ExperimentConfig cfg = small_config();
    cfg.methods = {"crude", "bilinear", "das", "das-crude"};
    cfg.das_taps = {5, 7};
    const auto one = tabulate(run_sweep(cfg, {.threads = 1, .cache_dir = std::nullopt}));
    const auto three = tabulate(run_sweep(cfg, {.threads = 3, .cache_dir = std::nullopt}));
    std::ostringstream a, b;
    write_csv(a, one);
    write_csv(b, three);
    CHECK(a.str() == b.str());

    cfg.seed = 2;
    std::ostringstream c;
    write_csv(c, tabulate(run_sweep(cfg)));
    CHECK(c.str() != a.str());
}

TEST_CASE("CSV round trip", "[harness]")
{
    std::vector<CsvRow> rows(3);
    rows[0] = {"trial", "das-R5", 0.05, 30.0, 1, 1.5e-3, 25.25, std::nullopt, std::nullopt, "ok", std::nullopt};
    rows[1] = {"trial", "odd, \"name\"", 0.1, std::numeric_limits<double>::infinity(), 0, std::nullopt, -3.0, 12.0, 1e-9,
               "max_iters", std::nullopt};
    rows[2] = {"mean", "das-R5", 0.05, 30.0, std::nullopt, 1.5e-3, 25.25, std::nullopt, std::nullopt, "n=1/1", std::nullopt};
    std::ostringstream os;
    write_csv(os, rows);
    const std::string text = os.str();
    CHECK(text.substr(0, text.find("\r\n")) ==
          "kind,method,delta,snr_db,trial,nmse,beamformed_snr_db,iterations,theta_error_rad,status");
    CHECK(text.find("\"odd, \"\"name\"\"\"") != std::string::npos);

    std::istringstream is(text);
    const auto back = read_csv(is);
    REQUIRE(back.size() == 3);
    CHECK(back[1].method == "odd, \"name\"");
    CHECK(std::isinf(back[1].snr_db));
    CHECK(!back[1].nmse);
    CHECK(back[1].iterations == 12.0);
    CHECK(!back[2].trial);
    CHECK(back[0].trial == 1);
    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == text);

    std::istringstream timed_in([&] {
        std::ostringstream t;
        auto r = rows;
        r[0].wall_time = 0.5;
        write_csv(t, r, true);
        return t.str();
    }());
    CHECK(read_csv(timed_in)[0].wall_time == 0.5);

    std::istringstream bad("kind,method\r\ntrial,x\r\n");
    CHECK_THROWS(read_csv(bad));
}

TEST_CASE("figure tables", "[harness]")
{
    TempDir tmp;
    std::vector<CsvRow> rows;
    for (double snr : {10.0, 20.0})
        for (std::size_t t = 0; t < 2; ++t)
        {
            rows.push_back({"trial", "oracle", 0.05, snr, t, snr * 1e-3 * double(t + 1), snr + double(t), std::nullopt,
                            std::nullopt, "ok", std::nullopt});
            rows.push_back({"trial", "das-R5", 0.05, snr, t, std::nullopt, snr - 1.0, std::nullopt, std::nullopt, "ok",
                            std::nullopt});
        }
    const auto files = write_figures(rows, tmp.path / "figs");
    REQUIRE(files.size() == 2);
    CHECK(slurp(tmp.path / "figs" / "nmse_vs_snr.csv") == "snr_db,oracle delta=0.05\r\n10,0.015\r\n20,0.03\r\n");
    CHECK(slurp(tmp.path / "figs" / "beamformed_snr_vs_snr.csv") ==
          "snr_db,oracle delta=0.05,das-R5 delta=0.05\r\n10,10.5,9\r\n20,20.5,19\r\n");
}

TEST_CASE("command line interface", "[harness][cli]")
{
    TempDir tmp;
    const fs::path cfg = tmp.path / "small.json";
    std::ofstream(cfg) << small_json;
    const std::string base = "run --config '" + cfg.string() + "' --trials 2 --snr 10,30";

    REQUIRE(cli(base + " --out '" + (tmp.path / "a.csv").string() + "'") == 0);
    REQUIRE(cli(base + " --threads 2 --out '" + (tmp.path / "b.csv").string() + "' --cache-dir '" + (tmp.path / "cache").string() + "'") == 0);
    REQUIRE(cli(base + " --out '" + (tmp.path / "c.csv").string() + "' --cache-dir '" + (tmp.path / "cache").string() + "'") == 0);
    const std::string a = slurp(tmp.path / "a.csv");
    CHECK(a == slurp(tmp.path / "b.csv"));
    CHECK(a == slurp(tmp.path / "c.csv"));
    std::istringstream is(a);
    const auto rows = read_csv(is);
    CHECK(rows.size() == 4 * 2 * 2 + 4 * 2);

    CHECK(cli("figures --in '" + (tmp.path / "a.csv").string() + "' --out-dir '" + (tmp.path / "figs").string() + "'") == 0);
    CHECK(fs::exists(tmp.path / "figs" / "nmse_vs_snr.csv"));
    CHECK(fs::exists(tmp.path / "figs" / "beamformed_snr_vs_snr.csv"));

    CHECK(cli("presets") == 0);
    CHECK(cli("presets ula-broadband") == 0);
    CHECK(cli("presets nope") == 2);
    CHECK(cli("run") == 2);
    CHECK(cli("run --config /nonexistent.json") != 0);
    CHECK(cli("frobnicate") != 0);
    std::ofstream(tmp.path / "bad.json") << R"({"methods": ["magic"]})";
    CHECK(cli("run --config '" + (tmp.path / "bad.json").string() + "'") == 2);
    CHECK(cli("figures --in '" + (tmp.path / "missing.csv").string() + "'") != 0);
}
