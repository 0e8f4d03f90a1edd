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

#ifndef RBB_HARNESS_CONFIG_HPP
#define RBB_HARNESS_CONFIG_HPP

#include "rbb/embedding.hpp"
#include "rbb/errors.hpp"
#include "rbb/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace rbb::harness
{
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct GeometrySpec
    {
        ArrayKind kind = ArrayKind::linear;
        std::size_t elements_x = 16;
        std::size_t elements_y = 1;
        double spacing_x = 0.0; // meters; 0 selects half a carrier wavelength
        double spacing_y = 0.0;
        double wave_speed = 3.0e8;
    };

    enum class PlacementRule
    {
        fixed,   // `value`
        center,  // interval midpoint
        edge,    // upper corner of the interval (center + half width in every dimension)
        uniform  // uniform in the interval box, drawn per trial
    };

    struct ExperimentConfig
    {
        std::string name = "custom";
        GeometrySpec geometry;
        double carrier = 10e9;
        double bandlimit = 2.5e9;
        std::size_t snapshots = 16;
        double sample_rate = 0.0; // 0 selects 2 * bandlimit
        std::vector<double> center{std::numbers::pi / 6};
        std::vector<std::vector<double>> half_widths{{std::numbers::pi / 40}};
        PlacementRule placement = PlacementRule::uniform;
        std::vector<double> placement_value;
        std::vector<std::string> methods{"oracle", "crude", "bilinear"};
        std::vector<std::size_t> das_taps{21};
        std::size_t num_tones = 8;
        std::size_t guard = 8;
        double oversampling = 32.0;
        std::size_t grid_points = 64;
        RankRule rank_rule = RankRule::relative(1e-3);
        std::size_t max_iters = 50;
        double rel_tol = 1e-8;
        std::vector<double> snr_db{0, 10, 20, 30, 40};
        std::size_t trials = 50;
        std::uint64_t seed = 1;

        std::size_t dims() const { return center.size(); }
        double effective_sample_rate() const { return sample_rate > 0.0 ? sample_rate : 2.0 * bandlimit; }
        double spacing_x() const { return geometry.spacing_x > 0.0 ? geometry.spacing_x : geometry.wave_speed / (2.0 * carrier); }
        double spacing_y() const { return geometry.spacing_y > 0.0 ? geometry.spacing_y : geometry.wave_speed / (2.0 * carrier); }

        ArrayGeometry make_geometry() const
        {
            if (geometry.kind == ArrayKind::linear)
                return make_ula(geometry.elements_x, spacing_x(), geometry.wave_speed);
            return make_upa(geometry.elements_x, geometry.elements_y, spacing_x(), spacing_y(), geometry.wave_speed);
        }

        UncertaintyInterval interval(std::size_t delta_index) const
        {
            return UncertaintyInterval(AngleOfArrival::from_values(center), half_widths.at(delta_index));
        }

        // Method labels in output order, with delay-and-sum expanded per tap count.
        std::vector<std::string> method_labels() const
        {
            std::vector<std::string> out;
            for (const auto &m : methods)
            {
                if (m == "das" || m == "das-crude")
                    for (auto r : das_taps)
                        out.push_back(m + "-R" + std::to_string(r));
                else
                    out.push_back(m);
            }
            return out;
        }

        void validate() const
        {
            auto fail = [](const std::string &msg) { throw config_error("config: " + msg); };
            const std::size_t want = geometry.kind == ArrayKind::linear ? 1 : 2;
            if (geometry.elements_x < 2 || (geometry.kind == ArrayKind::planar && geometry.elements_y < 2))
                fail("geometry needs at least 2 elements per axis");
            if (!(geometry.wave_speed > 0.0) || geometry.spacing_x < 0.0 || geometry.spacing_y < 0.0)
                fail("geometry spacing and wave speed must be positive");
            if (!(carrier > 0.0) || !(bandlimit > 0.0))
                fail("carrier_hz and bandlimit_hz must be positive");
            if (snapshots < 1)
                fail("snapshots must be at least 1");
            if (sample_rate < 0.0)
                fail("sample_rate_hz must be positive");
            if (center.size() != want)
                fail("interval.center must have " + std::to_string(want) + " angle(s) for this geometry");
            if (half_widths.empty())
                fail("interval.half_widths must not be empty");
            for (const auto &h : half_widths)
            {
                if (h.size() != want)
                    fail("each half width needs " + std::to_string(want) + " entries");
                for (double v : h)
                    if (!(v > 0.0))
                        fail("half widths must be positive");
            }
            if (placement == PlacementRule::fixed)
            {
                if (placement_value.size() != want)
                    fail("true_aoa.value must have " + std::to_string(want) + " angle(s)");
                for (std::size_t d = 0; d < half_widths.size(); ++d)
                    if (!interval(d).contains(AngleOfArrival::from_values(placement_value)))
                        fail("fixed true AOA lies outside an uncertainty interval");
            }
            if (methods.empty())
                fail("methods must not be empty");
            for (const auto &m : methods)
                if (m != "oracle" && m != "crude" && m != "bilinear" && m != "das" && m != "das-crude")
                    fail("unknown method '" + m + "'");
            const bool uses_das = std::find(methods.begin(), methods.end(), "das") != methods.end() ||
                                  std::find(methods.begin(), methods.end(), "das-crude") != methods.end();
            if (uses_das && das_taps.empty())
                fail("das.taps must not be empty");
            for (auto r : uses_das ? das_taps : std::vector<std::size_t>{})
                if (r < 1 || r % 2 == 0 || r > snapshots)
                    fail("das taps must be odd and no larger than the snapshot count");
            if (num_tones < 1)
                fail("num_tones must be at least 1");
            if (!(oversampling >= 4.0))
                fail("slepian.oversampling must be at least 4");
            if (grid_points < 2)
                fail("embedding.grid_points must be at least 2");
            if (rank_rule.fixed_rank == 0 && !(rank_rule.tolerance > 0.0 && rank_rule.tolerance < 1.0))
                fail("embedding.rank_rule.tol must lie in (0, 1)");
            if (max_iters < 1 || !(rel_tol > 0.0))
                fail("solver.max_iters must be >= 1 and solver.rel_tol > 0");
            if (snr_db.empty())
                fail("snr_db must not be empty");
            for (double v : snr_db)
                if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
                    fail("snr_db entries must be finite or \"inf\"");
            if (trials < 1)
                fail("trials must be at least 1");
        }
    };

    namespace detail
    {
        inline std::vector<double> as_angles(const nlohmann::json &j, std::size_t dims)
        {
            if (j.is_number())
                return std::vector<double>(dims, j.get<double>());
            return j.get<std::vector<double>>();
        }
    } // namespace detail

    // JSON schema (all keys optional unless noted):
    //   name, carrier_hz, bandlimit_hz, snapshots, sample_rate_hz, num_tones, trials, seed, snr_db[dB | "inf"]
    //   geometry { kind: "ula"|"upa", elements | elements_x, elements_y, spacing_m | spacing_x_m, spacing_y_m, wave_speed }
    //   interval { center: [rad...], half_widths: [ rad | [rad...] , ... ] }
    //   true_aoa { rule: "fixed"|"center"|"edge"|"uniform", value: [rad...] }
    //   methods [ "oracle" | "crude" | "bilinear" | "das" | "das-crude" ], das { taps: [R...] }
    //   slepian { guard, oversampling }
    //   embedding { grid_points, rank_rule { tol } | { rank } }
    //   solver { max_iters, rel_tol }
    inline ExperimentConfig parse_config(const nlohmann::json &j)
    {
        ExperimentConfig c;
        try
        {
            c.name = j.value("name", c.name);
            if (j.contains("geometry"))
            {
                const auto &g = j["geometry"];
                const std::string kind = g.value("kind", "ula");
                if (kind == "ula")
                {
                    c.geometry.kind = ArrayKind::linear;
                    c.geometry.elements_x = g.value("elements", c.geometry.elements_x);
                    c.geometry.elements_y = 1;
                    c.geometry.spacing_x = g.value("spacing_m", 0.0);
                }
                else if (kind == "upa")
                {
                    c.geometry.kind = ArrayKind::planar;
                    c.geometry.elements_x = g.value("elements_x", std::size_t(4));
                    c.geometry.elements_y = g.value("elements_y", std::size_t(4));
                    c.geometry.spacing_x = g.value("spacing_x_m", 0.0);
                    c.geometry.spacing_y = g.value("spacing_y_m", 0.0);
                }
                else
                    throw config_error("config: geometry.kind must be 'ula' or 'upa'");
                c.geometry.wave_speed = g.value("wave_speed", c.geometry.wave_speed);
            }
            const std::size_t dims = c.geometry.kind == ArrayKind::linear ? 1 : 2;
            if (c.geometry.kind == ArrayKind::planar)
            {
                c.center = {std::numbers::pi / 4, std::numbers::pi / 3};
                c.half_widths = {{std::numbers::pi / 40, std::numbers::pi / 40}};
            }
            c.carrier = j.value("carrier_hz", c.carrier);
            c.bandlimit = j.value("bandlimit_hz", c.bandlimit);
            c.snapshots = j.value("snapshots", c.snapshots);
            c.sample_rate = j.value("sample_rate_hz", c.sample_rate);
            if (j.contains("interval"))
            {
                const auto &iv = j["interval"];
                if (iv.contains("center"))
                    c.center = detail::as_angles(iv["center"], dims);
                if (iv.contains("half_widths"))
                {
                    c.half_widths.clear();
                    for (const auto &h : iv["half_widths"])
                        c.half_widths.push_back(detail::as_angles(h, dims));
                }
            }
            if (j.contains("true_aoa"))
            {
                const auto &t = j["true_aoa"];
                const std::string rule = t.value("rule", "uniform");
                if (rule == "fixed")
                    c.placement = PlacementRule::fixed;
                else if (rule == "center")
                    c.placement = PlacementRule::center;
                else if (rule == "edge")
                    c.placement = PlacementRule::edge;
                else if (rule == "uniform")
                    c.placement = PlacementRule::uniform;
                else
                    throw config_error("config: unknown true_aoa.rule '" + rule + "'");
                if (t.contains("value"))
                    c.placement_value = detail::as_angles(t["value"], dims);
            }
            if (j.contains("methods"))
                c.methods = j["methods"].get<std::vector<std::string>>();
            if (j.contains("das"))
                c.das_taps = j["das"].value("taps", c.das_taps);
            c.num_tones = j.value("num_tones", c.num_tones);
            if (j.contains("slepian"))
            {
                c.guard = j["slepian"].value("guard", c.guard);
                c.oversampling = j["slepian"].value("oversampling", c.oversampling);
            }
            if (j.contains("embedding"))
            {
                const auto &e = j["embedding"];
                c.grid_points = e.value("grid_points", c.grid_points);
                if (e.contains("rank_rule"))
                {
                    const auto &r = e["rank_rule"];
                    if (r.contains("rank"))
                        c.rank_rule = RankRule::fixed(r["rank"].get<std::size_t>());
                    else
                        c.rank_rule = RankRule::relative(r.value("tol", 1e-3));
                }
            }
            if (j.contains("solver"))
            {
                c.max_iters = j["solver"].value("max_iters", c.max_iters);
                c.rel_tol = j["solver"].value("rel_tol", c.rel_tol);
            }
            if (j.contains("snr_db"))
            {
                c.snr_db.clear();
                for (const auto &v : j["snr_db"])
                {
                    if (v.is_string() && (v == "inf" || v == "noiseless"))
                        c.snr_db.push_back(std::numeric_limits<double>::infinity());
                    else
                        c.snr_db.push_back(v.get<double>());
                }
            }
            c.trials = j.value("trials", c.trials);
            c.seed = j.value("seed", c.seed);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw config_error(std::string("config: ") + e.what());
        }
        c.validate();
        return c;
    }

    inline ExperimentConfig parse_config_text(const std::string &text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(text, nullptr, true, true);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw config_error(std::string("config: parse error: ") + e.what());
        }
        return parse_config(j);
    }

    inline ExperimentConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw config_error("cannot open config file " + path.string());
        std::stringstream ss;
        ss << f.rdbuf();
        try
        {
            return parse_config_text(ss.str());
        }
        catch (const config_error &e)
        {
            throw config_error(path.string() + ": " + e.what());
        }
    }

    // Desk-scale scenarios; same text as presets/*.json in the repository.
    inline const char *preset_text(const std::string &name)
    {
        if (name == "ula-broadband")
            return R"({
  "name": "ula-broadband",
  "geometry": { "kind": "ula", "elements": 16, "wave_speed": 3.0e8 },
  "carrier_hz": 10.0e9,
  "bandlimit_hz": 2.5e9,
  "snapshots": 16,
  "interval": { "center": [0.5235987755982988],
                "half_widths": [0.05235987755982988, 0.07853981633974483, 0.15707963267948966] },
  "true_aoa": { "rule": "uniform" },
  "methods": ["oracle", "crude", "bilinear", "das", "das-crude"],
  "das": { "taps": [11, 15] },
  "num_tones": 8,
  "slepian": { "guard": 8, "oversampling": 32 },
  "embedding": { "grid_points": 64, "rank_rule": { "tol": 1e-3 } },
  "solver": { "max_iters": 50, "rel_tol": 1e-8 },
  "snr_db": [0, 10, 20, 30, 40],
  "trials": 50,
  "seed": 1
}
)";
        if (name == "upa-broadband")
            return R"({
  "name": "upa-broadband",
  "geometry": { "kind": "upa", "elements_x": 4, "elements_y": 4, "wave_speed": 3.0e8 },
  "carrier_hz": 10.0e9,
  "bandlimit_hz": 2.5e9,
  "snapshots": 16,
  "interval": { "center": [0.7853981633974483, 1.0471975511965976],
                "half_widths": [[0.07853981633974483, 0.07853981633974483]] },
  "true_aoa": { "rule": "uniform" },
  "methods": ["oracle", "crude", "bilinear", "das", "das-crude"],
  "das": { "taps": [11, 15] },
  "num_tones": 8,
  "slepian": { "guard": 8, "oversampling": 32 },
  "embedding": { "grid_points": 16, "rank_rule": { "tol": 1e-3 } },
  "solver": { "max_iters": 50, "rel_tol": 1e-8 },
  "snr_db": [0, 10, 20, 30, 40],
  "trials": 25,
  "seed": 1
}
)";
        return nullptr;
    }

    inline std::vector<std::string> preset_names() { return {"ula-broadband", "upa-broadband"}; }

    inline ExperimentConfig preset(const std::string &name)
    {
        const char *text = preset_text(name);
        if (!text)
            throw config_error("unknown preset '" + name + "'");
        return parse_config_text(text);
    }

} // namespace rbb::harness

#endif
