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

#ifndef RBB_HARNESS_RESULTS_HPP
#define RBB_HARNESS_RESULTS_HPP

#include "rbb/harness/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rbb::harness
{
    // One line of a results file: per-trial rows have kind "trial"; group means have kind "mean",
    // an empty trial field and status "n=<finite>/<total>".
    struct CsvRow
    {
        std::string kind;
        std::string method;
        double delta = 0.0;
        double snr_db = 0.0;
        std::optional<std::size_t> trial;
        std::optional<double> nmse;
        std::optional<double> beamformed_snr_db;
        std::optional<double> iterations;
        std::optional<double> theta_error;
        std::string status;
        std::optional<double> wall_time;
    };

    namespace detail
    {
        inline std::string fmt(double v)
        {
            if (std::isnan(v))
                return "";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        inline std::string fmt(const std::optional<double> &v) { return v ? fmt(*v) : std::string(); }

        inline std::string quote(const std::string &s)
        {
            if (s.find_first_of(",\"\r\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char ch : s)
            {
                if (ch == '"')
                    q += '"';
                q += ch;
            }
            return q + '"';
        }

        inline std::optional<double> parse_opt(const std::string &s)
        {
            if (s.empty())
                return std::nullopt;
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size())
                throw std::invalid_argument("bad number '" + s + "'");
            return v;
        }

        // RFC-4180 records; quoted fields may contain commas, quotes and line breaks.
        inline std::vector<std::vector<std::string>> parse_csv(std::istream &in)
        {
            std::vector<std::vector<std::string>> records;
            std::vector<std::string> rec;
            std::string field;
            bool quoted = false, any = false;
            char ch;
            while (in.get(ch))
            {
                any = true;
                if (quoted)
                {
                    if (ch == '"')
                    {
                        if (in.peek() == '"')
                        {
                            field += '"';
                            in.get();
                        }
                        else
                            quoted = false;
                    }
                    else
                        field += ch;
                }
                else if (ch == '"')
                    quoted = true;
                else if (ch == ',')
                {
                    rec.push_back(std::move(field));
                    field.clear();
                }
                else if (ch == '\n' || ch == '\r')
                {
                    if (ch == '\r' && in.peek() == '\n')
                        in.get();
                    rec.push_back(std::move(field));
                    field.clear();
                    records.push_back(std::move(rec));
                    rec.clear();
                    any = false;
                }
                else
                    field += ch;
            }
            if (quoted)
                throw std::runtime_error("unterminated quoted field");
            if (any)
            {
                rec.push_back(std::move(field));
                records.push_back(std::move(rec));
            }
            return records;
        }

        inline const std::vector<std::string> &csv_columns()
        {
            static const std::vector<std::string> cols{"kind",       "method",          "delta", "snr_db",
                                                       "trial",      "nmse",            "beamformed_snr_db",
                                                       "iterations", "theta_error_rad", "status"};
            return cols;
        }
    } // namespace detail

    // Per-trial rows followed by one mean row per (method, delta, snr), means taken over finite values.
    inline std::vector<CsvRow> tabulate(const SweepResult &res, bool timing = false)
    {
        std::vector<CsvRow> out;
        struct Acc
        {
            CsvRow row;
            double sums[5] = {0, 0, 0, 0, 0};
            std::size_t counts[5] = {0, 0, 0, 0, 0};
            std::size_t total = 0;
        };
        std::vector<Acc> groups;
        std::map<std::tuple<std::string, std::size_t, double>, std::size_t> index;
        for (const auto &r : res.rows)
        {
            CsvRow c;
            c.kind = "trial";
            c.method = r.method;
            c.delta = r.delta;
            c.snr_db = r.snr_db;
            c.trial = r.trial;
            c.nmse = r.nmse;
            c.beamformed_snr_db = r.beamformed_snr_db;
            c.iterations = r.iterations;
            c.theta_error = r.theta_error;
            c.status = r.status;
            if (timing)
                c.wall_time = r.wall_time;
            out.push_back(c);

            auto key = std::make_tuple(r.method, r.delta_index, r.snr_db);
            auto [it, fresh] = index.try_emplace(key, groups.size());
            if (fresh)
            {
                Acc a;
                a.row.kind = "mean";
                a.row.method = r.method;
                a.row.delta = r.delta;
                a.row.snr_db = r.snr_db;
                groups.push_back(a);
            }
            Acc &a = groups[it->second];
            const std::optional<double> vals[5] = {r.nmse, r.beamformed_snr_db, r.iterations, r.theta_error,
                                                   timing ? std::optional<double>(r.wall_time) : std::nullopt};
            for (int k = 0; k < 5; ++k)
                if (vals[k] && std::isfinite(*vals[k]))
                {
                    a.sums[k] += *vals[k];
                    ++a.counts[k];
                }
            ++a.total;
        }
        for (auto &a : groups)
        {
            std::optional<double> *dst[5] = {&a.row.nmse, &a.row.beamformed_snr_db, &a.row.iterations, &a.row.theta_error,
                                             &a.row.wall_time};
            for (int k = 0; k < 5; ++k)
                if (a.counts[k])
                    *dst[k] = a.sums[k] / double(a.counts[k]);
            const std::size_t finite = std::max(a.counts[0], a.counts[1]);
            a.row.status = "n=" + std::to_string(finite) + "/" + std::to_string(a.total);
            out.push_back(a.row);
        }
        return out;
    }

    inline void write_csv(std::ostream &os, const std::vector<CsvRow> &rows, bool timing = false)
    {
        const auto &cols = detail::csv_columns();
        for (std::size_t i = 0; i < cols.size(); ++i)
            os << (i ? "," : "") << cols[i];
        if (timing)
            os << ",wall_time_s";
        os << "\r\n";
        for (const auto &r : rows)
        {
            os << r.kind << ',' << detail::quote(r.method) << ',' << detail::fmt(r.delta) << ',' << detail::fmt(r.snr_db) << ','
               << (r.trial ? std::to_string(*r.trial) : std::string()) << ',' << detail::fmt(r.nmse) << ','
               << detail::fmt(r.beamformed_snr_db) << ',' << detail::fmt(r.iterations) << ',' << detail::fmt(r.theta_error) << ','
               << detail::quote(r.status);
            if (timing)
                os << ',' << detail::fmt(r.wall_time);
            os << "\r\n";
        }
        if (!os)
            throw std::runtime_error("write_csv: stream error");
    }

    inline void write_csv_file(const std::filesystem::path &path, const std::vector<CsvRow> &rows, bool timing = false)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        write_csv(f, rows, timing);
        f.close();
        if (!f)
            throw std::runtime_error("error writing " + path.string());
    }

    inline std::vector<CsvRow> read_csv(std::istream &in, const std::string &origin = "<stream>")
    {
        auto records = detail::parse_csv(in);
        if (records.empty())
            throw std::runtime_error(origin + ": empty results file");
        const auto &header = records.front();
        const auto &cols = detail::csv_columns();
        if (header.size() < cols.size() || !std::equal(cols.begin(), cols.end(), header.begin()))
            throw std::runtime_error(origin + ": unexpected header");
        const bool timing = header.size() > cols.size() && header[cols.size()] == "wall_time_s";
        std::vector<CsvRow> rows;
        for (std::size_t i = 1; i < records.size(); ++i)
        {
            const auto &f = records[i];
            if (f.size() == 1 && f[0].empty())
                continue;
            if (f.size() != header.size())
                throw std::runtime_error(origin + ": line " + std::to_string(i + 1) + " has " + std::to_string(f.size()) +
                                         " fields, expected " + std::to_string(header.size()));
            try
            {
                CsvRow r;
                r.kind = f[0];
                r.method = f[1];
                r.delta = std::stod(f[2]);
                r.snr_db = std::stod(f[3]);
                if (!f[4].empty())
                    r.trial = std::stoul(f[4]);
                r.nmse = detail::parse_opt(f[5]);
                r.beamformed_snr_db = detail::parse_opt(f[6]);
                r.iterations = detail::parse_opt(f[7]);
                r.theta_error = detail::parse_opt(f[8]);
                r.status = f[9];
                if (timing)
                    r.wall_time = detail::parse_opt(f[10]);
                rows.push_back(std::move(r));
            }
            catch (const std::exception &e)
            {
                throw std::runtime_error(origin + ": line " + std::to_string(i + 1) + ": " + e.what());
            }
        }
        return rows;
    }

    inline std::vector<CsvRow> read_csv_file(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open " + path.string());
        return read_csv(f, path.string());
    }

    // Wide per-figure tables: one row per nominal SNR, one column per (method, delta) series, cell =
    // mean over finite per-trial values. Returns the files written.
    inline std::vector<std::filesystem::path> write_figures(const std::vector<CsvRow> &rows, const std::filesystem::path &out_dir)
    {
        std::filesystem::create_directories(out_dir);
        struct Figure
        {
            const char *file;
            std::optional<double> CsvRow::*field;
        };
        const Figure figs[] = {{"nmse_vs_snr.csv", &CsvRow::nmse}, {"beamformed_snr_vs_snr.csv", &CsvRow::beamformed_snr_db}};
        std::vector<std::filesystem::path> written;
        for (const auto &fig : figs)
        {
            std::vector<std::string> series;
            std::map<std::string, std::size_t> series_index;
            std::map<double, std::map<std::size_t, std::pair<double, std::size_t>>> table;
            for (const auto &r : rows)
            {
                if (r.kind != "trial")
                    continue;
                const auto &v = r.*fig.field;
                if (!v)
                    continue;
                const std::string name = r.method + " delta=" + detail::fmt(r.delta);
                auto [it, fresh] = series_index.try_emplace(name, series.size());
                if (fresh)
                    series.push_back(name);
                auto &cell = table[r.snr_db][it->second];
                if (std::isfinite(*v))
                {
                    cell.first += *v;
                    ++cell.second;
                }
            }
            const auto path = out_dir / fig.file;
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot open " + path.string() + " for writing");
            f << "snr_db";
            for (const auto &s : series)
                f << ',' << detail::quote(s);
            f << "\r\n";
            for (const auto &[snr, cells] : table)
            {
                f << detail::fmt(snr);
                for (std::size_t k = 0; k < series.size(); ++k)
                {
                    f << ',';
                    if (auto it = cells.find(k); it != cells.end() && it->second.second)
                        f << detail::fmt(it->second.first / double(it->second.second));
                }
                f << "\r\n";
            }
            f.close();
            if (!f)
                throw std::runtime_error("error writing " + path.string());
            written.push_back(path);
        }
        return written;
    }

} // namespace rbb::harness

#endif
