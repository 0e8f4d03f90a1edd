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

#ifndef RBB_CACHE_HPP
#define RBB_CACHE_HPP

// On-disk array dump used to cache Slepian bases and embeddings.
//
// Layout (all integers and floats little-endian):
//   offset 0   8 bytes   magic "RBBDUMP1"
//   offset 8   uint64    header length H in bytes
//   offset 16  H bytes   UTF-8 JSON header
//   offset 16+H          array payload
//
// The JSON header is
//   { "format": "rbb-array-dump", "version": 1, "kind": <string>, "key": <string>,
//     "meta": { ... },
//     "arrays": [ { "name": <string>, "dtype": "f64" | "c128", "rows": r, "cols": c,
//                   "offset": <byte offset into payload> }, ... ] }
// Arrays are stored column-major; c128 entries are interleaved (real, imag) f64 pairs.

#include "rbb/embedding.hpp"
#include "rbb/errors.hpp"
#include "rbb/forward.hpp"
#include "rbb/geometry.hpp"
#include "rbb/slepian.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rbb
{
    struct ArrayDump
    {
        std::string kind;
        std::string key;
        nlohmann::json meta = nlohmann::json::object();
        std::map<std::string, Eigen::MatrixXd> real;
        std::map<std::string, MatrixXc> complex;
    };

    namespace detail
    {
        inline constexpr char dump_magic[8] = {'R', 'B', 'B', 'D', 'U', 'M', 'P', '1'};

        inline std::uint64_t to_le(std::uint64_t v)
        {
            if constexpr (std::endian::native == std::endian::little)
                return v;
            else
            {
                std::uint64_t r = 0;
                for (int i = 0; i < 8; ++i)
                    r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
                return r;
            }
        }

        inline void put_u64(std::string &buf, std::uint64_t v)
        {
            v = to_le(v);
            char b[8];
            std::memcpy(b, &v, 8);
            buf.append(b, 8);
        }

        inline void put_f64(std::string &buf, double d) { put_u64(buf, std::bit_cast<std::uint64_t>(d)); }

        inline std::uint64_t get_u64(const char *p)
        {
            std::uint64_t v;
            std::memcpy(&v, p, 8);
            return to_le(v);
        }

        inline double get_f64(const char *p) { return std::bit_cast<double>(get_u64(p)); }
    } // namespace detail

    // Exact textual form of a double, used in cache keys.
    inline std::string hex_double(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%a", v);
        return buf;
    }

    inline void write_dump(const std::filesystem::path &path, const ArrayDump &dump)
    {
        nlohmann::json header;
        header["format"] = "rbb-array-dump";
        header["version"] = 1;
        header["kind"] = dump.kind;
        header["key"] = dump.key;
        header["meta"] = dump.meta;
        header["arrays"] = nlohmann::json::array();

        std::string payload;
        for (const auto &[name, m] : dump.real)
        {
            header["arrays"].push_back({{"name", name}, {"dtype", "f64"}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", payload.size()}});
            for (Eigen::Index i = 0; i < m.size(); ++i)
                detail::put_f64(payload, m.data()[i]);
        }
        for (const auto &[name, m] : dump.complex)
        {
            header["arrays"].push_back({{"name", name}, {"dtype", "c128"}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", payload.size()}});
            for (Eigen::Index i = 0; i < m.size(); ++i)
            {
                detail::put_f64(payload, m.data()[i].real());
                detail::put_f64(payload, m.data()[i].imag());
            }
        }

        const std::string text = header.dump();
        std::string out(detail::dump_magic, 8);
        detail::put_u64(out, text.size());
        out += text;
        out += payload;

        const std::filesystem::path tmp = path.string() + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("write_dump: cannot open " + tmp.string());
            f.write(out.data(), std::streamsize(out.size()));
            if (!f)
                throw std::runtime_error("write_dump: write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }

    inline ArrayDump read_dump(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("read_dump: cannot open " + path.string());
        std::stringstream ss;
        ss << f.rdbuf();
        const std::string buf = ss.str();
        if (buf.size() < 16 || std::memcmp(buf.data(), detail::dump_magic, 8) != 0)
            throw std::runtime_error("read_dump: bad magic in " + path.string());
        const std::uint64_t hlen = detail::get_u64(buf.data() + 8);
        if (16 + hlen > buf.size())
            throw std::runtime_error("read_dump: truncated header in " + path.string());
        const nlohmann::json header = nlohmann::json::parse(buf.substr(16, hlen));
        if (header.value("format", "") != "rbb-array-dump" || header.value("version", 0) != 1)
            throw std::runtime_error("read_dump: unsupported format in " + path.string());

        ArrayDump dump;
        dump.kind = header.at("kind").get<std::string>();
        dump.key = header.at("key").get<std::string>();
        dump.meta = header.at("meta");
        const char *data = buf.data() + 16 + hlen;
        const std::size_t avail = buf.size() - 16 - hlen;
        for (const auto &a : header.at("arrays"))
        {
            const auto rows = a.at("rows").get<Eigen::Index>();
            const auto cols = a.at("cols").get<Eigen::Index>();
            const auto off = a.at("offset").get<std::size_t>();
            const std::string dtype = a.at("dtype").get<std::string>();
            const std::size_t width = dtype == "c128" ? 16 : 8;
            if (off + std::size_t(rows * cols) * width > avail)
                throw std::runtime_error("read_dump: truncated payload in " + path.string());
            const char *p = data + off;
            if (dtype == "f64")
            {
                Eigen::MatrixXd m(rows, cols);
                for (Eigen::Index i = 0; i < m.size(); ++i)
                    m.data()[i] = detail::get_f64(p + 8 * i);
                dump.real.emplace(a.at("name").get<std::string>(), std::move(m));
            }
            else if (dtype == "c128")
            {
                MatrixXc m(rows, cols);
                for (Eigen::Index i = 0; i < m.size(); ++i)
                    m.data()[i] = cplx(detail::get_f64(p + 16 * i), detail::get_f64(p + 16 * i + 8));
                dump.complex.emplace(a.at("name").get<std::string>(), std::move(m));
            }
            else
                throw std::runtime_error("read_dump: unknown dtype " + dtype);
        }
        return dump;
    }

    // --- keys ---------------------------------------------------------------------------------

    inline std::string slepian_key(double bandlimit, double lower, double upper, std::size_t K, double oversampling,
                                   std::size_t quadrature_order = default_quadrature_order)
    {
        std::ostringstream s;
        s << "slepian;W=" << hex_double(bandlimit) << ";lo=" << hex_double(lower) << ";hi=" << hex_double(upper) << ";K=" << K
          << ";rho=" << hex_double(oversampling) << ";order=" << quadrature_order;
        return s.str();
    }

    inline std::string embedding_key(const ArrayGeometry &geom, const std::string &basis_key, const SamplingPlan &plan,
                                     double carrier, const UncertaintyInterval &interval, std::size_t points_per_dim,
                                     const RankRule &rule)
    {
        std::ostringstream s;
        s << "embedding;" << basis_key << ";kind=" << int(geom.kind()) << ";c=" << hex_double(geom.wave_speed()) << ";pos=";
        for (Eigen::Index i = 0; i < geom.positions().size(); ++i)
            s << hex_double(geom.positions().data()[i]) << ',';
        s << ";t=";
        for (double t : plan.times())
            s << hex_double(t) << ',';
        s << ";fs=" << hex_double(plan.rate()) << ";fc=" << hex_double(carrier) << ";theta=";
        for (std::size_t i = 0; i < interval.size(); ++i)
            s << hex_double(interval.center()[i]) << '/' << hex_double(interval.half_width(i)) << ',';
        s << ";Q=" << points_per_dim << ";rank=" << rule.fixed_rank << ";tol=" << hex_double(rule.tolerance);
        return s.str();
    }

    inline std::string key_digest(const std::string &key)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a 64
        for (unsigned char ch : key)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    // --- (de)serialization ----------------------------------------------------------------------

    inline ArrayDump to_dump(const SlepianBasis &b, const std::string &key)
    {
        ArrayDump d;
        d.kind = "slepian";
        d.key = key;
        d.meta = {{"bandlimit", hex_double(b.bandlimit())}, {"lower", hex_double(b.lower())},
                  {"upper", hex_double(b.upper())}, {"oversampling", hex_double(b.oversampling())}};
        d.real["grid_times"] = b.grid_times();
        d.real["weights"] = b.weights();
        d.real["grid_values"] = b.grid_values();
        d.real["eigenvalues"] = b.eigenvalues();
        return d;
    }

    inline double parse_hex_double(const nlohmann::json &j) { return std::strtod(j.get<std::string>().c_str(), nullptr); }

    inline SlepianBasis slepian_from_dump(const ArrayDump &d)
    {
        if (d.kind != "slepian")
            throw std::runtime_error("slepian_from_dump: dump kind is " + d.kind);
        SlepianBasis::Parts p;
        p.bandlimit = parse_hex_double(d.meta.at("bandlimit"));
        p.lower = parse_hex_double(d.meta.at("lower"));
        p.upper = parse_hex_double(d.meta.at("upper"));
        p.oversampling = parse_hex_double(d.meta.at("oversampling"));
        p.times = d.real.at("grid_times");
        p.weights = d.real.at("weights");
        p.values = d.real.at("grid_values");
        p.eigenvalues = d.real.at("eigenvalues");
        return SlepianBasis(std::move(p));
    }

    inline ArrayDump to_dump(const EmbeddingBasis &e, const std::string &key)
    {
        ArrayDump d;
        d.kind = "embedding";
        d.key = key;
        nlohmann::json angles = nlohmann::json::array();
        for (const auto &a : e.angles)
        {
            nlohmann::json v = nlohmann::json::array();
            for (std::size_t i = 0; i < a.size(); ++i)
                v.push_back(hex_double(a[i]));
            angles.push_back(v);
        }
        d.meta = {{"basis_size", e.basis_size}, {"measurements", e.measurements}, {"embed_error", hex_double(e.embed_error)}, {"angles", angles}};
        if (e.interval)
        {
            nlohmann::json c = nlohmann::json::array(), h = nlohmann::json::array();
            for (std::size_t i = 0; i < e.interval->size(); ++i)
            {
                c.push_back(hex_double(e.interval->center()[i]));
                h.push_back(hex_double(e.interval->half_width(i)));
            }
            d.meta["interval"] = {{"center", c}, {"half_width", h}};
        }
        d.real["singular_values"] = e.singular_values;
        d.real["spectrum"] = e.spectrum;
        d.complex["V"] = e.V;
        d.complex["U"] = e.U;
        d.complex["codebook"] = e.codebook;
        return d;
    }

    inline EmbeddingBasis embedding_from_dump(const ArrayDump &d)
    {
        if (d.kind != "embedding")
            throw std::runtime_error("embedding_from_dump: dump kind is " + d.kind);
        EmbeddingBasis e;
        e.basis_size = d.meta.at("basis_size").get<std::size_t>();
        e.measurements = d.meta.at("measurements").get<std::size_t>();
        e.embed_error = parse_hex_double(d.meta.at("embed_error"));
        for (const auto &a : d.meta.at("angles"))
        {
            std::vector<double> v;
            for (const auto &x : a)
                v.push_back(parse_hex_double(x));
            e.angles.push_back(AngleOfArrival::from_values(v));
        }
        if (d.meta.contains("interval"))
        {
            std::vector<double> c, h;
            for (const auto &x : d.meta["interval"]["center"])
                c.push_back(parse_hex_double(x));
            for (const auto &x : d.meta["interval"]["half_width"])
                h.push_back(parse_hex_double(x));
            e.interval = UncertaintyInterval(AngleOfArrival::from_values(c), h);
        }
        e.singular_values = d.real.at("singular_values");
        e.spectrum = d.real.at("spectrum");
        e.V = d.complex.at("V");
        e.U = d.complex.at("U");
        e.codebook = d.complex.at("codebook");
        return e;
    }

    // Directory of dumps named <kind>-<digest>.bin. The full key is stored in each header and
    // checked on load, so digest collisions fall back to a rebuild.
    class DumpCache
    {
    public:
        explicit DumpCache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

        const std::filesystem::path &directory() const noexcept { return dir_; }

        std::filesystem::path path_for(const std::string &kind, const std::string &key) const
        {
            return dir_ / (kind + "-" + key_digest(key) + ".bin");
        }

        std::optional<ArrayDump> find(const std::string &kind, const std::string &key) const
        {
            const auto p = path_for(kind, key);
            if (!std::filesystem::exists(p))
                return std::nullopt;
            try
            {
                ArrayDump d = read_dump(p);
                if (d.kind == kind && d.key == key)
                    return d;
            }
            catch (const std::exception &)
            {
            }
            return std::nullopt;
        }

        void store(const ArrayDump &d) const { write_dump(path_for(d.kind, d.key), d); }

        template <typename Build>
        SlepianBasis slepian(const std::string &key, Build &&build) const
        {
            if (auto d = find("slepian", key))
                return slepian_from_dump(*d);
            SlepianBasis b = build();
            store(to_dump(b, key));
            return b;
        }

        template <typename Build>
        EmbeddingBasis embedding(const std::string &key, Build &&build) const
        {
            if (auto d = find("embedding", key))
                return embedding_from_dump(*d);
            EmbeddingBasis e = build();
            store(to_dump(e, key));
            return e;
        }

    private:
        std::filesystem::path dir_;
    };

} // namespace rbb

#endif
