// SPDX-License-Identifier: Apache-2.0
//
// holobeam: holographic beamforming for integrated data and energy transfer
// Copyright (C) 2026 The holobeam authors
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

#ifndef HOLOBEAM_HARNESS_HPP
#define HOLOBEAM_HARNESS_HPP

#include "baselines.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace holobeam
{
    using json = nlohmann::json;
    namespace fs = std::filesystem;

    struct ConfigError : InvalidArgument
    {
        using InvalidArgument::InvalidArgument;
    };

    // ---------------------------------------------------------------- JSON field access

    // Typed access to one JSON object; errors name the dotted field path, unknown keys are rejected
    class FieldReader
    {
    public:
        FieldReader(const json &j, std::string path, std::initializer_list<const char *> allowed) : j_(j), path_(std::move(path))
        {
            if (!j_.is_object())
                fail("", "expected an object");
            for (const auto &[key, value] : j_.items())
            {
                bool ok = false;
                for (const char *a : allowed)
                    ok = ok || key == a;
                if (!ok)
                    fail(key, "unknown field");
            }
        }

        bool has(const char *key) const { return j_.contains(key) && !j_.at(key).is_null(); }

        double number(const char *key, double def) const { return has(key) ? number(key) : def; }
        double number(const char *key) const
        {
            const json &v = need(key);
            if (!v.is_number())
                fail(key, "expected a number");
            const double x = v.get<double>();
            if (!std::isfinite(x))
                fail(key, "expected a finite number");
            return x;
        }

        int integer(const char *key, int def) const
        {
            if (!has(key))
                return def;
            const json &v = j_.at(key);
            if (!v.is_number_integer())
                fail(key, "expected an integer");
            return v.get<int>();
        }

        bool boolean(const char *key, bool def) const
        {
            if (!has(key))
                return def;
            if (!j_.at(key).is_boolean())
                fail(key, "expected true or false");
            return j_.at(key).get<bool>();
        }

        std::string text(const char *key, const std::string &def) const
        {
            if (!has(key))
                return def;
            if (!j_.at(key).is_string())
                fail(key, "expected a string");
            return j_.at(key).get<std::string>();
        }

        std::vector<double> numbers(const char *key) const
        {
            const json &v = need(key);
            if (!v.is_array())
                fail(key, "expected an array of numbers");
            std::vector<double> out;
            for (const auto &x : v)
            {
                if (!x.is_number())
                    fail(key, "expected an array of numbers");
                out.push_back(x.get<double>());
            }
            return out;
        }

        std::array<double, 2> pair(const char *key, std::array<double, 2> def) const
        {
            if (!has(key))
                return def;
            const auto v = numbers(key);
            if (v.size() != 2)
                fail(key, "expected two numbers");
            return {v[0], v[1]};
        }

        std::vector<Point3> points(const char *key, std::vector<Point3> def) const
        {
            if (!has(key))
                return def;
            const json &v = j_.at(key);
            if (!v.is_array())
                fail(key, "expected an array of [x, y, z] points");
            std::vector<Point3> out;
            for (const auto &p : v)
            {
                if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
                    fail(key, "expected an array of [x, y, z] points");
                out.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            }
            return out;
        }

        std::vector<std::string> strings(const char *key, std::vector<std::string> def) const
        {
            if (!has(key))
                return def;
            const json &v = j_.at(key);
            if (!v.is_array())
                fail(key, "expected an array of strings");
            std::vector<std::string> out;
            for (const auto &x : v)
            {
                if (!x.is_string())
                    fail(key, "expected an array of strings");
                out.push_back(x.get<std::string>());
            }
            return out;
        }

        FieldReader child(const char *key, std::initializer_list<const char *> allowed) const
        {
            return FieldReader(need(key), where(key), allowed);
        }

        [[noreturn]] void fail(const std::string &key, const std::string &msg) const
        {
            throw ConfigError("config field '" + where(key) + "': " + msg);
        }

    private:
        const json &need(const char *key) const
        {
            if (!has(key))
                fail(key, "missing");
            return j_.at(key);
        }

        std::string where(const std::string &key) const
        {
            if (key.empty())
                return path_.empty() ? "<root>" : path_;
            return path_.empty() ? key : path_ + "." + key;
        }

        const json &j_;
        std::string path_;
    };

    inline json parse_json_text(const std::string &text, const std::string &source)
    {
        try
        {
            return json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
                text[i] == '\n' ? (++line, col = 1) : ++col;
            throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                              e.what() + ")");
        }
    }

    inline std::string read_file(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw ConfigError("cannot open " + path);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    // ---------------------------------------------------------------- configuration

    // desk: K = 2, L = 1; full: K = 4, L = 2; both on a 0.3 m aperture with a 64 x 64 grid and the ceiling-rule basis
    inline Scenario profile_scenario(const std::string &profile)
    {
        Scenario s;
        if (profile == "desk")
        {
            s.dus = {Point3(5, 5, 30), Point3(-5, 5, 30)};
            s.eus = {Point3(1, 1, 1)};
        }
        else if (profile == "full")
        {
            s.dus = {Point3(5, 5, 30), Point3(-5, 5, 30), Point3(5, -5, 30), Point3(-5, -5, 30)};
            s.eus = {Point3(1, 1, 1), Point3(-1, 1, 1)};
        }
        else
            throw ConfigError("unknown profile '" + profile + "' (expected desk or full)");
        return s;
    }

    inline const std::vector<std::string> &known_schemes()
    {
        static const std::vector<std::string> k{"H-IDET", "FD", "FD-IDET", "MF", "UPPER", "RI-SCA", "RI-BCD"};
        return k;
    }

    inline const std::vector<std::string> &sweep_variables()
    {
        static const std::vector<std::string> v{"pt_A2", "p0_W", "area_m2", "distance_m", "basis_n"};
        return v;
    }

    struct SweepSpec
    {
        std::string variable;
        std::vector<double> values;
    };

    // xz-plane (y fixed) scan for beam maps
    struct PlaneScan
    {
        std::array<double, 2> x{-3.0, 3.0}, z{1.0, 30.0};
        double y = 0.0;
        int nx = 61, nz = 59;

        std::vector<Point3> points() const
        {
            std::vector<Point3> p;
            for (int i = 0; i < nx; ++i)
                for (int k = 0; k < nz; ++k)
                    p.emplace_back(nx == 1 ? x[0] : x[0] + (x[1] - x[0]) * i / (nx - 1), y,
                                   nz == 1 ? z[0] : z[0] + (z[1] - z[0]) * k / (nz - 1));
            return p;
        }
    };

    // Single-EU focusing study
    struct PatternSpec
    {
        double lx = 1.5, ly = 0.5;
        int grid_nx = 60, grid_ny = 20;
        double pt = 0.003;
        std::vector<Point3> foci{Point3(0, 0, 4), Point3(0, 0, 8), Point3(0, 0, 25)};
        PlaneScan plane{};
        std::array<double, 2> axis_z{1.0, 50.0};
        int axis_points = 41;
        std::vector<double> fresnel_distances{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
        std::vector<double> focus_sweep_foci{2.0, 4.0, 8.0};
        std::vector<double> focus_sweep_distances{1, 1.5, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20};
    };

    struct ExperimentConfig
    {
        std::string name = "experiment";
        std::string profile = "desk";
        Scenario scenario = profile_scenario("desk");
        std::optional<SweepSpec> sweep;
        std::vector<std::string> schemes{"H-IDET", "FD", "FD-IDET", "MF", "UPPER"};
        std::string out_dir = "out";
        OptimizerOptions options{};
        std::uint64_t seed = 1;
        int workers = 0; // 0: hardware concurrency
        bool dump_iterates = false;
        bool current_maps = false;
        bool mf_equal_power = false;
        std::optional<PlaneScan> beam_map_plane;
        PatternSpec pattern{};
    };

    inline json point_json(const Point3 &p) { return json::array({p.x(), p.y(), p.z()}); }

    inline json points_json(const std::vector<Point3> &v)
    {
        json a = json::array();
        for (const auto &p : v)
            a.push_back(point_json(p));
        return a;
    }

    inline json scenario_to_json(const Scenario &s)
    {
        json j;
        j["frequency_Hz"] = s.medium.frequency;
        j["z0_Ohm"] = s.medium.z0;
        j["z_Ohm"] = s.medium.z;
        j["aperture_m"] = {s.lx, s.ly};
        j["grid"] = {s.grid_nx, s.grid_ny};
        j["basis_n"] = s.basis_n ? json(*s.basis_n) : json(nullptr);
        j["dus_m"] = points_json(s.dus);
        j["eus_m"] = points_json(s.eus);
        j["pt_A2"] = s.pt;
        j["p0_W"] = s.p0;
        j["sigma2_V2m2"] = s.sigma2;
        j["incidence_rad"] = s.incidence;
        j["circuit"] = {{"m_W", s.circuit.m}, {"a_per_W", s.circuit.a}, {"b_W", s.circuit.b}};
        return j;
    }

    inline Scenario parse_scenario(const FieldReader &r, Scenario s)
    {
        const double f = r.number("frequency_Hz", s.medium.frequency);
        const double z0 = r.number("z0_Ohm", s.medium.z0), z = r.number("z_Ohm", s.medium.z);
        if (!(f > 0.0))
            r.fail("frequency_Hz", "must be positive");
        if (!(z0 > 0.0 && z > 0.0))
            r.fail("z_Ohm", "impedances must be positive");
        s.medium = Medium::from_frequency(f, z0, z);
        const auto ap = r.pair("aperture_m", {s.lx, s.ly});
        if (!(ap[0] > 0.0 && ap[1] > 0.0))
            r.fail("aperture_m", "extents must be positive");
        s.lx = ap[0], s.ly = ap[1];
        const auto g = r.pair("grid", {double(s.grid_nx), double(s.grid_ny)});
        if (!(g[0] >= 1.0 && g[1] >= 1.0) || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]))
            r.fail("grid", "expected two positive integers");
        s.grid_nx = int(g[0]), s.grid_ny = int(g[1]);
        if (r.has("basis_n"))
        {
            const int n = r.integer("basis_n", 0);
            if (n < 0)
                r.fail("basis_n", "must be non-negative");
            s.basis_n = n;
        }
        s.dus = r.points("dus_m", s.dus);
        s.eus = r.points("eus_m", s.eus);
        s.pt = r.number("pt_A2", s.pt);
        s.p0 = r.number("p0_W", s.p0);
        s.sigma2 = r.number("sigma2_V2m2", s.sigma2);
        s.incidence = r.number("incidence_rad", s.incidence);
        if (r.has("circuit"))
        {
            const auto c = r.child("circuit", {"m_W", "a_per_W", "b_W"});
            s.circuit.m = c.number("m_W", s.circuit.m);
            s.circuit.a = c.number("a_per_W", s.circuit.a);
            s.circuit.b = c.number("b_W", s.circuit.b);
        }
        if (!(s.pt > 0.0))
            r.fail("pt_A2", "must be positive");
        if (!(s.sigma2 > 0.0))
            r.fail("sigma2_V2m2", "must be positive");
        if (s.p0 < 0.0 || s.p0 >= s.circuit.m)
            r.fail("p0_W", "must lie in [0, circuit.m_W)");
        if (s.dus.empty() && s.eus.empty())
            r.fail("dus_m", "scenario needs at least one user");
        return s;
    }

    inline json options_to_json(const OptimizerOptions &o)
    {
        return {{"outer_tol", o.outer_tol},     {"outer_max", o.outer_max},         {"inner_tol", o.inner_tol},
                {"inner_max", o.inner_max},     {"maxmin_tol", o.maxmin_tol},       {"maxmin_max", o.maxmin_max},
                {"solver_tol", o.solver.tol},   {"solver_max_iter", o.solver.max_iter}, {"warm_start", o.warm_start},
                {"power_rescale", o.power_rescale}};
    }

    inline json plane_to_json(const PlaneScan &p)
    {
        return {{"x_m", p.x}, {"z_m", p.z}, {"y_m", p.y}, {"points", {p.nx, p.nz}}};
    }

    inline PlaneScan parse_plane(const FieldReader &r, PlaneScan p)
    {
        p.x = r.pair("x_m", p.x);
        p.z = r.pair("z_m", p.z);
        p.y = r.number("y_m", p.y);
        const auto n = r.pair("points", {double(p.nx), double(p.nz)});
        if (!(n[0] >= 1 && n[1] >= 1))
            r.fail("points", "expected two positive integers");
        p.nx = int(n[0]), p.nz = int(n[1]);
        return p;
    }

    inline json pattern_to_json(const PatternSpec &p)
    {
        return {{"aperture_m", {p.lx, p.ly}},
                {"grid", {p.grid_nx, p.grid_ny}},
                {"pt_A2", p.pt},
                {"foci_m", points_json(p.foci)},
                {"plane", plane_to_json(p.plane)},
                {"axis_z_m", p.axis_z},
                {"axis_points", p.axis_points},
                {"fresnel_distances_m", p.fresnel_distances},
                {"focus_sweep_foci_m", p.focus_sweep_foci},
                {"focus_sweep_distances_m", p.focus_sweep_distances}};
    }

    inline json config_to_json(const ExperimentConfig &c)
    {
        json j;
        j["name"] = c.name;
        j["profile"] = c.profile;
        j["scenario"] = scenario_to_json(c.scenario);
        if (c.sweep)
            j["sweep"] = {{"variable", c.sweep->variable}, {"values", c.sweep->values}};
        j["schemes"] = c.schemes;
        j["out_dir"] = c.out_dir;
        j["options"] = options_to_json(c.options);
        j["seed"] = c.seed;
        j["workers"] = c.workers;
        j["dump_iterates"] = c.dump_iterates;
        j["current_maps"] = c.current_maps;
        j["mf_equal_power"] = c.mf_equal_power;
        if (c.beam_map_plane)
            j["beam_map_plane"] = plane_to_json(*c.beam_map_plane);
        j["pattern"] = pattern_to_json(c.pattern);
        return j;
    }

    struct ConfigOverrides
    {
        std::optional<std::string> profile;
        std::optional<std::vector<std::string>> schemes;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out_dir;
    };

    inline ExperimentConfig parse_config(const json &j, const ConfigOverrides &ov = {})
    {
        const FieldReader r(j, "", {"name", "profile", "scenario", "sweep", "schemes", "out_dir", "options", "seed",
                                    "workers", "dump_iterates", "current_maps", "mf_equal_power", "beam_map_plane",
                                    "pattern"});
        ExperimentConfig c;
        c.name = r.text("name", c.name);
        c.profile = ov.profile.value_or(r.text("profile", c.profile));
        try
        {
            c.scenario = profile_scenario(c.profile);
        }
        catch (const ConfigError &e)
        {
            r.fail("profile", e.what());
        }
        if (r.has("scenario"))
        {
            const auto sr = r.child("scenario", {"frequency_Hz", "z0_Ohm", "z_Ohm", "aperture_m", "grid", "basis_n",
                                                 "dus_m", "eus_m", "pt_A2", "p0_W", "sigma2_V2m2", "incidence_rad",
                                                 "circuit"});
            c.scenario = parse_scenario(sr, c.scenario);
            // an explicit profile on the command line replaces the user layout of the file
            if (ov.profile)
            {
                const Scenario prof = profile_scenario(*ov.profile);
                c.scenario.dus = prof.dus;
                c.scenario.eus = prof.eus;
            }
        }
        if (r.has("sweep"))
        {
            const auto sw = r.child("sweep", {"variable", "values"});
            SweepSpec s;
            s.variable = sw.text("variable", "");
            if (std::find(sweep_variables().begin(), sweep_variables().end(), s.variable) == sweep_variables().end())
                sw.fail("variable", "unknown sweep variable '" + s.variable + "'");
            s.values = sw.numbers("values");
            if (s.values.empty())
                sw.fail("values", "sweep grid is empty");
            for (std::size_t i = 1; i < s.values.size(); ++i)
                if (!(s.values[i] > s.values[i - 1]))
                    sw.fail("values", "sweep grid must be strictly increasing");
            if (s.variable == "basis_n")
                for (double v : s.values)
                    if (v < 0 || v != std::floor(v))
                        sw.fail("values", "basis_n values must be non-negative integers");
            c.sweep = s;
        }
        c.schemes = ov.schemes.value_or(r.strings("schemes", c.schemes));
        if (c.schemes.empty())
            r.fail("schemes", "at least one scheme is required");
        for (const auto &s : c.schemes)
            if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end())
                r.fail("schemes", "unknown scheme '" + s + "'");
        c.out_dir = ov.out_dir.value_or(r.text("out_dir", c.out_dir));
        if (r.has("options"))
        {
            const auto o = r.child("options", {"outer_tol", "outer_max", "inner_tol", "inner_max", "maxmin_tol",
                                               "maxmin_max", "solver_tol", "solver_max_iter", "warm_start",
                                               "power_rescale"});
            auto &op = c.options;
            op.outer_tol = o.number("outer_tol", op.outer_tol);
            op.outer_max = o.integer("outer_max", op.outer_max);
            op.inner_tol = o.number("inner_tol", op.inner_tol);
            op.inner_max = o.integer("inner_max", op.inner_max);
            op.maxmin_tol = o.number("maxmin_tol", op.maxmin_tol);
            op.maxmin_max = o.integer("maxmin_max", op.maxmin_max);
            op.solver.tol = o.number("solver_tol", op.solver.tol);
            op.solver.max_iter = o.integer("solver_max_iter", op.solver.max_iter);
            op.warm_start = o.boolean("warm_start", op.warm_start);
            op.power_rescale = o.boolean("power_rescale", op.power_rescale);
            if (op.outer_max < 1 || op.inner_max < 1 || op.maxmin_max < 1 || op.solver.max_iter < 1)
                o.fail("outer_max", "iteration caps must be positive");
            if (!(op.outer_tol > 0 && op.inner_tol > 0 && op.maxmin_tol > 0 && op.solver.tol > 0))
                o.fail("outer_tol", "tolerances must be positive");
        }
        if (r.has("seed"))
        {
            const int s = r.integer("seed", 1);
            if (s < 0)
                r.fail("seed", "must be non-negative");
            c.seed = std::uint64_t(s);
        }
        c.seed = ov.seed.value_or(c.seed);
        c.workers = r.integer("workers", c.workers);
        if (c.workers < 0)
            r.fail("workers", "must be non-negative");
        c.dump_iterates = r.boolean("dump_iterates", c.dump_iterates);
        c.current_maps = r.boolean("current_maps", c.current_maps);
        c.mf_equal_power = r.boolean("mf_equal_power", c.mf_equal_power);
        if (r.has("beam_map_plane"))
            c.beam_map_plane = parse_plane(r.child("beam_map_plane", {"x_m", "z_m", "y_m", "points"}), PlaneScan{});
        if (r.has("pattern"))
        {
            const auto p = r.child("pattern", {"aperture_m", "grid", "pt_A2", "foci_m", "plane", "axis_z_m",
                                               "axis_points", "fresnel_distances_m", "focus_sweep_foci_m",
                                               "focus_sweep_distances_m"});
            auto &ps = c.pattern;
            const auto ap = p.pair("aperture_m", {ps.lx, ps.ly});
            ps.lx = ap[0], ps.ly = ap[1];
            const auto g = p.pair("grid", {double(ps.grid_nx), double(ps.grid_ny)});
            ps.grid_nx = int(g[0]), ps.grid_ny = int(g[1]);
            ps.pt = p.number("pt_A2", ps.pt);
            ps.foci = p.points("foci_m", ps.foci);
            if (p.has("plane"))
                ps.plane = parse_plane(p.child("plane", {"x_m", "z_m", "y_m", "points"}), ps.plane);
            ps.axis_z = p.pair("axis_z_m", ps.axis_z);
            ps.axis_points = p.integer("axis_points", ps.axis_points);
            if (p.has("fresnel_distances_m"))
                ps.fresnel_distances = p.numbers("fresnel_distances_m");
            if (p.has("focus_sweep_foci_m"))
                ps.focus_sweep_foci = p.numbers("focus_sweep_foci_m");
            if (p.has("focus_sweep_distances_m"))
                ps.focus_sweep_distances = p.numbers("focus_sweep_distances_m");
            if (!(ps.lx > 0 && ps.ly > 0 && ps.grid_nx >= 1 && ps.grid_ny >= 1))
                p.fail("aperture_m", "aperture and grid must be positive");
            if (!(ps.pt > 0))
                p.fail("pt_A2", "must be positive");
            if (ps.axis_points < 2)
                p.fail("axis_points", "need at least two points");
        }
        return c;
    }

    inline ExperimentConfig load_config(const std::string &path, const ConfigOverrides &ov = {})
    {
        return parse_config(parse_json_text(read_file(path), path), ov);
    }

    // ---------------------------------------------------------------- sweeps

    inline Scenario apply_sweep(const Scenario &base, const std::string &var, double v)
    {
        Scenario s = base;
        if (var == "none")
            return s;
        if (var == "pt_A2")
            s.pt = v;
        else if (var == "p0_W")
            s.p0 = v;
        else if (var == "area_m2")
        {
            // square aperture; the grid keeps its sample spacing
            require(v > 0.0, "aperture area must be positive");
            const double side = std::sqrt(v);
            s.grid_nx = std::max(1, int(std::lround(base.grid_nx * side / base.lx)));
            s.grid_ny = std::max(1, int(std::lround(base.grid_ny * side / base.ly)));
            s.lx = s.ly = side;
        }
        else if (var == "distance_m")
        {
            require(v > 0.0, "distance must be positive");
            for (auto &d : s.dus)
                d *= v / d.norm();
        }
        else if (var == "basis_n")
            s.basis_n = int(v);
        else
            throw ConfigError("unknown sweep variable '" + var + "'");
        return s;
    }

    inline std::string format_value(double v)
    {
        // shortest text that parses back to the same double
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
        return std::string(buf, r.ptr);
    }

    // ---------------------------------------------------------------- reports

    struct SchemeOutcome
    {
        SolveReport report;
        std::string error;      // empty unless the scheme threw
        std::string space;      // fourier, rect or mf
    };

    inline json complex_vector_json(const VecXc &w)
    {
        json re = json::array(), im = json::array();
        for (const auto &x : w)
            re.push_back(x.real()), im.push_back(x.imag());
        return {{"re", re}, {"im", im}};
    }

    inline VecXc complex_vector_from_json(const json &j)
    {
        const auto re = j.at("re").get<std::vector<double>>();
        const auto im = j.at("im").get<std::vector<double>>();
        require(re.size() == im.size(), "weight vector parts differ in length");
        VecXc w(Eigen::Index(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i)
            w(Eigen::Index(i)) = cplx(re[i], im[i]);
        return w;
    }

    inline json report_to_json(const SchemeOutcome &o, const json &config_echo, const std::string &sweep_var,
                               double sweep_value, const OptimizerOptions &opt)
    {
        const SolveReport &r = o.report;
        json j;
        j["scheme"] = r.scheme;
        j["status"] = o.error.empty() ? r.status : "error";
        if (!o.error.empty())
            j["error"] = o.error;
        j["sweep"] = {{"variable", sweep_var}, {"value", sweep_value}};
        j["r_sum_bits"] = r.r_sum;
        j["rates_bits"] = r.rates;
        j["sinr"] = r.sinr;
        j["eu"] = {{"field_projected_V2m2", r.eu_field_projected},
                   {"field_unprojected_V2m2", r.eu_field_unprojected},
                   {"power_projected_W", r.eu_power_projected},
                   {"power_unprojected_W", r.eu_power_unprojected},
                   {"harvest_W", r.eu_harvest}};
        j["p0_prime_V2m2"] = r.p0_prime;
        j["gamma_star_V2m2"] = r.gamma_star;
        j["total_power_A2"] = r.total_power;
        j["iterations"] = {{"outer", r.outer_iterations}, {"inner", r.inner_iterations}, {"rejected", r.rejected_steps}};
        json req = json::array();
        for (const auto &h : r.r_eq_history)
            req.push_back({{"outer", h.outer}, {"tag", h.tag}, {"value", h.value}});
        j["history"] = {{"r_eq", req}, {"r_sum_bits", r.r_sum_history}, {"eu_power_W", r.eu_power_history}};
        j["audit"] = {{"max_increase", r.audit.max_increase},
                      {"max_reinit_increase", r.audit.max_reinit_increase},
                      {"reinit_increases", r.audit.reinit_increases},
                      {"monotone", r.audit.monotone}};
        j["seconds"] = r.seconds;
        json streams = json::array();
        for (const auto &w : r.state.w)
            streams.push_back(complex_vector_json(w));
        j["weights"] = {{"space", o.space}, {"streams", streams}};
        j["deviations"] = {{"p0_prime_correction", true},
                           {"squared_norm_power_constraint", true},
                           {"subspace_reduction", true},
                           {"power_rescale", opt.power_rescale}};
        j["config"] = config_echo;
        return j;
    }

    // ---------------------------------------------------------------- current and beam maps

    struct CurrentMapRow
    {
        double x, y, amplitude, phase;
    };

    // x-component of theta on the aperture grid, amplitude normalized to max 1, phase in (-pi, pi]
    inline std::vector<CurrentMapRow> current_map_rows(const CurrentMap &theta, const Aperture &aperture)
    {
        require(theta.size() == aperture.size(), "current map does not match the aperture");
        double mx = 0.0;
        for (const auto &t : theta)
            mx = std::max(mx, std::abs(t(0)));
        std::vector<CurrentMapRow> rows;
        rows.reserve(theta.size());
        for (std::size_t m = 0; m < theta.size(); ++m)
        {
            double ph = std::arg(theta[m](0));
            if (ph <= -std::numbers::pi)
                ph = std::numbers::pi;
            rows.push_back({aperture.samples[m].position.x(), aperture.samples[m].position.y(),
                            mx > 0.0 ? std::abs(theta[m](0)) / mx : 0.0, ph});
        }
        return rows;
    }

    inline void write_current_map_csv(const std::string &path, const std::vector<CurrentMapRow> &rows)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open " + path);
        os << "x,y,amplitude,phase\n" << std::setprecision(12);
        for (const auto &r : rows)
            os << r.x << ',' << r.y << ',' << r.amplitude << ',' << r.phase << '\n';
    }

    // One CSV per user: <prefix>_user<k>.csv, DUs first
    inline std::vector<std::string> emit_current_maps(const std::vector<CurrentMap> &thetas, const Aperture &aperture,
                                                      const std::string &prefix)
    {
        std::vector<std::string> paths;
        for (std::size_t k = 0; k < thetas.size(); ++k)
        {
            paths.push_back(prefix + "_user" + std::to_string(k + 1) + ".csv");
            write_current_map_csv(paths.back(), current_map_rows(thetas[k], aperture));
        }
        return paths;
    }

    inline double amplitude_cosine(const std::vector<CurrentMapRow> &a, const std::vector<CurrentMapRow> &b)
    {
        require(a.size() == b.size(), "maps differ in size");
        double ab = 0.0, aa = 0.0, bb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            ab += a[i].amplitude * b[i].amplitude, aa += a[i].amplitude * a[i].amplitude, bb += b[i].amplitude * b[i].amplitude;
        return aa > 0.0 && bb > 0.0 ? ab / std::sqrt(aa * bb) : 0.0;
    }

    // Current maps of a stored report, rebuilt from its config echo
    inline std::vector<CurrentMap> currents_from_report(const json &report, Aperture &aperture_out)
    {
        const auto &cfg = report.at("config");
        const Scenario s = parse_scenario(FieldReader(cfg.at("scenario"), "config.scenario",
                                                      {"frequency_Hz", "z0_Ohm", "z_Ohm", "aperture_m", "grid", "basis_n",
                                                       "dus_m", "eus_m", "pt_A2", "p0_W", "sigma2_V2m2",
                                                       "incidence_rad", "circuit"}),
                                          Scenario{});
        const std::string space = report.at("weights").at("space").get<std::string>();
        std::vector<CurrentMap> out;
        if (space == "mf")
        {
            const Aperture ap = s.aperture();
            MfOptions mo;
            mo.equal_power = cfg.value("mf_equal_power", false);
            out = mf_beamformers(make_problem(s, ap), ap, mo);
            aperture_out = ap;
            return out;
        }
        std::vector<VecXc> w;
        for (const auto &st : report.at("weights").at("streams"))
            w.push_back(complex_vector_from_json(st));
        if (space == "fourier")
        {
            FourierSpace f(s.basis(), s.aperture());
            for (const auto &x : w)
                out.push_back(f.synthesize(x));
            aperture_out = f.aperture();
        }
        else if (space == "rect")
        {
            RectArraySpace r(make_half_wavelength_array(s.lx, s.ly, s.medium.wavelength), s.aperture());
            for (const auto &x : w)
                out.push_back(r.synthesize(x));
            aperture_out = r.aperture();
        }
        else
            throw ConfigError("report has no stored beamformers (weights.space = '" + space + "')");
        return out;
    }

    // ---------------------------------------------------------------- single sweep point

    // Runs every requested scheme on one scenario; scheme failures become error outcomes
    inline std::vector<SchemeOutcome> run_point(const Scenario &s, const std::vector<std::string> &schemes,
                                                const ExperimentConfig &cfg)
    {
        std::vector<SchemeOutcome> out;
        std::unique_ptr<FourierSpace> fsp;
        std::unique_ptr<RectArraySpace> rsp;
        std::optional<IdetProblem> pf, pr;
        std::optional<SchemeOutcome> hidet;
        auto fourier = [&]() -> const FourierSpace & {
            if (!fsp)
            {
                fsp = std::make_unique<FourierSpace>(s.basis(), s.aperture());
                pf = make_problem(s, fsp->aperture());
            }
            return *fsp;
        };
        auto rect = [&]() -> const RectArraySpace & {
            if (!rsp)
            {
                rsp = std::make_unique<RectArraySpace>(make_half_wavelength_array(s.lx, s.ly, s.medium.wavelength),
                                                       s.aperture());
                pr = make_problem(s, rsp->aperture());
            }
            return *rsp;
        };
        auto config_for = [&](InitMode m, const std::string &tag) {
            AlgorithmConfig a;
            a.options = cfg.options;
            a.init = m;
            a.seed = cfg.seed;
            a.scheme = tag;
            return a;
        };
        auto h_idet = [&]() -> const SchemeOutcome & {
            if (!hidet)
            {
                SchemeOutcome o;
                o.space = "fourier";
                try
                {
                    const auto &sp = fourier();
                    o.report = run_idet(sp, *pf, config_for(InitMode::proposed, "H-IDET"));
                }
                catch (const std::exception &e)
                {
                    o.report.scheme = "H-IDET";
                    o.error = e.what();
                }
                hidet = std::move(o);
            }
            return *hidet;
        };

        for (const auto &name : schemes)
        {
            SchemeOutcome o;
            try
            {
                if (name == "H-IDET")
                    o = h_idet();
                else if (name == "UPPER")
                {
                    const auto &h = h_idet();
                    o.space = "fourier";
                    if (!h.error.empty())
                        throw std::runtime_error("H-IDET failed: " + h.error);
                    const auto &sp = fourier();
                    o.report = upper_bound_report(sp, *pf, h.report);
                }
                else if (name == "RI-SCA" || name == "RI-BCD")
                {
                    o.space = "fourier";
                    const auto &sp = fourier();
                    o.report = run_idet(
                        sp, *pf, config_for(name == "RI-SCA" ? InitMode::random_sca : InitMode::random_global, name));
                }
                else if (name == "FD" || name == "FD-IDET")
                {
                    o.space = "rect";
                    const auto &sp = rect();
                    const auto ac = config_for(InitMode::proposed, name);
                    o.report = name == "FD" ? fd_solve(sp, *pr, ac) : fd_idet_solve(sp, *pr, ac);
                }
                else if (name == "MF")
                {
                    o.space = "mf";
                    const auto &sp = fourier();
                    MfOptions mo;
                    mo.equal_power = cfg.mf_equal_power;
                    o.report = mf_solve(*pf, sp.aperture(), mo);
                }
                else
                    throw ConfigError("unknown scheme '" + name + "'");
            }
            catch (const std::exception &e)
            {
                o.error = e.what();
            }
            o.report.scheme = name;
            out.push_back(std::move(o));
        }
        return out;
    }

    // ---------------------------------------------------------------- results table

    inline std::string results_header(std::size_t k, std::size_t l)
    {
        std::string h = "sweep_var,sweep_value,scheme,r_sum_bits";
        for (std::size_t i = 1; i <= l; ++i)
            h += ",eu" + std::to_string(i) + "_harvest_W";
        for (std::size_t i = 1; i <= l; ++i)
            h += ",eu" + std::to_string(i) + "_harvest_unprojected_W";
        for (std::size_t i = 1; i <= k; ++i)
            h += ",du" + std::to_string(i) + "_rate_bits";
        return h + ",outer_iterations,inner_iterations,status,seconds";
    }

    inline std::string results_row(const std::string &var, double value, const SchemeOutcome &o, std::size_t k,
                                   std::size_t l, const EhCircuit &circuit)
    {
        const auto &r = o.report;
        std::ostringstream os;
        os << std::setprecision(12);
        auto at = [](const std::vector<double> &v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
        os << var << ',' << format_value(value) << ',' << r.scheme << ',' << r.r_sum;
        for (std::size_t i = 0; i < l; ++i)
            os << ',' << at(r.eu_harvest, i);
        for (std::size_t i = 0; i < l; ++i)
            os << ',' << (i < r.eu_power_unprojected.size() ? eh_output(r.eu_power_unprojected[i], circuit) : 0.0);
        for (std::size_t i = 0; i < k; ++i)
            os << ',' << at(r.rates, i);
        os << ',' << r.outer_iterations << ',' << r.inner_iterations << ',' << (o.error.empty() ? r.status : "error")
           << ',' << r.seconds;
        return os.str();
    }

    struct ResultRow
    {
        std::string sweep_var, sweep_value, scheme, status;
        double r_sum = 0.0, seconds = 0.0;
        std::vector<double> eu_harvest, eu_harvest_unprojected, rates;
        int outer = 0, inner = 0;
    };

    inline std::vector<std::string> split_csv_line(const std::string &line)
    {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string x; std::getline(ss, x, ',');)
            f.push_back(x);
        if (!line.empty() && line.back() == ',')
            f.emplace_back();
        return f;
    }

    inline std::vector<ResultRow> read_results(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw std::runtime_error("cannot open " + path);
        std::string header;
        std::getline(is, header);
        const auto h = split_csv_line(header);
        std::size_t l = 0, k = 0;
        for (const auto &c : h)
        {
            if (c.starts_with("eu") && c.ends_with("_harvest_W"))
                ++l;
            if (c.starts_with("du") && c.ends_with("_rate_bits"))
                ++k;
        }
        std::vector<ResultRow> rows;
        for (std::string line; std::getline(is, line);)
        {
            const auto f = split_csv_line(line);
            if (f.size() != h.size())
                continue; // torn last line of an interrupted run
            ResultRow r;
            std::size_t i = 0;
            r.sweep_var = f[i++], r.sweep_value = f[i++], r.scheme = f[i++];
            r.r_sum = std::stod(f[i++]);
            for (std::size_t j = 0; j < l; ++j)
                r.eu_harvest.push_back(std::stod(f[i++]));
            for (std::size_t j = 0; j < l; ++j)
                r.eu_harvest_unprojected.push_back(std::stod(f[i++]));
            for (std::size_t j = 0; j < k; ++j)
                r.rates.push_back(std::stod(f[i++]));
            r.outer = std::stoi(f[i++]);
            r.inner = std::stoi(f[i++]);
            r.status = f[i++];
            r.seconds = std::stod(f[i++]);
            rows.push_back(std::move(r));
        }
        return rows;
    }

    // Serializes every file write through one thread
    class FileWriter
    {
    public:
        FileWriter() : worker_([this] { loop(); }) {}
        FileWriter(const FileWriter &) = delete;
        FileWriter &operator=(const FileWriter &) = delete;
        ~FileWriter() { close(); }

        void submit(std::function<void()> job)
        {
            {
                std::lock_guard lk(m_);
                q_.push_back(std::move(job));
            }
            cv_.notify_one();
        }

        void close()
        {
            {
                std::lock_guard lk(m_);
                if (done_)
                    return;
                done_ = true;
            }
            cv_.notify_one();
            worker_.join();
            if (!error_.empty())
                throw std::runtime_error(error_);
        }

    private:
        void loop()
        {
            for (;;)
            {
                std::function<void()> job;
                {
                    std::unique_lock lk(m_);
                    cv_.wait(lk, [&] { return done_ || !q_.empty(); });
                    if (q_.empty())
                        return;
                    job = std::move(q_.front());
                    q_.pop_front();
                }
                try
                {
                    job();
                }
                catch (const std::exception &e)
                {
                    if (error_.empty())
                        error_ = e.what();
                }
            }
        }

        std::mutex m_;
        std::condition_variable cv_;
        std::deque<std::function<void()>> q_;
        bool done_ = false;
        std::string error_;
        std::thread worker_;
    };

    inline std::string file_token(std::string s)
    {
        for (auto &c : s)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_'))
                c = '_';
        return s;
    }

    struct ExperimentSummary
    {
        std::size_t points = 0, solved = 0, skipped = 0;
        std::string results_path;
        std::vector<std::string> report_paths;
    };

    inline ExperimentSummary run_experiment(const ExperimentConfig &cfg, std::ostream *log = &std::cerr)
    {
        ExperimentSummary sum;
        const fs::path out(cfg.out_dir);
        fs::create_directories(out / "reports");
        if (cfg.dump_iterates)
            fs::create_directories(out / "iterates");
        if (cfg.current_maps || cfg.beam_map_plane)
            fs::create_directories(out / "maps");

        const json echo = config_to_json(cfg);
        {
            std::ofstream os(out / "config.json");
            os << echo.dump(2) << '\n';
        }

        const std::string var = cfg.sweep ? cfg.sweep->variable : "none";
        const std::vector<double> values = cfg.sweep ? cfg.sweep->values : std::vector<double>{0.0};
        const std::size_t K = cfg.scenario.dus.size(), L = cfg.scenario.eus.size();
        const std::string header = results_header(K, L);
        sum.results_path = (out / "results.csv").string();

        // rows already on disk are not recomputed
        std::set<std::pair<std::string, std::string>> done;
        if (fs::exists(sum.results_path) && fs::file_size(sum.results_path) > 0)
        {
            std::ifstream is(sum.results_path);
            std::string h;
            std::getline(is, h);
            if (h != header)
                throw ConfigError(sum.results_path + " has a different header; use another --out directory");
            for (const auto &r : read_results(sum.results_path))
                done.insert({r.sweep_value, r.scheme});
        }
        else
        {
            std::ofstream os(sum.results_path);
            os << header << '\n';
        }

        struct Job
        {
            double value;
            std::vector<std::string> schemes;
        };
        std::vector<Job> jobs;
        for (double v : values)
        {
            Job j{v, {}};
            for (const auto &s : cfg.schemes)
                if (!done.count({format_value(v), s}))
                    j.schemes.push_back(s);
                else
                    ++sum.skipped;
            if (!j.schemes.empty())
                jobs.push_back(std::move(j));
        }
        sum.points = values.size();

        FileWriter writer;
        std::mutex log_m, sum_m;
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i; (i = next++) < jobs.size();)
            {
                const Job &job = jobs[i];
                SchemeOutcome failed;
                std::vector<SchemeOutcome> res;
                Scenario s;
                try
                {
                    s = apply_sweep(cfg.scenario, var, job.value);
                    res = run_point(s, job.schemes, cfg);
                }
                catch (const std::exception &e)
                {
                    for (const auto &name : job.schemes)
                    {
                        SchemeOutcome o;
                        o.report.scheme = name;
                        o.error = e.what();
                        res.push_back(o);
                    }
                }
                ExperimentConfig point_cfg = cfg;
                point_cfg.scenario = s;
                const json point_echo = config_to_json(point_cfg);
                for (auto &o : res)
                {
                    const std::string stem = file_token(var + "_" + format_value(job.value) + "_" + o.report.scheme);
                    const std::string row = results_row(var, job.value, o, K, L, s.circuit);
                    auto rep = std::make_shared<json>(report_to_json(o, point_echo, var, job.value, cfg.options));
                    const std::string rpath = (out / "reports" / (stem + ".json")).string();
                    {
                        std::lock_guard lk(sum_m);
                        sum.report_paths.push_back(rpath);
                        ++sum.solved;
                    }
                    if (log)
                    {
                        std::lock_guard lk(log_m);
                        *log << var << '=' << format_value(job.value) << ' ' << o.report.scheme << ": r_sum "
                             << o.report.r_sum << " bits, " << (o.error.empty() ? o.report.status : "error: " + o.error)
                             << ", " << o.report.seconds << " s\n";
                    }
                    // auxiliary files go first so a row on disk implies its report exists
                    if (cfg.dump_iterates && o.error.empty())
                    {
                        auto hist = std::make_shared<std::vector<ReqRecord>>(o.report.r_eq_history);
                        auto cert = std::make_shared<std::optional<SolveCertificate>>(o.report.last_certificate);
                        const auto base = out / "iterates" / stem;
                        writer.submit([hist, cert, base] {
                            std::ofstream os(base.string() + "_req.csv");
                            os << "outer,tag,value\n" << std::setprecision(17);
                            for (const auto &h : *hist)
                                os << h.outer << ',' << h.tag << ',' << h.value << '\n';
                            if (*cert)
                                write_iterates_csv(base.string() + "_solver.csv", **cert);
                        });
                    }
                    if ((cfg.current_maps || cfg.beam_map_plane) && o.error.empty() && o.report.status != "infeasible" &&
                        (o.space == "fourier" || o.space == "rect") && !o.report.state.w.empty())
                    {
                        std::vector<CurrentMap> thetas;
                        Aperture ap;
                        if (o.space == "fourier")
                        {
                            FourierSpace f(s.basis(), s.aperture());
                            for (const auto &w : o.report.state.w)
                                thetas.push_back(f.synthesize(w));
                            ap = f.aperture();
                        }
                        else
                        {
                            RectArraySpace r(make_half_wavelength_array(s.lx, s.ly, s.medium.wavelength), s.aperture());
                            for (const auto &w : o.report.state.w)
                                thetas.push_back(r.synthesize(w));
                            ap = r.aperture();
                        }
                        std::vector<BeamMap> beams;
                        if (cfg.beam_map_plane)
                            for (const auto &t : thetas)
                                beams.push_back(beam_map(t, cfg.beam_map_plane->points(), s.medium, ap));
                        auto th = std::make_shared<std::vector<CurrentMap>>(std::move(thetas));
                        auto aps = std::make_shared<Aperture>(std::move(ap));
                        auto bms = std::make_shared<std::vector<BeamMap>>(std::move(beams));
                        const auto base = (out / "maps" / stem).string();
                        const bool cur = cfg.current_maps;
                        writer.submit([th, aps, bms, base, cur] {
                            if (cur)
                                emit_current_maps(*th, *aps, base + "_current");
                            for (std::size_t k = 0; k < bms->size(); ++k)
                                write_beam_map_csv(base + "_beam_user" + std::to_string(k + 1) + ".csv", (*bms)[k]);
                        });
                    }
                    writer.submit([rep, rpath, row, path = sum.results_path] {
                        {
                            std::ofstream os(rpath);
                            os << rep->dump(1) << '\n';
                        }
                        std::ofstream os(path, std::ios::app);
                        os << row << '\n';
                    });
                }
            }
        };

        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t nthreads = std::max<std::size_t>(
            1, std::min<std::size_t>(jobs.size(), cfg.workers > 0 ? std::size_t(cfg.workers) : hw));
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t + 1 < nthreads; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto &t : pool)
            t.join();
        writer.close();
        return sum;
    }

    // ---------------------------------------------------------------- single-EU focusing study

    struct SingleEuStudy
    {
        struct Axis
        {
            Point3 focus;
            std::vector<double> z, compensated;
            double focus_value = 0.0; // compensated pattern at the focus, same normalization
        };
        std::vector<Axis> axes;
        std::vector<double> fresnel_d, em_power, fresnel_power; // W before the rectifier
        double fresnel_bound = 0.0;                             // 0.5 sqrt(D^3 / lambda)
        std::vector<double> sweep_d, sweep_foci;
        std::vector<std::vector<double>> sweep_power; // [focus][distance], W
        std::vector<std::string> files;
    };

    inline SingleEuStudy run_single_eu_study(const ExperimentConfig &cfg, bool write_files = true)
    {
        const auto &ps = cfg.pattern;
        const Medium &md = cfg.scenario.medium;
        const auto geom = ReceiverGeometry::isotropic(md, cfg.scenario.incidence);
        const auto &circ = cfg.scenario.circuit;
        const Aperture ap = make_aperture(ps.lx, ps.ly, ps.grid_nx, ps.grid_ny);
        const fs::path out(cfg.out_dir);
        if (write_files)
            fs::create_directories(out);
        SingleEuStudy st;

        // beam patterns: plane map and z-axis scan per focus
        std::vector<Point3> zscan;
        for (int i = 0; i < ps.axis_points; ++i)
            zscan.emplace_back(0.0, 0.0, ps.axis_z[0] + (ps.axis_z[1] - ps.axis_z[0]) * i / (ps.axis_points - 1));
        for (const auto &f : ps.foci)
        {
            const auto ch = sample_user_channel(ap, f, md);
            const auto beam = matched_beam(ch, optimal_eu_combiner(ch, ap), ps.pt, ap, geom);
            std::vector<Point3> pts = zscan;
            pts.push_back(f);
            const auto raw = beam_pattern_scan(beam.theta, pts, md, ap, Normalization::raw);
            SingleEuStudy::Axis a;
            a.focus = f;
            double mx = 0.0;
            for (std::size_t i = 0; i < zscan.size(); ++i)
                mx = std::max(mx, raw[i] * zscan[i].squaredNorm());
            for (std::size_t i = 0; i < zscan.size(); ++i)
            {
                a.z.push_back(zscan[i].z());
                a.compensated.push_back(raw[i] * zscan[i].squaredNorm() / mx);
            }
            a.focus_value = raw.back() * f.squaredNorm() / mx;
            st.axes.push_back(a);
            if (write_files)
            {
                const std::string tag = file_token(format_value(f.x()) + "_" + format_value(f.y()) + "_" + format_value(f.z()));
                const auto plane = beam_map(beam.theta, ps.plane.points(), md, ap);
                st.files.push_back((out / ("pattern_plane_focus_" + tag + ".csv")).string());
                write_beam_map_csv(st.files.back(), plane);
                const auto axis = beam_map(beam.theta, zscan, md, ap);
                st.files.push_back((out / ("pattern_axis_focus_" + tag + ".csv")).string());
                write_beam_map_csv(st.files.back(), axis);
            }
        }

        // exact channel versus Fresnel-designed beam along the axis
        st.fresnel_bound = fresnel_lower_bound(ap.diagonal(), md.wavelength);
        for (double d : ps.fresnel_distances)
        {
            const auto ch = sample_user_channel(ap, Point3(0, 0, d), md);
            st.fresnel_d.push_back(d);
            st.em_power.push_back(focus_power_closed_form(ch, ap, ps.pt, geom));
            st.fresnel_power.push_back(fresnel_designed_power(ch, ap, md, ps.pt, geom, 1));
        }

        // fixed foci, harvest against distance
        st.sweep_d = ps.focus_sweep_distances;
        st.sweep_foci = ps.focus_sweep_foci;
        std::vector<UserChannel> chans;
        for (double d : st.sweep_d)
            chans.push_back(sample_user_channel(ap, Point3(0, 0, d), md));
        for (double f : st.sweep_foci)
        {
            const auto ch = sample_user_channel(ap, Point3(0, 0, f), md);
            const auto beam = matched_beam(ch, optimal_eu_combiner(ch, ap), ps.pt, ap, geom);
            std::vector<double> row;
            for (const auto &c : chans)
                row.push_back(geom.power_factor() * radiate_field(c, beam.theta, ap).squaredNorm());
            st.sweep_power.push_back(row);
        }

        if (write_files)
        {
            st.files.push_back((out / "em_vs_fresnel.csv").string());
            std::ofstream a(st.files.back());
            a << "distance_m,em_power_W,fresnel_power_W,em_harvest_W,fresnel_harvest_W,relative_gap\n"
              << std::setprecision(12);
            for (std::size_t i = 0; i < st.fresnel_d.size(); ++i)
                a << st.fresnel_d[i] << ',' << st.em_power[i] << ',' << st.fresnel_power[i] << ','
                  << eh_output(st.em_power[i], circ) << ',' << eh_output(st.fresnel_power[i], circ) << ','
                  << (st.em_power[i] - st.fresnel_power[i]) / st.em_power[i] << '\n';
            st.files.push_back((out / "focus_sweep.csv").string());
            std::ofstream b(st.files.back());
            b << "distance_m";
            for (double f : st.sweep_foci)
                b << ",focus_" << format_value(f) << "m_power_W";
            for (double f : st.sweep_foci)
                b << ",focus_" << format_value(f) << "m_harvest_W";
            b << '\n' << std::setprecision(12);
            for (std::size_t i = 0; i < st.sweep_d.size(); ++i)
            {
                b << st.sweep_d[i];
                for (const auto &r : st.sweep_power)
                    b << ',' << r[i];
                for (const auto &r : st.sweep_power)
                    b << ',' << eh_output(r[i], circ);
                b << '\n';
            }
            st.files.push_back((out / "pattern_config.json").string());
            std::ofstream c(st.files.back());
            c << config_to_json(cfg).dump(2) << '\n';
        }
        return st;
    }

} // namespace holobeam

#endif
