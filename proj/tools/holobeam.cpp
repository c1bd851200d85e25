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

#include <holobeam/harness.hpp>

#include <CLI11.hpp>

using namespace holobeam;

namespace
{
    std::vector<std::string> split_list(const std::string &s)
    {
        std::vector<std::string> out;
        std::stringstream ss(s);
        for (std::string x; std::getline(ss, x, ',');)
            if (!x.empty())
                out.push_back(x);
        return out;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"holobeam: holographic beamforming for integrated data and energy transfer"};
    app.require_subcommand(1);

    std::string run_config, out_dir, profile, schemes;
    std::uint64_t seed = 0;
    auto *run = app.add_subcommand("run", "run a sweep experiment and write results.csv and report JSONs");
    run->add_option("config", run_config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto *out_opt = run->add_option("--out", out_dir, "output directory");
    auto *prof_opt = run->add_option("--profile", profile, "scenario profile")->check(CLI::IsMember({"desk", "full"}));
    auto *sch_opt = run->add_option("--schemes", schemes, "comma-separated scheme list");
    auto *seed_opt = run->add_option("--seed", seed, "random seed for the RI ablations");

    std::string pattern_config, pattern_out;
    auto *pattern = app.add_subcommand("pattern", "single-EU focusing study: beam maps, EM vs Fresnel, focus sweep");
    pattern->add_option("config", pattern_config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto *pout_opt = pattern->add_option("--out", pattern_out, "output directory");

    std::string report_path, maps_out;
    auto *maps = app.add_subcommand("maps", "current-distribution maps (x, y, amplitude, phase) from a report JSON");
    maps->add_option("report", report_path, "report JSON written by run")->required()->check(CLI::ExistingFile);
    maps->add_option("--out", maps_out, "output directory (default: next to the report)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            ConfigOverrides ov;
            if (*out_opt)
                ov.out_dir = out_dir;
            if (*prof_opt)
                ov.profile = profile;
            if (*sch_opt)
                ov.schemes = split_list(schemes);
            if (*seed_opt)
                ov.seed = seed;
            const auto cfg = load_config(run_config, ov);
            const auto sum = run_experiment(cfg);
            std::cout << "points " << sum.points << ", solved " << sum.solved << ", skipped " << sum.skipped << '\n'
                      << "results " << sum.results_path << '\n';
        }
        else if (*pattern)
        {
            ConfigOverrides ov;
            if (*pout_opt)
                ov.out_dir = pattern_out;
            const auto cfg = load_config(pattern_config, ov);
            const auto st = run_single_eu_study(cfg);
            for (const auto &f : st.files)
                std::cout << f << '\n';
        }
        else if (*maps)
        {
            const json rep = parse_json_text(read_file(report_path), report_path);
            Aperture ap;
            const auto thetas = currents_from_report(rep, ap);
            const fs::path rp(report_path);
            const fs::path dir = maps_out.empty() ? rp.parent_path() : fs::path(maps_out);
            fs::create_directories(dir.empty() ? fs::path(".") : dir);
            for (const auto &f : emit_current_maps(thetas, ap, (dir / rp.stem()).string() + "_current"))
                std::cout << f << '\n';
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "holobeam: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
