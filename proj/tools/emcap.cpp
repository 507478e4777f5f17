// SPDX-License-Identifier: Apache-2.0
//
// emcap: spatial eigenmodes and capacity of line-of-sight EM links
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

// emcap command line: translator, sgf-error, modes, capacity.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime or numerical failure.

#include "emcap/commands.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace
{
    struct GlobalOptions
    {
        std::string preset = "paper";
        std::string config_path;
        std::string out_dir;
        std::vector<std::string> overrides;
        bool dump_config = false;
    };

    emcap::ExperimentConfig resolve(const GlobalOptions &g)
    {
        emcap::ExperimentConfig cfg = emcap::preset_config(g.preset);
        if (!g.config_path.empty())
            cfg = emcap::load_config_file(g.config_path, cfg);
        for (const auto &kv : g.overrides)
            emcap::apply_override(cfg, kv);
        if (!g.out_dir.empty())
            cfg.output_dir = g.out_dir;
        cfg.preset = g.preset;
        emcap::validate(cfg);
        return cfg;
    }

    void print_report(const emcap::CommandReport &rep)
    {
        for (const auto &n : rep.notes)
            std::cout << n << "\n";
        for (const auto &f : rep.files)
            std::cout << "  wrote " << f << "\n";
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"emcap: eigenmodes and capacity of line-of-sight EM links"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--preset", g.preset, "Base preset")->check(CLI::IsMember({"paper", "ci"}));
    app.add_option("--config", g.config_path, "key = value config file applied on top of the preset");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--set", g.overrides, "Override one key (key=value), repeatable")->take_all();
    app.add_flag("--dump-config", g.dump_config, "Print the resolved config before running");

    auto *translator = app.add_subcommand("translator", "Normalized translator magnitude against angle");
    auto *sgf = app.add_subcommand("sgf-error", "Plane-wave Green's function error against cap half-angle");
    auto *modes = app.add_subcommand("modes", "Solve for the eigenmodes of the link");
    std::string modes_file;
    auto *capacity = app.add_subcommand("capacity", "Capacity curves from a mode file");
    capacity->add_option("--modes", modes_file, "Mode file written by `modes` (default <out>/modes.json)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 1;
    }

    try
    {
        const emcap::ExperimentConfig cfg = resolve(g);
        if (g.dump_config)
            std::cout << emcap::to_config_text(cfg);

        if (*translator)
            print_report(emcap::cmd_translator(cfg));
        else if (*sgf)
            print_report(emcap::cmd_sgf_error(cfg));
        else if (*modes)
            print_report(emcap::cmd_modes(cfg));
        else if (*capacity)
        {
            const std::string path =
                modes_file.empty() ? (std::filesystem::path(cfg.output_dir) / "modes.json").string() : modes_file;
            print_report(emcap::cmd_capacity(cfg, path));
        }
        return 0;
    }
    catch (const emcap::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::length_error &e)
    {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: lower tx_points/rx_points, raise entry_budget, or use --preset ci\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
