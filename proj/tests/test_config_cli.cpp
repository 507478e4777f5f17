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


#include "emcap/commands.hpp"
#include "emcap/config.hpp"
#include "emcap/io.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace emcap;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("emcap_test_" + std::to_string(::getpid())) / name;
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::vector<std::string> lines(const fs::path &p)
    {
        std::vector<std::string> out;
        std::ifstream in(p);
        for (std::string l; std::getline(in, l);)
            out.push_back(l);
        return out;
    }

    int run_cli(const std::string &args)
    {
        const std::string cmd = std::string(EMCAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    bool same_files(const fs::path &a, const fs::path &b)
    {
        std::vector<std::string> names;
        for (const auto &e : fs::directory_iterator(a))
            names.push_back(e.path().filename().string());
        std::size_t nb = 0;
        for ([[maybe_unused]] const auto &e : fs::directory_iterator(b))
            ++nb;
        if (names.size() != nb || names.empty())
            return false;
        for (const auto &n : names)
            if (slurp(a / n) != slurp(b / n))
                return false;
        return true;
    }
}

TEST_CASE("presets")
{
    const auto p = preset_config("paper");
    CHECK(p.distance == 25.5);
    CHECK(p.theta_e_deg == 60.0);
    CHECK(p.basis_order == 36);
    CHECK(p.L == 93);
    CHECK(p.power == 1.0);
    CHECK(p.tx_side_x == 10.0);
    CHECK(p.rx_side_y == 8.0);
    CHECK(p.windowed);
    CHECK_NOTHROW(validate(p));

    const auto c = preset_config("ci");
    CHECK(c.tx_side_x == 4.0);
    CHECK(c.rx_side_x == 3.2);
    CHECK(c.distance == 10.2);
    CHECK(c.basis_order == 14);
    CHECK(c.L == 0);
    CHECK_NOTHROW(validate(c));
    CHECK(link_geometry(c).default_truncation() == 42);

    CHECK_THROWS_AS(preset_config("desk"), ConfigError);
}

TEST_CASE("config text: parsing, errors and round trip")
{
    const auto base = preset_config("paper");
    const auto cfg = parse_config_text("# comment\n\ndistance = 30   # trailing\nsnr_db = 0:5:20\nwindowed = no\n"
                                       "tx_center = 1, 2, 3\nmode_maps = 2,4\n",
                                       base);
    CHECK(cfg.distance == 30.0);
    CHECK(cfg.snr_db == std::vector<double>{0, 5, 10, 15, 20});
    CHECK_FALSE(cfg.windowed);
    CHECK(cfg.tx_center == std::array<double, 3>{1, 2, 3});
    CHECK(cfg.mode_maps == std::vector<int>{2, 4});

    try
    {
        parse_config_text("distance = 30\nbogus = 1\n", base);
        FAIL("unknown key accepted");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    try
    {
        parse_config_text("\n\n\ndistance = abc\n", base);
        FAIL("bad number accepted");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_config_text("distance 30\n", base), ConfigError);

    auto near = base;
    apply_override(near, "distance=5");
    CHECK_THROWS_WITH_AS(validate(near), doctest::Contains("separation"), ConfigError);
    auto bad = base;
    apply_override(bad, "theta_e_deg=200");
    CHECK_THROWS_AS(validate(bad), ConfigError);
    CHECK_THROWS_AS(apply_override(bad, "tx_points"), ConfigError);

    auto odd = preset_config("ci");
    apply_override(odd, "fit_floor=1.5e-9");
    apply_override(odd, "rx_offset_x=0.1");
    const auto back = parse_config_text(to_config_text(odd), preset_config("paper"));
    CHECK(to_config_text(back) == to_config_text(odd));
    CHECK(config_keys().size() > 30);
}

TEST_CASE("mode file round trip")
{
    auto cfg = preset_config("ci");
    cfg.basis_order = 4;
    const auto sol = solve_link_modes(link_geometry(cfg), solver_settings(cfg));
    ModeFile f;
    f.modes = sol.modes;
    f.geometry = sol.geometry;
    f.solver = {60.0, sol.translator.L, true, sol.directions.n_theta, sol.directions.n_phi, 144, 144};
    const std::string text = mode_file_json(f);
    const ModeFile g = parse_mode_file_json(text);
    CHECK(g.modes.eigenvalues == f.modes.eigenvalues);
    CHECK(g.modes.coefficients == f.modes.coefficients);
    CHECK(g.modes.basis.orders == f.modes.basis.orders);
    CHECK(g.geometry.distance() == doctest::Approx(10.2));
    CHECK(mode_file_json(g) == text);
    CHECK_THROWS_AS(parse_mode_file_json("{}"), std::runtime_error);
    CHECK_THROWS_AS(parse_mode_file_json("not json"), std::runtime_error);
}

TEST_CASE("cli: translator output is deterministic and flat for L = 0")
{
    const auto a = scratch("tr_a"), b = scratch("tr_b"), z = scratch("tr_zero");
    REQUIRE(run_cli("--out " + a.string() + " translator") == 0);
    REQUIRE(run_cli("--out " + b.string() + " translator") == 0);
    CHECK(same_files(a, b));
    const auto rows = lines(a / "translator.csv");
    CHECK(rows.front() == "theta_deg,alpha_unwindowed_norm,alpha_windowed_norm");
    CHECK(rows.size() == 362);

    REQUIRE(run_cli("--out " + z.string() + " --set fig3_L=0 translator") == 0);
    const auto flat = lines(z / "translator.csv");
    for (std::size_t i = 1; i < flat.size(); ++i)
        CHECK(flat[i].substr(flat[i].find(',')) == ",1,1");
}

TEST_CASE("cli: sgf-error")
{
    const auto d = scratch("sgf");
    REQUIRE(run_cli("--out " + d.string() + " --set sweep_theta_deg=180 sgf-error") == 0);
    const auto rows = lines(d / "sgf_error.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "theta_e_deg,rel_error_unwindowed,rel_error_windowed");
    std::stringstream ss(rows[1]);
    std::string th, e0, e1;
    std::getline(ss, th, ',');
    std::getline(ss, e0, ',');
    std::getline(ss, e1, ',');
    CHECK(std::stod(th) == 180.0);
    CHECK(std::stod(e0) < 1e-6);
    CHECK(run_cli("--out " + d.string() + " --set sweep_theta_deg= sgf-error") == 1);
}

TEST_CASE("cli: exit codes")
{
    const auto d = scratch("codes");
    CHECK(run_cli("--out " + d.string() + " --set distance=5 modes") == 1);
    CHECK(run_cli("--out " + d.string() + " --set nonsense=1 modes") == 1);
    CHECK(run_cli("--preset desk translator") == 1);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("--out " + d.string() + " capacity --modes " + (d / "missing.json").string()) == 2);
    CHECK(run_cli("--out " + d.string() + " --preset ci --set entry_budget=100 modes") == 2);

    const fs::path cfg = d / "bad.cfg";
    std::ofstream(cfg) << "distance = 20\nL = x\n";
    CHECK(run_cli("--config " + cfg.string() + " translator") == 1);
}

TEST_CASE("cli: modes and capacity compose on the CI preset")
{
    const auto a = scratch("ci_a"), b = scratch("ci_b");
    for (const auto &d : {a, b})
    {
        REQUIRE(run_cli("--preset ci --out " + d.string() + " modes") == 0);
        REQUIRE(run_cli("--preset ci --out " + d.string() + " capacity") == 0);
    }
    CHECK(same_files(a, b));
    for (const char *f : {"modes.json", "eigenvalues.csv", "gram_currents.csv", "gram_fields.csv",
                          "mode_1_current.csv", "mode_3_field.csv", "mode_5_current.csv", "capacity.csv",
                          "allocation.csv", "spectrum_fit.json", "modes_summary.json"})
        CHECK_MESSAGE(fs::exists(a / f), f);

    CHECK(lines(a / "eigenvalues.csv").front() == "mode_index,beta_raw_ohm2,beta_rel_db");
    CHECK(lines(a / "capacity.csv").front() == "snr_db,sigma2_w,c_waterfill_bits,c_equal_bits,active_channels");
    CHECK(lines(a / "capacity.csv").size() == 32);
    CHECK(lines(a / "allocation.csv").front() == "snr_db,channel_index,power_w");
    CHECK(lines(a / "gram_currents.csv").size() == 1 + 40 * 40);
    CHECK(lines(a / "mode_1_current.csv").size() == 1 + 21 * 21);

    const auto one = scratch("ci_one");
    fs::copy(a / "modes.json", one / "modes.json");
    REQUIRE(run_cli("--preset ci --out " + one.string() + " --set snr_db=12 capacity") == 0);
    CHECK(lines(one / "capacity.csv").size() == 2);

    const std::string py = EMCAP_PYTHON;
    if (py.empty() || std::system((py + " -c 'import jsonschema' > /dev/null 2>&1").c_str()) != 0)
    {
        MESSAGE("python jsonschema not available; schema validation skipped");
        return;
    }
    const std::string check = py +
                              " -c \"import json,sys,jsonschema; "
                              "jsonschema.validate(json.load(open(sys.argv[1])), json.load(open(sys.argv[2])))\" " +
                              (a / "modes.json").string() + " " + EMCAP_SCHEMA_PATH;
    CHECK(std::system(check.c_str()) == 0);
}
