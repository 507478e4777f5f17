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

#include "emcap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace emcap
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream in(s);
            while (std::getline(in, item, sep))
                out.push_back(trim(item));
            return out;
        }

        double to_double(const std::string &s)
        {
            double v = 0;
            const auto *end = s.data() + s.size();
            const auto [p, ec] = std::from_chars(s.data(), end, v);
            if (ec != std::errc() || p != end || s.empty())
                throw ConfigError("expected a number, got '" + s + "'");
            return v;
        }

        std::int64_t to_int(const std::string &s)
        {
            std::int64_t v = 0;
            const auto *end = s.data() + s.size();
            const auto [p, ec] = std::from_chars(s.data(), end, v);
            if (ec != std::errc() || p != end || s.empty())
                throw ConfigError("expected an integer, got '" + s + "'");
            return v;
        }

        bool to_bool(const std::string &s)
        {
            if (s == "1" || s == "true" || s == "yes" || s == "on")
                return true;
            if (s == "0" || s == "false" || s == "no" || s == "off")
                return false;
            throw ConfigError("expected a boolean, got '" + s + "'");
        }

        std::string fmt(double v)
        {
            char buf[64];
            const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            return std::string(buf, p);
        }

        // "a, b, c" or "start:step:stop" (inclusive)
        std::vector<double> to_list(const std::string &s)
        {
            std::vector<double> out;
            if (s.empty())
                return out;
            if (s.find(':') != std::string::npos)
            {
                const auto parts = split(s, ':');
                if (parts.size() != 3)
                    throw ConfigError("range must be start:step:stop, got '" + s + "'");
                const double a = to_double(parts[0]), step = to_double(parts[1]), b = to_double(parts[2]);
                if (!(step > 0) || b < a)
                    throw ConfigError("range '" + s + "' needs a positive step and stop >= start");
                const long n = std::lround(std::floor((b - a) / step + 1e-9));
                for (long i = 0; i <= n; ++i)
                    out.push_back(a + step * double(i));
                return out;
            }
            for (const auto &p : split(s, ','))
                out.push_back(to_double(p));
            return out;
        }

        std::array<double, 3> to_vec3(const std::string &s)
        {
            const auto v = to_list(s);
            if (v.size() != 3 || s.find(':') != std::string::npos)
                throw ConfigError("expected three comma-separated numbers, got '" + s + "'");
            return {v[0], v[1], v[2]};
        }

        template <typename T>
        std::string join(const std::vector<T> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                if (i)
                    out += ", ";
                if constexpr (std::is_floating_point_v<T>)
                    out += fmt(v[i]);
                else
                    out += std::to_string(v[i]);
            }
            return out;
        }

        struct Field
        {
            const char *name;
            std::function<void(ExperimentConfig &, const std::string &)> set;
            std::function<std::string(const ExperimentConfig &)> get;
        };

#define EMCAP_REAL(key)                                                                                                \
    Field{#key, [](ExperimentConfig &c, const std::string &v) { c.key = to_double(v); },                               \
          [](const ExperimentConfig &c) { return fmt(c.key); }}
#define EMCAP_INT(key)                                                                                                 \
    Field{#key, [](ExperimentConfig &c, const std::string &v) { c.key = static_cast<decltype(c.key)>(to_int(v)); },    \
          [](const ExperimentConfig &c) { return std::to_string(c.key); }}
#define EMCAP_VEC3(key)                                                                                                \
    Field{#key, [](ExperimentConfig &c, const std::string &v) { c.key = to_vec3(v); },                                 \
          [](const ExperimentConfig &c) { return join(std::vector<double>(c.key.begin(), c.key.end())); }}
#define EMCAP_LIST(key)                                                                                                \
    Field{#key, [](ExperimentConfig &c, const std::string &v) { c.key = to_list(v); },                                 \
          [](const ExperimentConfig &c) { return join(c.key); }}

        const std::vector<Field> &fields()
        {
            static const std::vector<Field> table = {
                Field{"preset", [](ExperimentConfig &c, const std::string &v) { c.preset = v; },
                      [](const ExperimentConfig &c) { return c.preset; }},
                EMCAP_REAL(lambda),
                EMCAP_REAL(tx_side_x),
                EMCAP_REAL(tx_side_y),
                EMCAP_REAL(rx_side_x),
                EMCAP_REAL(rx_side_y),
                EMCAP_VEC3(tx_center),
                EMCAP_REAL(rx_offset_x),
                EMCAP_REAL(rx_offset_y),
                EMCAP_REAL(distance),
                EMCAP_REAL(theta_e_deg),
                EMCAP_INT(L),
                Field{"windowed", [](ExperimentConfig &c, const std::string &v) { c.windowed = to_bool(v); },
                      [](const ExperimentConfig &c) { return std::string(c.windowed ? "true" : "false"); }},
                EMCAP_INT(n_theta),
                EMCAP_INT(n_phi),
                EMCAP_INT(basis_order),
                EMCAP_INT(tx_points),
                EMCAP_INT(rx_points),
                EMCAP_INT(entry_budget),
                EMCAP_INT(gram_count),
                Field{"mode_maps",
                      [](ExperimentConfig &c, const std::string &v) {
                          c.mode_maps.clear();
                          for (const double x : to_list(v))
                          {
                              if (x != std::floor(x))
                                  throw ConfigError("mode_maps entries must be integers");
                              c.mode_maps.push_back(static_cast<int>(x));
                          }
                      },
                      [](const ExperimentConfig &c) { return join(c.mode_maps); }},
                EMCAP_INT(map_resolution),
                EMCAP_REAL(power),
                EMCAP_LIST(snr_db),
                EMCAP_REAL(fit_floor),
                EMCAP_INT(fit_plateau),
                EMCAP_VEC3(fig3_source),
                EMCAP_VEC3(fig3_field),
                EMCAP_REAL(fig3_distance),
                EMCAP_REAL(fig3_span),
                EMCAP_INT(fig3_L),
                EMCAP_INT(translator_samples),
                EMCAP_LIST(sweep_theta_deg),
                Field{"output_dir", [](ExperimentConfig &c, const std::string &v) { c.output_dir = v; },
                      [](const ExperimentConfig &c) { return c.output_dir; }},
            };
            return table;
        }

#undef EMCAP_REAL
#undef EMCAP_INT
#undef EMCAP_VEC3
#undef EMCAP_LIST

        const Field *find_field(const std::string &key)
        {
            for (const auto &f : fields())
                if (key == f.name)
                    return &f;
            return nullptr;
        }

        void assign(ExperimentConfig &cfg, const std::string &key, const std::string &value, int line)
        {
            const Field *f = find_field(key);
            if (!f)
                throw ConfigError("unknown key '" + key + "'", line);
            try
            {
                f->set(cfg, value);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(key + ": " + e.what(), line);
            }
        }

        void require(bool ok, const std::string &what)
        {
            if (!ok)
                throw ConfigError(what);
        }
    }

    ExperimentConfig preset_config(const std::string &name)
    {
        ExperimentConfig c;
        c.snr_db = {};
        for (int s = 0; s <= 30; ++s)
            c.snr_db.push_back(double(s));
        for (int t = 10; t <= 180; t += 10)
            c.sweep_theta_deg.push_back(double(t));

        if (name == "paper")
        {
            c.preset = "paper";
            return c;
        }
        if (name == "ci")
        {
            c.preset = "ci";
            c.tx_side_x = c.tx_side_y = 4.0;
            c.rx_side_x = c.rx_side_y = 3.2;
            c.distance = 10.2;
            c.L = 0;
            c.basis_order = 14;
            c.tx_points = 144;
            c.rx_points = 144;
            c.map_resolution = 21;
            return c;
        }
        throw ConfigError("unknown preset '" + name + "' (expected paper or ci)");
    }

    ExperimentConfig parse_config_text(const std::string &text, ExperimentConfig base)
    {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw))
        {
            ++line;
            const auto hash = raw.find('#');
            const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'", line);
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key.empty())
                throw ConfigError("missing key", line);
            assign(base, key, value, line);
        }
        return base;
    }

    ExperimentConfig load_config_file(const std::string &path, ExperimentConfig base)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot read config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try
        {
            return parse_config_text(ss.str(), std::move(base));
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(path + ": " + e.what());
        }
    }

    void apply_override(ExperimentConfig &cfg, const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + assignment + "' is not key=value");
        assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
    }

    void validate(const ExperimentConfig &c)
    {
        require(c.lambda == 1.0, "lambda is fixed at 1 (all lengths are in wavelengths)");
        require(c.tx_side_x > 0 && c.tx_side_y > 0, "transmitter sides must be positive");
        require(c.rx_side_x > 0 && c.rx_side_y > 0, "receiver sides must be positive");
        require(c.distance > 0, "distance must be positive");
        require(c.theta_e_deg > 0 && c.theta_e_deg <= 180, "theta_e_deg must lie in (0, 180]");
        require(c.L >= 0, "L must be >= 0 (0 selects the truncation rule)");
        require(c.fig3_L >= -1, "fig3_L must be >= -1 (-1 selects the truncation rule)");
        require(c.n_theta >= 0 && c.n_phi >= 0, "n_theta and n_phi must be >= 0 (0 selects the default)");
        require(c.basis_order >= 0, "basis_order must be >= 0");
        require(c.tx_points >= 1 && c.rx_points >= 1, "tx_points and rx_points must be >= 1");
        require(c.entry_budget >= 1, "entry_budget must be >= 1");
        require(c.gram_count >= 1, "gram_count must be >= 1");
        require(c.map_resolution >= 2, "map_resolution must be >= 2");
        const int n_basis = (c.basis_order + 1) * (c.basis_order + 2) / 2;
        for (const int m : c.mode_maps)
            require(m >= 1 && m <= n_basis, "mode_maps entries must lie in [1, basis size]");
        require(c.power > 0, "power must be positive");
        require(c.fit_floor > 0 && c.fit_floor < 1, "fit_floor must lie in (0, 1)");
        require(c.fit_plateau >= 0, "fit_plateau must be >= 0");
        require(c.fig3_distance > 0 && c.fig3_span > 0, "fig3_distance and fig3_span must be positive");
        require(c.fig3_distance >= c.fig3_span, "fig3 groups violate the separation bound fig3_distance >= fig3_span");
        require(c.translator_samples >= 2, "translator_samples must be >= 2");
        for (const double t : c.sweep_theta_deg)
            require(t > 0 && t <= 180, "sweep_theta_deg entries must lie in (0, 180]");
        require(!c.output_dir.empty(), "output_dir must not be empty");

        const LinkGeometry g{rect_aperture<double>({c.tx_center[0], c.tx_center[1], c.tx_center[2]}, c.tx_side_x,
                                                   c.tx_side_y),
                             rect_aperture<double>({c.tx_center[0] + c.rx_offset_x, c.tx_center[1] + c.rx_offset_y,
                                                    c.tx_center[2] + c.distance},
                                                   c.rx_side_x, c.rx_side_y),
                             2.0 * std::numbers::pi};
        if (g.distance() < g.translator_span())
            throw ConfigError("apertures violate the separation bound: center distance " + fmt(g.distance()) +
                              " < sum of half-diagonals " + fmt(g.translator_span()));
    }

    std::string to_config_text(const ExperimentConfig &cfg)
    {
        std::string out;
        for (const auto &f : fields())
            out += std::string(f.name) + " = " + f.get(cfg) + "\n";
        return out;
    }

    std::vector<std::string> config_keys()
    {
        std::vector<std::string> out;
        for (const auto &f : fields())
            out.emplace_back(f.name);
        return out;
    }

    LinkGeometry link_geometry(const ExperimentConfig &c)
    {
        validate(c);
        const Vector3<double> q(c.tx_center[0], c.tx_center[1], c.tx_center[2]);
        const Vector3<double> p = q + Vector3<double>(c.rx_offset_x, c.rx_offset_y, c.distance);
        return make_link(rect_aperture(q, c.tx_side_x, c.tx_side_y), rect_aperture(p, c.rx_side_x, c.rx_side_y),
                         2.0 * std::numbers::pi / c.lambda);
    }

    SolverSettings solver_settings(const ExperimentConfig &c)
    {
        SolverSettings s;
        s.theta_e = c.theta_e_deg * std::numbers::pi / 180.0;
        s.L = c.L;
        s.windowed = c.windowed;
        s.n_theta = c.n_theta;
        s.n_phi = c.n_phi;
        s.tx_points = c.tx_points;
        s.rx_points = c.rx_points;
        s.basis_order = c.basis_order;
        s.power = c.power;
        s.entry_budget = c.entry_budget;
        return s;
    }

    LinkGeometry fig3_geometry(const ExperimentConfig &c)
    {
        // square groups with half-diagonal span/2 each
        const double side = c.fig3_span / std::numbers::sqrt2;
        return make_link(rect_aperture<double>({0, 0, 0}, side, side),
                         rect_aperture<double>({0, 0, c.fig3_distance}, side, side), 2.0 * std::numbers::pi / c.lambda);
    }

    int fig3_truncation(const ExperimentConfig &c)
    {
        return c.fig3_L >= 0 ? c.fig3_L : fig3_geometry(c).default_truncation();
    }

} // namespace emcap
