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

#ifndef EMCAP_CONFIG_HPP
#define EMCAP_CONFIG_HPP

#include "emcap/geometry.hpp"
#include "emcap/modes.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace emcap
{

    /// Bad input: malformed config text, unknown keys or violated constraints.
    class ConfigError : public std::runtime_error
    {
      public:
        explicit ConfigError(const std::string &msg, int line = 0)
            : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line)
        {
        }
        int line() const { return line_; }

      private:
        int line_;
    };

    /// Every setting an experiment run needs. Lengths in wavelengths.
    struct ExperimentConfig
    {
        std::string preset = "paper";
        double lambda = 1.0;

        // link
        double tx_side_x = 10.0, tx_side_y = 10.0;
        double rx_side_x = 8.0, rx_side_y = 8.0;
        std::array<double, 3> tx_center{0.0, 0.0, 0.0};
        double rx_offset_x = 0.0, rx_offset_y = 0.0; // lateral receiver shift
        double distance = 25.5;

        // expansion and discretization
        double theta_e_deg = 60.0;
        int L = 93; // 0: truncation rule
        bool windowed = true;
        int n_theta = 0; // 0: default density
        int n_phi = 0;
        int basis_order = 36;
        int tx_points = 512;
        int rx_points = 512;
        std::int64_t entry_budget = default_entry_budget;

        // outputs of `modes`
        int gram_count = 40;
        std::vector<int> mode_maps{1, 3, 5}; // 1-based
        int map_resolution = 41;

        // capacity
        double power = 1.0;
        std::vector<double> snr_db;
        double fit_floor = 1e-7;
        int fit_plateau = 0; // 0: rounded geometric DoF

        // translator / sgf-error study
        std::array<double, 3> fig3_source{-5.0, 1.0, 1.0};
        std::array<double, 3> fig3_field{-3.5, 5.0, 20.0};
        double fig3_distance = 20.0;
        double fig3_span = 10.0;
        int fig3_L = -1; // negative: truncation rule on fig3_span
        int translator_samples = 361;
        std::vector<double> sweep_theta_deg;

        std::string output_dir = "out";
    };

    ExperimentConfig preset_config(const std::string &name);

    /// Apply `key = value` text (one pair per line, `#` comments) on top of `base`.
    ExperimentConfig parse_config_text(const std::string &text, ExperimentConfig base);

    ExperimentConfig load_config_file(const std::string &path, ExperimentConfig base);

    /// Single `key=value` override, as given on the command line.
    void apply_override(ExperimentConfig &cfg, const std::string &assignment);

    /// Throws ConfigError naming the first violated constraint.
    void validate(const ExperimentConfig &cfg);

    /// Canonical `key = value` dump; parses back to the same config.
    std::string to_config_text(const ExperimentConfig &cfg);

    std::vector<std::string> config_keys();

    LinkGeometry link_geometry(const ExperimentConfig &cfg);
    SolverSettings solver_settings(const ExperimentConfig &cfg);

    /// Geometry of the translator study: point-like groups at the origin and
    /// fig3_distance along z whose half-diagonals add up to fig3_span.
    LinkGeometry fig3_geometry(const ExperimentConfig &cfg);
    int fig3_truncation(const ExperimentConfig &cfg);

} // namespace emcap

#endif
