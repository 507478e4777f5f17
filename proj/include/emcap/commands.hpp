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

#ifndef EMCAP_COMMANDS_HPP
#define EMCAP_COMMANDS_HPP

#include "emcap/capacity.hpp"
#include "emcap/config.hpp"
#include "emcap/io.hpp"
#include "emcap/modes.hpp"

#include <string>
#include <vector>

namespace emcap
{

    /// Files written and one-line findings, for the caller to print.
    struct CommandReport
    {
        std::vector<std::string> files;
        std::vector<std::string> notes;
    };

    /// translator.csv: normalized |alpha| against the angle to the link axis.
    CommandReport cmd_translator(const ExperimentConfig &cfg);

    /// sgf_error.csv: plane-wave reconstruction error against the cap half-angle.
    CommandReport cmd_sgf_error(const ExperimentConfig &cfg);

    /// modes.json, eigenvalues.csv, gram_currents.csv, gram_fields.csv,
    /// mode_<n>_current.csv / mode_<n>_field.csv and modes_summary.json.
    CommandReport cmd_modes(const ExperimentConfig &cfg);

    /// capacity.csv, allocation.csv and spectrum_fit.json from a mode file.
    CommandReport cmd_capacity(const ExperimentConfig &cfg, const std::string &modes_path);

    /// Mode-run diagnostics shared by cmd_modes and the acceptance checks.
    struct ModeDiagnostics
    {
        int plateau_3db = 0;          // modes with beta_n / beta_1 >= -3 dB
        double dof_geometric = 0;
        double hermitian_residual = 0;
        double eig_residual = 0;      // max |B v - beta v| / beta_1
        int clamped = 0;
        int gram_count = 0;
        double current_leakage = 0;   // max |off-diag| / max |diag|
        double current_power_error = 0; // max |eta G_nn / P_t - 1|
        double field_leakage = 0;
        double field_beta_error = 0;  // max over plateau |eta G_nn / (P_t beta_n) - 1|
    };

    ModeDiagnostics mode_diagnostics(const ModeSolution &sol, int gram_count, const ComplexMatrixX<double> &gram_c,
                                     const ComplexMatrixX<double> &gram_f);

    /// Equal-allocation channel count: fit_plateau if set, else round(N_geo), at least 1.
    int plateau_count(const ExperimentConfig &cfg, const LinkGeometry &geometry);

} // namespace emcap

#endif
