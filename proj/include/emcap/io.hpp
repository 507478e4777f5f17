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

#ifndef EMCAP_IO_HPP
#define EMCAP_IO_HPP

#include "emcap/modes.hpp"

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace emcap
{

    /// Shortest round-trip decimal form of a double.
    std::string format_number(double v);

    /// Minimal CSV writer. Numbers are written in shortest round-trip form so
    /// identical inputs give byte-identical files.
    class CsvWriter
    {
      public:
        CsvWriter(const std::string &path, const std::vector<std::string> &header);
        void row(std::initializer_list<double> values);
        void row(const std::vector<double> &values);
        void close();

      private:
        std::ofstream out_;
        std::string path_;
        std::size_t columns_;
    };

    /// Solver parameters echoed into the mode-set document.
    struct ModeFileSolver
    {
        double theta_e_deg = 0;
        int L = 0;
        bool windowed = true;
        int n_theta = 0;
        int n_phi = 0;
        int tx_points = 0;
        int rx_points = 0;
    };

    struct ModeFile
    {
        ModeSet modes;
        LinkGeometry geometry;
        ModeFileSolver solver;
    };

    inline constexpr const char *modeset_format = "emcap.modeset";
    inline constexpr int modeset_version = 1;

    /// Serialize the mode set. `stored_modes` limits the coefficient rows (0: all).
    void write_mode_file(const std::string &path, const ModeFile &file, Eigen::Index stored_modes = 0);

    /// Parse and check a mode-set document. Throws std::runtime_error on
    /// missing fields or inconsistent sizes.
    ModeFile read_mode_file(const std::string &path);

    std::string mode_file_json(const ModeFile &file, Eigen::Index stored_modes = 0);
    ModeFile parse_mode_file_json(const std::string &text);

} // namespace emcap

#endif
