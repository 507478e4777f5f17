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

#include "emcap/io.hpp"

#include "json.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace emcap
{
    using nlohmann::json;

    std::string format_number(double v)
    {
        if (v == 0.0)
            return "0"; // folds -0
        char buf[64];
        const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, p);
    }

    CsvWriter::CsvWriter(const std::string &path, const std::vector<std::string> &header)
        : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(header.size())
    {
        if (!out_)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

    void CsvWriter::row(const std::vector<double> &values)
    {
        if (values.size() != columns_)
            throw std::logic_error("CsvWriter: row width does not match the header of " + path_);
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_number(values[i]);
        out_ << '\n';
    }

    void CsvWriter::close()
    {
        out_.close();
        if (!out_)
            throw std::runtime_error("error while writing '" + path_ + "'");
    }

    namespace
    {
        json aperture_json(const Aperture &a)
        {
            return {{"center", {a.center.x(), a.center.y(), a.center.z()}},
                    {"side_x", a.side_x},
                    {"side_y", a.side_y},
                    {"normal", {a.normal.x(), a.normal.y(), a.normal.z()}}};
        }

        Aperture aperture_from(const json &j)
        {
            const auto c = j.at("center").get<std::vector<double>>();
            if (c.size() != 3)
                throw std::runtime_error("aperture center must have three components");
            Aperture a = rect_aperture<double>({c[0], c[1], c[2]}, j.at("side_x").get<double>(),
                                               j.at("side_y").get<double>());
            if (j.contains("normal"))
            {
                const auto n = j.at("normal").get<std::vector<double>>();
                if (n.size() != 3)
                    throw std::runtime_error("aperture normal must have three components");
                a.normal = Vector3<double>(n[0], n[1], n[2]).normalized();
            }
            return a;
        }
    }

    std::string mode_file_json(const ModeFile &f, Eigen::Index stored_modes)
    {
        const ModeSet &m = f.modes;
        const Eigen::Index rows = (stored_modes > 0) ? std::min(stored_modes, m.coefficients.rows())
                                                     : m.coefficients.rows();
        json doc;
        doc["format"] = modeset_format;
        doc["version"] = modeset_version;
        doc["geometry"] = {{"lambda", 1.0},
                           {"wavenumber", f.geometry.k},
                           {"distance", f.geometry.distance()},
                           {"transmitter", aperture_json(f.geometry.transmitter)},
                           {"receiver", aperture_json(f.geometry.receiver)}};
        doc["solver"] = {{"theta_e_deg", f.solver.theta_e_deg}, {"L", f.solver.L},
                         {"windowed", f.solver.windowed},       {"n_theta", f.solver.n_theta},
                         {"n_phi", f.solver.n_phi},             {"tx_points", f.solver.tx_points},
                         {"rx_points", f.solver.rx_points}};
        json orders = json::array();
        for (const auto &[a, b] : m.basis.orders)
            orders.push_back({a, b});
        doc["basis"] = {{"max_total_order", m.basis.max_total_order}, {"orders", orders}};
        doc["power_w"] = m.power;
        doc["eta_ohm"] = m.eta;
        doc["scale"] = m.scale;
        doc["clamped_eigenvalues"] = m.clamped;
        doc["eigenvalues"] = std::vector<double>(m.eigenvalues.data(), m.eigenvalues.data() + m.eigenvalues.size());

        json data = json::array();
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < m.coefficients.cols(); ++c)
                data.push_back({m.coefficients(r, c).real(), m.coefficients(r, c).imag()});
        doc["coefficients"] = {{"rows", rows}, {"cols", m.coefficients.cols()}, {"layout", "row-major"}, {"data", data}};
        return doc.dump() + "\n";
    }

    void write_mode_file(const std::string &path, const ModeFile &file, Eigen::Index stored_modes)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        out << mode_file_json(file, stored_modes);
        if (!out)
            throw std::runtime_error("error while writing '" + path + "'");
    }

    ModeFile parse_mode_file_json(const std::string &text)
    {
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw std::runtime_error(std::string("mode file is not valid JSON: ") + e.what());
        }
        try
        {
            if (doc.at("format").get<std::string>() != modeset_format)
                throw std::runtime_error("mode file has an unexpected format tag");
            if (doc.at("version").get<int>() != modeset_version)
                throw std::runtime_error("unsupported mode file version");

            ModeFile f;
            const json &g = doc.at("geometry");
            f.geometry.transmitter = aperture_from(g.at("transmitter"));
            f.geometry.receiver = aperture_from(g.at("receiver"));
            f.geometry.k = g.at("wavenumber").get<double>();

            const json &s = doc.at("solver");
            f.solver.theta_e_deg = s.at("theta_e_deg").get<double>();
            f.solver.L = s.at("L").get<int>();
            f.solver.windowed = s.at("windowed").get<bool>();
            f.solver.n_theta = s.at("n_theta").get<int>();
            f.solver.n_phi = s.at("n_phi").get<int>();
            f.solver.tx_points = s.at("tx_points").get<int>();
            f.solver.rx_points = s.at("rx_points").get<int>();

            ModeSet &m = f.modes;
            m.basis.max_total_order = doc.at("basis").at("max_total_order").get<int>();
            for (const auto &o : doc.at("basis").at("orders"))
                m.basis.orders.emplace_back(o.at(0).get<int>(), o.at(1).get<int>());
            if (m.basis.orders != basis_order_table(m.basis.max_total_order).orders)
                throw std::runtime_error("mode file basis table does not follow the order rule");

            m.power = doc.at("power_w").get<double>();
            m.eta = doc.at("eta_ohm").get<double>();
            m.scale = doc.at("scale").get<double>();
            m.clamped = doc.at("clamped_eigenvalues").get<int>();
            m.transmitter = f.geometry.transmitter;

            const auto beta = doc.at("eigenvalues").get<std::vector<double>>();
            if (beta.size() != m.basis.size())
                throw std::runtime_error("mode file eigenvalue count does not match the basis size");
            m.eigenvalues = Eigen::Map<const VectorX<double>>(beta.data(), Eigen::Index(beta.size()));
            for (Eigen::Index i = 1; i < m.eigenvalues.size(); ++i)
                if (m.eigenvalues(i) > m.eigenvalues(i - 1) || m.eigenvalues(i) < 0)
                    throw std::runtime_error("mode file eigenvalues must be nonnegative and descending");
            m.normalized = m.eigenvalues;
            if (m.eigenvalues.size() > 0 && m.eigenvalues(0) > 0)
                m.normalized /= m.eigenvalues(0);

            const json &c = doc.at("coefficients");
            const Eigen::Index rows = c.at("rows").get<Eigen::Index>(), cols = c.at("cols").get<Eigen::Index>();
            const json &data = c.at("data");
            if (cols != Eigen::Index(m.basis.size()) || rows > cols || Eigen::Index(data.size()) != rows * cols)
                throw std::runtime_error("mode file coefficient matrix has inconsistent dimensions");
            m.coefficients.resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index k = 0; k < cols; ++k)
                {
                    const json &z = data[std::size_t(r * cols + k)];
                    m.coefficients(r, k) = {z.at(0).get<double>(), z.at(1).get<double>()};
                }
            return f;
        }
        catch (const json::exception &e)
        {
            throw std::runtime_error(std::string("mode file is missing or mistypes a field: ") + e.what());
        }
    }

    ModeFile read_mode_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read mode file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_mode_file_json(ss.str());
    }

} // namespace emcap
