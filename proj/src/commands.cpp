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

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace emcap
{
    namespace fs = std::filesystem;
    using nlohmann::ordered_json;

    namespace
    {
        std::string prepare_output(const ExperimentConfig &cfg, const std::string &name)
        {
            fs::create_directories(cfg.output_dir);
            return (fs::path(cfg.output_dir) / name).string();
        }

        void write_json(const std::string &path, const ordered_json &doc)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot open '" + path + "' for writing");
            out << doc.dump(2) << "\n";
            if (!out)
                throw std::runtime_error("error while writing '" + path + "'");
        }

        // Cell-centred uniform samples for plotting; weights are the cell areas.
        SurfaceGrid map_grid(const Aperture &a, int res)
        {
            SurfaceGrid g;
            g.aperture = a;
            g.per_axis = res;
            g.points.resize(3, res * res);
            g.weights = VectorX<double>::Constant(res * res, a.area() / double(res * res));
            const Vector3<double> u = a.u_axis(), v = a.v_axis();
            for (int i = 0; i < res; ++i)
                for (int j = 0; j < res; ++j)
                {
                    const double x = (-0.5 + (i + 0.5) / res) * a.side_x;
                    const double y = (-0.5 + (j + 0.5) / res) * a.side_y;
                    g.points.col(i * res + j) = a.center + u * x + v * y;
                }
            return g;
        }

        void write_map(const std::string &path, const SurfaceGrid &g, const ComplexVectorX<double> &values,
                       const std::string &abs_column)
        {
            CsvWriter csv(path, {"x_lambda", "y_lambda", abs_column, "phase_rad"});
            for (Eigen::Index p = 0; p < g.size(); ++p)
            {
                const auto uv = g.aperture.local(g.points.col(p));
                csv.row({uv(0), uv(1), std::abs(values(p)), std::arg(values(p))});
            }
            csv.close();
        }

        std::string fixed(double v, int digits)
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
            return buf;
        }
    }

    CommandReport cmd_translator(const ExperimentConfig &cfg)
    {
        validate(cfg);
        const LinkGeometry g = fig3_geometry(cfg);
        const int L = fig3_truncation(cfg);
        const double kr = g.k * g.distance();
        const ComplexVectorX<double> plain = translator_coefficients(kr, L, false);
        const ComplexVectorX<double> tapered = translator_coefficients(kr, L, true);

        const int n = cfg.translator_samples;
        std::vector<double> theta(n), a0(n), a1(n);
        double m0 = 0, m1 = 0;
        for (int i = 0; i < n; ++i)
        {
            theta[i] = 180.0 * i / (n - 1);
            const double c = std::cos(theta[i] * std::numbers::pi / 180.0);
            a0[i] = std::abs(translator_value(plain, c));
            a1[i] = std::abs(translator_value(tapered, c));
            m0 = std::max(m0, a0[i]);
            m1 = std::max(m1, a1[i]);
        }

        CommandReport rep;
        const std::string path = prepare_output(cfg, "translator.csv");
        CsvWriter csv(path, {"theta_deg", "alpha_unwindowed_norm", "alpha_windowed_norm"});
        for (int i = 0; i < n; ++i)
            csv.row({theta[i], m0 > 0 ? a0[i] / m0 : 0.0, m1 > 0 ? a1[i] / m1 : 0.0});
        csv.close();
        rep.files.push_back(path);
        rep.notes.push_back("translator: L = " + std::to_string(L) + ", k r_pq = " + fixed(kr, 4));
        return rep;
    }

    CommandReport cmd_sgf_error(const ExperimentConfig &cfg)
    {
        validate(cfg);
        if (cfg.sweep_theta_deg.empty())
            throw ConfigError("sgf-error needs at least one angle in sweep_theta_deg");
        const LinkGeometry g = fig3_geometry(cfg);
        SweepOptions opt;
        opt.L = fig3_truncation(cfg);
        const Vector3<double> s(cfg.fig3_source[0], cfg.fig3_source[1], cfg.fig3_source[2]);
        const Vector3<double> r(cfg.fig3_field[0], cfg.fig3_field[1], cfg.fig3_field[2]);
        std::vector<double> theta;
        for (const double t : cfg.sweep_theta_deg)
            theta.push_back(t * std::numbers::pi / 180.0);
        const auto plain = expansion_error_sweep(g, s, r, theta, false, opt);
        const auto tapered = expansion_error_sweep(g, s, r, theta, true, opt);

        CommandReport rep;
        const std::string path = prepare_output(cfg, "sgf_error.csv");
        CsvWriter csv(path, {"theta_e_deg", "rel_error_unwindowed", "rel_error_windowed"});
        for (std::size_t i = 0; i < theta.size(); ++i)
            csv.row({cfg.sweep_theta_deg[i], plain[i].relative_error, tapered[i].relative_error});
        csv.close();
        rep.files.push_back(path);
        rep.notes.push_back("sgf-error: L = " + std::to_string(opt.L) + ", " + std::to_string(theta.size()) +
                            " angles");
        return rep;
    }

    ModeDiagnostics mode_diagnostics(const ModeSolution &sol, int gram_count, const ComplexMatrixX<double> &gc,
                                     const ComplexMatrixX<double> &gf)
    {
        const ModeSet &m = sol.modes;
        ModeDiagnostics d;
        for (Eigen::Index i = 0; i < m.count(); ++i)
            if (m.normalized(i) >= std::pow(10.0, -0.3))
                ++d.plateau_3db;
        d.dof_geometric = dof_geometric(sol.geometry.transmitter.area(), sol.geometry.receiver.area(),
                                        sol.geometry.distance());
        d.hermitian_residual = sol.galerkin.hermitian_residual();
        d.eig_residual = sol.eig.max_residual;
        d.clamped = sol.eig.clamped;
        d.gram_count = gram_count;
        d.current_leakage = off_diagonal_leakage<double>(gc);
        d.field_leakage = off_diagonal_leakage<double>(gf);
        const double unit = m.power / m.eta;
        for (int i = 0; i < gram_count; ++i)
            d.current_power_error = std::max(d.current_power_error, std::abs(gc(i, i).real() / unit - 1.0));
        const int plateau = std::min<int>(gram_count, std::max(1, d.plateau_3db));
        for (int i = 0; i < plateau; ++i)
            d.field_beta_error =
                std::max(d.field_beta_error, std::abs(gf(i, i).real() / (unit * m.eigenvalues(i)) - 1.0));
        return d;
    }

    CommandReport cmd_modes(const ExperimentConfig &cfg)
    {
        const LinkGeometry geometry = link_geometry(cfg);
        const SolverSettings settings = solver_settings(cfg);
        const ModeSolution sol = solve_link_modes(geometry, settings);
        const ModeSet &m = sol.modes;
        CommandReport rep;

        ModeFile file;
        file.modes = m;
        file.geometry = geometry;
        file.solver = {cfg.theta_e_deg, sol.translator.L, cfg.windowed, sol.directions.n_theta,
                       sol.directions.n_phi, int(sol.src.size()), int(sol.rcv.size())};
        const std::string json_path = prepare_output(cfg, "modes.json");
        write_mode_file(json_path, file);
        rep.files.push_back(json_path);

        {
            const std::string path = prepare_output(cfg, "eigenvalues.csv");
            CsvWriter csv(path, {"mode_index", "beta_raw_ohm2", "beta_rel_db"});
            for (Eigen::Index i = 0; i < m.count(); ++i)
                csv.row({double(i + 1), m.eigenvalues(i), 10.0 * std::log10(m.normalized(i))});
            csv.close();
            rep.files.push_back(path);
        }

        const int count = int(std::min<Eigen::Index>(cfg.gram_count, m.count()));
        const ComplexMatrixX<double> gc = gram_currents(m, count);
        const ComplexMatrixX<double> gf = gram_fields(m, count, sol.kernel);
        const auto write_gram = [&](const std::string &name, const ComplexMatrixX<double> &G, const char *unit) {
            const std::string path = prepare_output(cfg, name);
            CsvWriter csv(path, {"row_mode", "col_mode", std::string("re_") + unit, std::string("im_") + unit});
            for (Eigen::Index i = 0; i < G.rows(); ++i)
                for (Eigen::Index j = 0; j < G.cols(); ++j)
                    csv.row({double(i + 1), double(j + 1), G(i, j).real(), G(i, j).imag()});
            csv.close();
            rep.files.push_back(path);
        };
        write_gram("gram_currents.csv", gc, "a2");
        write_gram("gram_fields.csv", gf, "v2");

        if (!cfg.mode_maps.empty())
        {
            const SurfaceGrid tx_map = map_grid(geometry.transmitter, cfg.map_resolution);
            const SurfaceGrid rx_map = map_grid(geometry.receiver, cfg.map_resolution);
            const KernelMatrix h_map =
                kernel_matrix(sol.src, rx_map, geometry, sol.directions, sol.translator, cfg.entry_budget);
            for (const int n1 : cfg.mode_maps)
            {
                const Eigen::Index n = n1 - 1;
                const ComplexVectorX<double> phi = mode_currents(m, n + 1, tx_map.points).col(n);
                const ComplexVectorX<double> phi_src = mode_current_field(m, n, sol.src);
                const ComplexVectorX<double> psi =
                    h_map.entries * phi_src.cwiseProduct(sol.src.weights.cast<std::complex<double>>());
                const std::string cur = prepare_output(cfg, "mode_" + std::to_string(n1) + "_current.csv");
                const std::string fld = prepare_output(cfg, "mode_" + std::to_string(n1) + "_field.csv");
                write_map(cur, tx_map, phi, "abs_a_per_lambda");
                write_map(fld, rx_map, psi, "abs_v_per_lambda");
                rep.files.push_back(cur);
                rep.files.push_back(fld);
            }
        }

        const ModeDiagnostics d = mode_diagnostics(sol, count, gc, gf);
        ordered_json summary = {{"basis_size", m.count()},
                                {"L", sol.translator.L},
                                {"n_theta", sol.directions.n_theta},
                                {"n_phi", sol.directions.n_phi},
                                {"tx_points", sol.src.size()},
                                {"rx_points", sol.rcv.size()},
                                {"modes_above_minus_3db", d.plateau_3db},
                                {"dof_geometric", d.dof_geometric},
                                {"hermitian_residual", d.hermitian_residual},
                                {"eigen_residual", d.eig_residual},
                                {"clamped_eigenvalues", d.clamped},
                                {"gram_count", d.gram_count},
                                {"current_gram_leakage", d.current_leakage},
                                {"current_power_error", d.current_power_error},
                                {"field_gram_leakage", d.field_leakage},
                                {"field_beta_error", d.field_beta_error}};
        const std::string sp = prepare_output(cfg, "modes_summary.json");
        write_json(sp, summary);
        rep.files.push_back(sp);

        rep.notes.push_back("modes: " + std::to_string(m.count()) + " basis functions, L = " +
                            std::to_string(sol.translator.L) + ", " + std::to_string(d.plateau_3db) +
                            " modes above -3 dB (geometric DoF " + fixed(d.dof_geometric, 3) + ")");
        return rep;
    }

    int plateau_count(const ExperimentConfig &cfg, const LinkGeometry &g)
    {
        if (cfg.fit_plateau > 0)
            return cfg.fit_plateau;
        const double n = dof_geometric(g.transmitter.area(), g.receiver.area(), g.distance());
        return std::max(1, int(std::lround(n)));
    }

    CommandReport cmd_capacity(const ExperimentConfig &cfg, const std::string &modes_path)
    {
        validate(cfg);
        if (cfg.snr_db.empty())
            throw ConfigError("capacity needs at least one value in snr_db");
        const ModeFile file = read_mode_file(modes_path);
        const VectorX<double> &beta = file.modes.normalized;
        const int N = plateau_count(cfg, file.geometry);
        const SpectrumFit fit = spectrum_fit<double>(beta, N, cfg.fit_floor);
        const CapacityCurve curve = capacity_vs_snr<double>(beta, file.modes.power, cfg.snr_db, N, fit.plateau_avg);

        CommandReport rep;
        {
            const std::string path = prepare_output(cfg, "capacity.csv");
            CsvWriter csv(path, {"snr_db", "sigma2_w", "c_waterfill_bits", "c_equal_bits", "active_channels"});
            for (const auto &p : curve.points)
                csv.row({p.snr_db, p.sigma2, p.c_waterfill, p.c_equal, double(p.allocation.active)});
            csv.close();
            rep.files.push_back(path);
        }
        {
            const std::string path = prepare_output(cfg, "allocation.csv");
            CsvWriter csv(path, {"snr_db", "channel_index", "power_w"});
            for (const auto &p : curve.points)
                for (Eigen::Index i = 0; i < p.allocation.active; ++i)
                    csv.row({p.snr_db, double(i + 1), p.allocation.powers(i)});
            csv.close();
            rep.files.push_back(path);
        }
        {
            const double ngeo = dof_geometric(file.geometry.transmitter.area(), file.geometry.receiver.area(),
                                              file.geometry.distance());
            ordered_json doc = {{"plateau_count", N},
                                {"dof_geometric", ngeo},
                                {"plateau_avg", fit.plateau_avg},
                                {"decay_rate_c", fit.c},
                                {"intercept_log10", fit.intercept},
                                {"r_squared", fit.r_squared},
                                {"tail_points", fit.tail_points},
                                {"fit_floor", cfg.fit_floor}};
            const std::string path = prepare_output(cfg, "spectrum_fit.json");
            write_json(path, doc);
            rep.files.push_back(path);
        }
        rep.notes.push_back("capacity: N = " + std::to_string(N) + ", plateau avg " + fixed(fit.plateau_avg, 4) +
                            ", c = " + fixed(fit.c, 4) + ", R^2 = " + fixed(fit.r_squared, 4));
        return rep;
    }

} // namespace emcap
