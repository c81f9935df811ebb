#include "modeswim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <numbers>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "modeswim/analytic.hpp"
#include "modeswim/error.hpp"
#include "modeswim/fluid.hpp"

namespace modeswim::commands {

namespace {

namespace fs = std::filesystem;

constexpr double kExactDegeneracy = 1e-8;

double mirror_correlation(const fem::MirrorMap& mirror, const Eigen::VectorXd& v) {
    return v.dot(fem::apply_mirror(mirror, v)) / v.squaredNorm();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    return os;
}

Check within(std::string name, double value, double reference, double pct) {
    Check c{std::move(name), value, reference, "within " + format_number(pct) + "%", false};
    c.pass = std::abs(value - reference) <= pct / 100.0 * std::abs(reference);
    return c;
}

}  // namespace

PlateModel build_plate_model(const config::RunConfig& cfg, int modes, SolverKind solver) {
    config::validate(cfg);
    PlateModel pm;
    pm.config = cfg;
    pm.mesh = fem::generate_mesh(cfg.geometry, cfg.element_size);

    pm.sections.push_back(laminate::section_properties(cfg.base_layers));
    if (!cfg.actuator_layers.empty() && !cfg.patches.empty()) {
        std::vector<laminate::Layer> stack = cfg.base_layers;
        stack.insert(stack.end(), cfg.actuator_layers.begin(), cfg.actuator_layers.end());
        pm.sections.push_back(laminate::section_properties(stack));
        std::vector<fem::Footprint> footprints;
        for (const auto& p : cfg.patches) footprints.push_back(p.layup_footprint());
        fem::assign_regions(pm.mesh, footprints);
    }

    const fem::SystemMatrices full = fem::assemble(pm.mesh, pm.sections);
    const Eigen::VectorXd unit = fem::rigid_motion(pm.mesh, 1.0, 0.0, 0.0);
    pm.structural_mass_per_area = unit.dot(full.mass * unit) / pm.mesh.area();
    pm.matrices = fem::apply_boundary(full, pm.mesh, cfg.boundary);
    pm.mirror = fem::heading_mirror(pm.mesh);

    eigen::SolveOptions opts;
    opts.shift_hz = cfg.solver.shift_hz;
    opts.mirror = pm.mirror;
    const int count = std::min<int>(modes < 0 ? cfg.solver.modes : modes, static_cast<int>(pm.matrices.size()));
    pm.dry = solver == SolverKind::dense ? eigen::solve_modes_dense(pm.matrices, count, opts)
                                         : eigen::solve_modes(pm.matrices, count, opts);

    const bool beam = cfg.kind == config::ModelKind::beam;
    const double width = cfg.geometry.b;
    auto added_per_area = [&](double lambda) {
        const fluid::FluidModel f{cfg.fluid.density, lambda};
        return beam ? fluid::beam_added_mass_per_length(width, f) / width
                    : fluid::plate_added_mass_per_area(cfg.geometry.characteristic_length(), f);
    };
    const double structural = beam ? pm.sections.front().mass_per_area : pm.structural_mass_per_area;

    pm.lambda = cfg.fluid.lambda;
    if (cfg.fluid.calibrate_wet_f1 && cfg.fluid.density > 0.0) {
        double dry_f1 = 0.0;
        if (beam) {
            dry_f1 = analytic::cantilever_frequencies(pm.sections.front(), cfg.geometry.a, width, 1).front();
        } else {
            if (pm.dry.rigid_count >= pm.dry.size()) throw CalibrationError("no elastic mode available for calibration");
            dry_f1 = pm.dry.frequencies_hz[pm.dry.rigid_count];
        }
        pm.lambda = fluid::calibrate(dry_f1, *cfg.fluid.calibrate_wet_f1, added_per_area(1.0) / structural);
    }
    pm.added_mass_per_area = added_per_area(pm.lambda);
    pm.wet = pm.added_mass_per_area > 0.0 ? fluid::wet_frequencies(pm.dry, structural, pm.added_mass_per_area) : pm.dry;
    return pm;
}

eigen::ModalBasis trim_to_whole_eigenspaces(const eigen::ModalBasis& basis, std::size_t wanted) {
    std::size_t k = std::min(wanted, basis.size());
    while (k > basis.rigid_count && k < basis.size() &&
           basis.eigenvalues[k] - basis.eigenvalues[k - 1] <= kExactDegeneracy * basis.eigenvalues[k - 1]) {
        ++k;
    }
    eigen::ModalBasis out = basis;
    out.frequencies_hz.resize(k);
    out.eigenvalues.resize(k);
    out.shapes.resize(k);
    out.rigid_count = std::min(out.rigid_count, k);
    return out;
}

bool BeamReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

BeamReport beam_validate(const config::RunConfig& cfg, std::optional<double> tolerance_pct) {
    if (cfg.kind != config::ModelKind::beam) throw ConfigError("beam-validate needs a configuration with kind = beam");
    const auto start = std::chrono::steady_clock::now();
    const auto& v = cfg.validation;
    const double tol = tolerance_pct.value_or(v.tolerance_pct);
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");

    BeamReport r;
    const auto pm = build_plate_model(cfg);
    const auto& section = pm.sections.front();
    const auto f = analytic::cantilever_frequencies(section, cfg.geometry.a, cfg.geometry.b, 2);
    r.analytic_f1 = f[0];
    r.analytic_f2 = f[1];

    // Bending modes are the ones symmetric across the beam width.
    std::vector<double> bending;
    for (std::size_t k = pm.dry.rigid_count; k < pm.dry.size(); ++k) {
        if (!pm.mirror || mirror_correlation(*pm.mirror, pm.dry.shapes[k]) > 0.0) bending.push_back(pm.dry.frequencies_hz[k]);
    }
    if (bending.size() < 2) throw SolverError("beam model returned fewer than two bending modes; raise [solver] modes");
    r.fem_f1 = bending[0];
    r.fem_f2 = bending[1];

    r.lambda = pm.lambda;
    r.baseline_ratio = cfg.fluid.density > 0.0
                           ? fluid::beam_added_mass_per_length(cfg.geometry.b, {cfg.fluid.density, 1.0}) /
                                 (section.mass_per_area * cfg.geometry.b)
                           : 0.0;
    const double beta = r.lambda * r.baseline_ratio;
    r.wet_f1 = r.analytic_f1 / std::sqrt(1.0 + beta);
    r.wet_f2 = r.analytic_f2 / std::sqrt(1.0 + beta);

    if (v.air_f1 > 0.0) {
        r.checks.push_back(within("air f1 analytic", r.analytic_f1, v.air_f1, tol));
        r.checks.push_back(within("air f1 FEM", r.fem_f1, v.air_f1, tol));
    }
    if (v.air_f2 > 0.0) {
        r.checks.push_back(within("air f2 analytic", r.analytic_f2, v.air_f2, tol));
        r.checks.push_back(within("air f2 FEM", r.fem_f2, v.air_f2, tol));
    }
    if (v.measured_air_f1 > 0.0) {
        r.checks.push_back(within("measured air f1 vs computed", v.measured_air_f1, r.analytic_f1, v.measured_tolerance_pct));
    }
    if (v.measured_air_f2 > 0.0) {
        r.checks.push_back(within("measured air f2 vs computed", v.measured_air_f2, r.analytic_f2, v.measured_tolerance_pct));
    }
    if (cfg.fluid.density == 0.0) {
        Check c{"wet equals air", r.wet_f2, r.analytic_f2, "exact", r.wet_f1 == r.analytic_f1 && r.wet_f2 == r.analytic_f2};
        r.checks.push_back(c);
    } else {
        if (v.wet_f1 > 0.0) r.checks.push_back(within("wet f1", r.wet_f1, v.wet_f1, tol));
        if (v.wet_f2 > 0.0) r.checks.push_back(within("wet f2 predicted", r.wet_f2, v.wet_f2, tol));
        auto loose = [&](const char* name, double measured, double predicted) {
            const double ratio = std::max(measured / predicted, predicted / measured);
            r.checks.push_back({name, measured, predicted, "within a factor " + format_number(v.measured_wet_factor),
                                ratio <= v.measured_wet_factor});
        };
        if (v.measured_wet_f1 > 0.0) loose("measured wet f1 vs predicted", v.measured_wet_f1, r.wet_f1);
        if (v.measured_wet_f2 > 0.0) loose("measured wet f2 vs predicted", v.measured_wet_f2, r.wet_f2);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_report(const BeamReport& r) {
    std::ostringstream os;
    os << "air      f1 analytic " << format_number(r.analytic_f1) << " Hz, FEM " << format_number(r.fem_f1) << " Hz\n";
    os << "air      f2 analytic " << format_number(r.analytic_f2) << " Hz, FEM " << format_number(r.fem_f2) << " Hz\n";
    os << "lambda   " << format_number(r.lambda) << " (added/structural at lambda=1: " << format_number(r.baseline_ratio)
       << ")\n";
    os << "wet      f1 " << format_number(r.wet_f1) << " Hz, f2 " << format_number(r.wet_f2) << " Hz\n";
    for (const auto& c : r.checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << format_number(c.value) << " vs " << format_number(c.reference)
           << " (" << c.criterion << ")\n";
    }
    os << (r.pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

GridField sample_deflection(const fem::Mesh& mesh, const Eigen::VectorXd& dofs, std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2) throw DomainError("sampling grid needs at least 2 points per direction");
    if (dofs.size() != static_cast<Eigen::Index>(mesh.dof_count())) throw ShapeError("DOF vector does not match the mesh");
    double xmin = mesh.nodes.front().x, xmax = xmin, ymin = mesh.nodes.front().y, ymax = ymin;
    std::vector<double> xs, ys;
    for (const auto& n : mesh.nodes) {
        xmin = std::min(xmin, n.x);
        xmax = std::max(xmax, n.x);
        ymin = std::min(ymin, n.y);
        ymax = std::max(ymax, n.y);
        xs.push_back(n.x);
        ys.push_back(n.y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cell_to_element;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& p = mesh.nodes[mesh.elements[e].nodes[0]];
        const auto i = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), p.x) - xs.begin());
        const auto j = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), p.y) - ys.begin());
        cell_to_element[{i, j}] = e;
    }

    GridField g(nx, ny, (xmax - xmin) / static_cast<double>(nx - 1), (ymax - ymin) / static_cast<double>(ny - 1), xmin, ymin);
    Eigen::Matrix<double, 12, 1> local;
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = j + 1 == ny ? ymax : g.y(j);
        auto cj = static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin());
        cj = std::min(std::max<std::size_t>(cj, 1), ys.size() - 1) - 1;
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = i + 1 == nx ? xmax : g.x(i);
            auto ci = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
            ci = std::min(std::max<std::size_t>(ci, 1), xs.size() - 1) - 1;
            const auto it = cell_to_element.find({ci, cj});
            if (it == cell_to_element.end()) continue;
            const std::size_t e = it->second;
            const double w = mesh.element_width(e), h = mesh.element_height(e);
            const auto& p = mesh.nodes[mesh.elements[e].nodes[0]];
            const auto ev = fem::evaluate_shape(w, h, 2.0 * (x - p.x) / w - 1.0, 2.0 * (y - p.y) / h - 1.0);
            const auto edofs = fem::element_dofs(mesh, e);
            for (std::size_t k = 0; k < 12; ++k) local[static_cast<Eigen::Index>(k)] = dofs[static_cast<Eigen::Index>(edofs[k])];
            g.at(i, j) = ev.n * local;
        }
    }
    return g;
}

ModesResult run_modes(const config::RunConfig& cfg) {
    ModesResult r{build_plate_model(cfg), {}};
    r.pairs = eigen::detect_degenerate_pairs(r.model.wet, cfg.solver.degeneracy_tolerance);
    return r;
}

std::vector<std::string> write_modes(const ModesResult& result, const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto& basis = result.model.wet;
    std::vector<std::string> partner(basis.size());
    for (auto [a, b] : result.pairs) {
        partner[a] = std::to_string(b + 1);
        partner[b] = std::to_string(a + 1);
    }
    std::vector<std::string> outputs{"modes.csv"};
    auto csv = open_out(out_dir + "/modes.csv");
    csv << "order,frequency_hz,medium,degenerate_with\n";
    const auto& out = result.model.config.output;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        csv << k + 1 << ',' << format_number(basis.frequencies_hz[k]) << ',' << eigen::to_string(basis.medium) << ','
            << partner[k] << '\n';
        char name[32];
        std::snprintf(name, sizeof name, "mode_%02zu.grid", k + 1);
        write_grid_file(out_dir + "/" + name,
                        sample_deflection(result.model.mesh, basis.shapes[k], static_cast<std::size_t>(out.grid_nx),
                                          static_cast<std::size_t>(out.grid_ny)));
        outputs.emplace_back(name);
    }
    return outputs;
}

drive::DriveModel drive_model(const PlateModel& pm) {
    drive::DriveModel dm;
    dm.mesh = pm.mesh;
    dm.basis = trim_to_whole_eigenspaces(pm.wet, static_cast<std::size_t>(pm.config.solver.modes));
    for (const auto& p : pm.config.patches) {
        drive::ActuatorPatch patch;
        patch.footprint = p.active_footprint();
        patch.orientation = p.axis == 'x' ? std::array{1.0, 0.0} : std::array{0.0, 1.0};
        patch.amplitude = p.amplitude;
        patch.phase_rad = p.phase_deg * std::numbers::pi / 180.0;
        dm.patches.push_back(patch);
    }
    dm.fluid = {pm.config.fluid.density, pm.lambda};
    dm.damping_ratio = pm.config.drive.damping_ratio;
    return dm;
}

SweepResult run_sweep(const config::RunConfig& cfg, unsigned threads) {
    if (cfg.drive.frequencies_hz.empty() || cfg.drive.phases_deg.empty()) {
        throw ConfigError("[drive] frequencies and phases must be non-empty for a sweep");
    }
    if (cfg.patches.empty()) throw ConfigError("a sweep needs at least one [patch]");
    const auto pm = build_plate_model(cfg, cfg.solver.modes + 4);
    const auto dm = drive_model(pm);
    SweepResult r;
    r.map = drive::movement_map(dm, cfg.drive.frequencies_hz, cfg.drive.phases_deg, threads);
    r.characteristic_length = cfg.geometry.characteristic_length();
    r.lambda = pm.lambda;
    return r;
}

std::vector<std::string> write_atlas(int m, int n, double a, double b, const std::vector<double>& gammas_deg,
                                     std::size_t intervals, const std::string& out_dir) {
    const analytic::AnalyticPlate plate{a, b, 1.0, 1.0};
    const auto w_mn = analytic::ss_mode_grid({m, n}, plate, intervals, intervals);
    const auto w_nm = analytic::ss_mode_grid({n, m}, plate, intervals, intervals);
    ensure_dir(out_dir);
    std::vector<std::string> outputs;
    auto emit = [&](const std::string& name, const GridField& g) {
        write_grid_file(out_dir + "/" + name, g);
        outputs.push_back(name);
    };
    emit("mode_" + std::to_string(m) + "_" + std::to_string(n) + ".grid", w_mn);
    emit("mode_" + std::to_string(n) + "_" + std::to_string(m) + ".grid", w_nm);
    for (double g : gammas_deg) {
        const auto p = analytic::unit_phasor_deg(g);
        GridField out = w_mn;
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = w_mn.values[k] * p.c + w_nm.values[k] * p.s;
        emit("gamma_" + format_number(g) + ".grid", out);
    }
    return outputs;
}

std::optional<std::string> write_manifest(const std::string& out_dir, const std::string& command,
                                          const std::string& config_name, const std::string& config_digest,
                                          const std::vector<std::pair<std::string, double>>& values,
                                          const std::vector<std::string>& outputs) {
    ensure_dir(out_dir);
    const std::string path = out_dir + "/manifest.json";
    std::optional<std::string> previous;
    if (std::ifstream in(path); in) {
        try {
            const auto old = nlohmann::json::parse(in);
            const auto d = old.value("config_digest", std::string{});
            if (!d.empty() && d != config_digest) previous = d;
        } catch (const nlohmann::json::exception&) {
            previous = std::string("unreadable");
        }
    }
    nlohmann::ordered_json j;
    j["tool"] = "modeswim";
    j["version"] = MODESWIM_VERSION;
    j["command"] = command;
    j["config"] = config_name;
    j["config_digest"] = config_digest;
    for (const auto& [k, v] : values) j["values"][k] = format_number(v);
    j["outputs"] = outputs;
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    return previous;
}

}  // namespace modeswim::commands
