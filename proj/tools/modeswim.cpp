// Batch front-end: beam validation, modal tables, drive sweeps and degenerate-mode atlases.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "modeswim/commands.hpp"
#include "modeswim/config.hpp"
#include "modeswim/error.hpp"
#include "modeswim/grid.hpp"

namespace {

using namespace modeswim;

enum Exit { kPass = 0, kValidationFail = 1, kConfigError = 2, kSolverError = 3 };

struct Source {
    std::string config_path;
    std::string fixture_name;

    std::pair<config::RunConfig, std::string> load() const {
        if (!fixture_name.empty()) return {config::fixture(fixture_name), "fixture:" + fixture_name};
        if (config_path.empty()) throw ConfigError("one of --config or --fixture is required");
        if (!std::filesystem::exists(config_path)) {
            // A bare bundled name is accepted in place of a path.
            for (const auto& name : config::fixture_names()) {
                if (name == config_path) return {config::fixture(name), "fixture:" + name};
            }
        }
        return {config::load_file(config_path), config_path};
    }
};

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("--config", src.config_path, "Configuration file (or the name of a bundled fixture)");
    cmd->add_option("--fixture", src.fixture_name, "Bundled fixture: paper_beam, rect_robot or circ_robot");
}

void manifest(const std::string& out, const std::string& command, const std::string& name, const config::RunConfig& cfg,
              const std::vector<std::pair<std::string, double>>& values, std::vector<std::string> outputs) {
    if (auto prev = commands::write_manifest(out, command, name, config::digest(cfg), values, std::move(outputs))) {
        std::cerr << "note: configuration digest differs from the previous run in " << out << " (was " << *prev
                  << ", now " << config::digest(cfg) << ")\n";
    }
}

int run_beam(const Source& src, const std::string& out, std::optional<double> tolerance) {
    const auto [cfg, name] = src.load();
    const auto report = commands::beam_validate(cfg, tolerance);
    std::cout << commands::format_report(report);
    if (!out.empty()) {
        {
            std::filesystem::create_directories(out);
            std::ofstream os(out + "/beam_report.txt", std::ios::binary);
            os << commands::format_report(report);
        }
        manifest(out, "beam-validate", name, cfg,
                 {{"air_f1_analytic", report.analytic_f1},
                  {"air_f2_analytic", report.analytic_f2},
                  {"air_f1_fem", report.fem_f1},
                  {"air_f2_fem", report.fem_f2},
                  {"lambda", report.lambda},
                  {"wet_f1", report.wet_f1},
                  {"wet_f2", report.wet_f2}},
                 {"beam_report.txt"});
    }
    return report.pass() ? kPass : kValidationFail;
}

int run_modes(const Source& src, const std::string& out) {
    const auto [cfg, name] = src.load();
    const auto result = commands::run_modes(cfg);
    const auto outputs = commands::write_modes(result, out);
    const auto& basis = result.model.wet;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        std::cout << k + 1 << ' ' << format_number(basis.frequencies_hz[k]) << " Hz\n";
    }
    std::cout << result.pairs.size() << " degenerate pair(s) within "
              << format_number(100.0 * cfg.solver.degeneracy_tolerance) << "%\n";
    manifest(out, "modes", name, cfg, {{"lambda", result.model.lambda}}, outputs);
    return kPass;
}

int run_sweep(const Source& src, const std::string& out, bool verify, unsigned threads) {
    const auto [cfg, name] = src.load();
    const auto result = commands::run_sweep(cfg, threads);
    std::filesystem::create_directories(out);
    {
        std::ofstream os(out + "/movement_map.csv", std::ios::binary);
        if (!os) throw ConfigError("cannot write " + out + "/movement_map.csv");
        drive::write_movement_csv(os, result.map);
    }
    std::cout << result.map.estimates.size() << " cells, max thrust " << format_number(result.map.max_thrust())
              << ", epsilon " << format_number(result.map.epsilon) << '\n';
    manifest(out, "sweep", name, cfg, {{"lambda", result.lambda}, {"epsilon", result.map.epsilon}},
             {"movement_map.csv"});
    if (!verify) return kPass;
    const auto rev = drive::verify_reversal(result.map, result.characteristic_length);
    for (const auto& f : rev.failures) std::cout << "  " << f << '\n';
    std::cout << "reversal " << (rev.pass ? "PASS" : "FAIL") << " (" << rev.pairs_checked << " pairs, worst relative "
              << format_number(rev.worst_relative) << ")\n";
    return rev.pass ? kPass : kValidationFail;
}

int run_mesh(const Source& src, const std::string& out) {
    const auto [cfg, name] = src.load();
    const auto mesh = fem::generate_mesh(cfg.geometry, cfg.element_size);
    std::filesystem::create_directories(out);
    {
        std::ofstream nodes(out + "/nodes.csv", std::ios::binary);
        fem::write_node_csv(nodes, mesh);
        std::ofstream elements(out + "/elements.csv", std::ios::binary);
        fem::write_element_csv(elements, mesh);
    }
    std::cout << mesh.nodes.size() << " nodes, " << mesh.elements.size() << " elements\n";
    manifest(out, "mesh", name, cfg, {}, {"nodes.csv", "elements.csv"});
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plate vibration modes and drive sweeps for vibrating-plate swimmers"};
    app.set_version_flag("--version", std::string(MODESWIM_VERSION));
    app.require_subcommand(1);

    Source src;
    std::string out;
    std::optional<double> tolerance;
    bool verify = false;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    auto* beam = app.add_subcommand("beam-validate", "Cantilever beam frequencies in air and fluid against references");
    add_source(beam, src);
    beam->add_option("--out", out, "Output directory for the report and manifest");
    beam->add_option("--tolerance", tolerance, "Relative tolerance in percent (overrides the configuration)")
        ->check(CLI::PositiveNumber);

    auto* modes = app.add_subcommand("modes", "Mode table and resampled mode shapes");
    add_source(modes, src);
    modes->add_option("--out", out, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "Movement map over the configured frequencies and phase differences");
    add_source(sweep, src);
    sweep->add_option("--out", out, "Output directory")->required();
    sweep->add_flag("--verify-reversal", verify, "Check mirror antisymmetry of the map");
    sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    int m = 1, n = 2, grid = 64;
    double a = 1.0, b = 1.0;
    std::string gammas = "0,30,45,60,90";
    auto* atlas = app.add_subcommand("atlas", "Superpositions of a degenerate simply supported mode pair");
    atlas->add_option("--m", m, "First mode index")->check(CLI::PositiveNumber);
    atlas->add_option("--n", n, "Second mode index")->check(CLI::PositiveNumber);
    atlas->add_option("--a", a, "Plate length [m]")->check(CLI::PositiveNumber);
    atlas->add_option("--b", b, "Plate width [m]")->check(CLI::PositiveNumber);
    atlas->add_option("--gamma", gammas, "Mixing angles in degrees (list or start:stop:step)");
    atlas->add_option("--grid", grid, "Intervals per side")->check(CLI::PositiveNumber);
    atlas->add_option("--out", out, "Output directory")->required();

    auto* mesh = app.add_subcommand("mesh", "Export the generated mesh as node and element CSV");
    add_source(mesh, src);
    mesh->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfigError;
    }

    try {
        if (*beam) return run_beam(src, out, tolerance);
        if (*modes) return run_modes(src, out);
        if (*sweep) return run_sweep(src, out, verify, threads);
        if (*mesh) return run_mesh(src, out);
        if (*atlas) {
            const auto list = config::parse_number_list(gammas);
            const auto outputs = commands::write_atlas(m, n, a, b, list, static_cast<std::size_t>(grid), out);
            std::cout << outputs.size() << " grid files written to " << out << '\n';
            const std::string canonical = "atlas m=" + std::to_string(m) + " n=" + std::to_string(n) +
                                          " a=" + format_number(a) + " b=" + format_number(b) + " gamma=" + gammas +
                                          " grid=" + std::to_string(grid);
            if (auto prev = commands::write_manifest(out, "atlas", canonical, config::digest_text(canonical), {}, outputs)) {
                std::cerr << "note: parameters differ from the previous run in " << out << '\n';
            }
            return kPass;
        }
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const SingularityError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const AssemblyError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}
