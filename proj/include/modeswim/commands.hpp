#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modeswim/config.hpp"
#include "modeswim/drive.hpp"
#include "modeswim/eigensolver.hpp"
#include "modeswim/fem.hpp"
#include "modeswim/grid.hpp"
#include "modeswim/laminate.hpp"
#include "modeswim/mesh.hpp"

namespace modeswim::commands {

enum class SolverKind { shift_invert, dense };

/// Mesh, matrices and dry/wet modal bases of a configured plate.
struct PlateModel {
    config::RunConfig config;
    fem::Mesh mesh;
    std::vector<laminate::LaminateSection> sections;  // [0] base, [1] base + actuator
    fem::SystemMatrices matrices;
    std::optional<fem::MirrorMap> mirror;
    eigen::ModalBasis dry;
    eigen::ModalBasis wet;  // equals dry (tagged dry) when the fluid density is zero
    double structural_mass_per_area = 0.0;
    double added_mass_per_area = 0.0;
    double lambda = 0.0;  // calibration factor actually used

    const eigen::ModalBasis& in_medium() const { return wet; }
};

/// Builds and solves a plate model with `modes` modes (config value when negative).
PlateModel build_plate_model(const config::RunConfig& config, int modes = -1,
                             SolverKind solver = SolverKind::shift_invert);

/// Keeps the first `wanted` modes, extended so an exactly degenerate cluster is never split.
eigen::ModalBasis trim_to_whole_eigenspaces(const eigen::ModalBasis& basis, std::size_t wanted);

struct Check {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    std::string criterion;
    bool pass = true;
};

struct BeamReport {
    double analytic_f1 = 0.0, analytic_f2 = 0.0;
    double fem_f1 = 0.0, fem_f2 = 0.0;
    double baseline_ratio = 0.0;  // added / structural mass at lambda = 1
    double lambda = 0.0;
    double wet_f1 = 0.0, wet_f2 = 0.0;
    double seconds = 0.0;
    std::vector<Check> checks;

    bool pass() const;
};

BeamReport beam_validate(const config::RunConfig& config, std::optional<double> tolerance_pct = std::nullopt);
std::string format_report(const BeamReport& report);

/// Samples the deflection DOFs of a mesh on a regular grid over its bounding box (zero outside).
GridField sample_deflection(const fem::Mesh& mesh, const Eigen::VectorXd& dofs, std::size_t nx, std::size_t ny);

struct ModesResult {
    PlateModel model;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

ModesResult run_modes(const config::RunConfig& config);
/// Writes modes.csv ("order,frequency_hz,medium,degenerate_with") and one mode_NN.grid per mode.
std::vector<std::string> write_modes(const ModesResult& result, const std::string& out_dir);

struct SweepResult {
    drive::MovementMap map;
    double characteristic_length = 0.0;
    double lambda = 0.0;
};

SweepResult run_sweep(const config::RunConfig& config, unsigned threads);
drive::DriveModel drive_model(const PlateModel& model);

/// Writes mode_M_N.grid, mode_N_M.grid and one gamma_<deg>.grid per mixing angle (degrees).
std::vector<std::string> write_atlas(int m, int n, double a, double b, const std::vector<double>& gammas_deg,
                                     std::size_t intervals, const std::string& out_dir);

/// Writes manifest.json. Returns the digest of a previous manifest in `out_dir` when it differs.
std::optional<std::string> write_manifest(const std::string& out_dir, const std::string& command,
                                          const std::string& config_name, const std::string& config_digest,
                                          const std::vector<std::pair<std::string, double>>& values,
                                          const std::vector<std::string>& outputs);

}  // namespace modeswim::commands
