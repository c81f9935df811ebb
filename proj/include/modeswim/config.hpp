#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modeswim/fem.hpp"
#include "modeswim/fluid.hpp"
#include "modeswim/laminate.hpp"
#include "modeswim/mesh.hpp"

namespace modeswim::config {

enum class ModelKind { beam, plate };

/// Actuator as configured: the bonded layup footprint and the smaller active (loaded) area,
/// both centered on (center_x, center_y) and aligned with `axis`.
struct PatchSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double length = 0.0;
    double width = 0.0;
    double active_length = 0.0;
    double active_width = 0.0;
    char axis = 'x';
    double amplitude = 1.0;
    double phase_deg = 0.0;

    fem::Footprint layup_footprint() const;
    fem::Footprint active_footprint() const;
};

struct FluidSpec {
    double density = 0.0;
    double lambda = 1.0;
    std::optional<double> calibrate_wet_f1;  // beam: fit lambda so the first wet mode lands here
};

struct SolverSpec {
    int modes = 10;
    double shift_hz = 0.0;
    double degeneracy_tolerance = 0.02;
};

struct DriveSpec {
    std::vector<double> frequencies_hz;
    std::vector<double> phases_deg;
    double damping_ratio = 0.05;
};

/// Reference values and tolerances for beam-validate. Zero means "not given".
struct ValidationSpec {
    double air_f1 = 0.0, air_f2 = 0.0;
    double measured_air_f1 = 0.0, measured_air_f2 = 0.0;
    double wet_f1 = 0.0, wet_f2 = 0.0;
    double measured_wet_f1 = 0.0, measured_wet_f2 = 0.0;
    double tolerance_pct = 5.0;
    double measured_tolerance_pct = 7.0;
    double measured_wet_factor = 1.6;
};

struct OutputSpec {
    int grid_nx = 64;
    int grid_ny = 64;
};

struct RunConfig {
    std::string name;
    ModelKind kind = ModelKind::plate;
    fem::PlateGeometry geometry;
    double element_size = 0.0;
    std::vector<laminate::Layer> base_layers;
    std::vector<laminate::Layer> actuator_layers;
    std::vector<PatchSpec> patches;
    fem::BoundaryCondition boundary;
    FluidSpec fluid;
    SolverSpec solver;
    DriveSpec drive;
    ValidationSpec validation;
    OutputSpec output;

    fluid::FluidModel fluid_model() const { return {fluid.density, fluid.lambda}; }
};

/// Line-oriented "key = value" text with [section] headers; '#' starts a comment.
/// Sections base_layer, actuator_layer and patch may repeat. Unknown sections or keys, malformed
/// numbers and failed referential checks raise ConfigError naming the line and key.
RunConfig parse(std::string_view text);
RunConfig load_file(const std::string& path);

/// Canonical text form; parse(serialize(c)) reproduces c exactly.
std::string serialize(const RunConfig& config);

/// FNV-1a 64-bit digest of the canonical text, as 16 hex digits.
std::string digest(const RunConfig& config);
std::string digest_text(std::string_view text);

/// Checks referential validity (patches inside the planform, layer ranges, ordered targets, ...).
void validate(const RunConfig& config);

/// Bundled fixtures: paper_beam, rect_robot, circ_robot.
std::vector<std::string> fixture_names();
std::string_view fixture_text(std::string_view name);
RunConfig fixture(std::string_view name);

/// Expands "a:b:step" ranges and comma lists.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace modeswim::config
