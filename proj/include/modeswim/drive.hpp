#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modeswim/eigensolver.hpp"
#include "modeswim/fem.hpp"
#include "modeswim/fluid.hpp"
#include "modeswim/mesh.hpp"

namespace modeswim::drive {

using ComplexVector = Eigen::VectorXcd;

/// Piezo patch modeled as a uniform transverse pressure over its active footprint.
struct ActuatorPatch {
    fem::Footprint footprint;
    std::array<double, 2> orientation{1.0, 0.0};  // unit vector along the fiber direction
    double amplitude = 1.0;                        // arbitrary load units per area
    double phase_rad = 0.0;
};

/// Harmonic drive. Positive phase_difference_deg means the second patch lags the first.
struct DriveCondition {
    double frequency_hz = 1.0;
    double phase_difference_deg = 0.0;
    double damping_ratio = 0.02;

    void validate() const;
};

/// Wraps an angle in degrees into (-180, 180].
double wrap_phase_deg(double degrees);

/// Complex steady-state deflection (full mesh DOFs) at the drive frequency.
struct OperatingShape {
    ComplexVector dofs;
    double frequency_hz = 0.0;
};

enum class MotionKind { still, forward, backward, rotate_cw, rotate_ccw, translate, turning };

struct MotionEstimate {
    std::array<double, 2> thrust{0.0, 0.0};  // body frame: x along the heading, y to its left
    double yaw_moment = 0.0;                 // about the area centroid, counterclockwise positive
    MotionKind kind = MotionKind::still;
    int bearing_deg = 0;                     // thrust bearing, set for translate
    bool turning_left = false;               // set for turning

    std::string label() const;
    double thrust_magnitude() const;
};

/// Reflection across the heading axis: lateral thrust and moment change sign.
MotionEstimate mirrored(const MotionEstimate& e);

/// Consistent nodal loads of the patch pressure, times amplitude * exp(i phase).
/// Throws ConfigError when the footprint is not fully covered by the mesh.
ComplexVector patch_load_vector(const fem::Mesh& mesh, const ActuatorPatch& patch);

/// Loads of all patches with the drive's phase difference applied to the second patch.
ComplexVector drive_loads(const fem::Mesh& mesh, std::span<const ActuatorPatch> patches, const DriveCondition& drive);

/// Modal superposition q_k = F_k / (m (w_k^2 - w^2 + 2 i zeta w w_k)), W = sum phi_k q_k, with
/// m the basis mass scale. Rigid modes use w_k = 0. Throws SingularityError for an undamped
/// drive exactly at a natural frequency.
OperatingShape harmonic_response(const eigen::ModalBasis& basis, const ComplexVector& loads, const DriveCondition& drive);

struct MixingFit {
    double gamma = 0.0;            // rad, in [0, pi/2]
    double energy_fraction = 0.0;  // share of the shape's M-norm^2 carried by the pair
};

/// Mixing angle atan2(|<W, phi_b>_M|, |<W, phi_a>_M|) of a shape within a degenerate pair.
MixingFit fit_mixing_angle(const OperatingShape& shape, const eigen::ModalBasis& basis,
                           const fem::SystemMatrices& matrices, std::pair<std::size_t, std::size_t> pair);

constexpr double kPhaseGradientFloor = 1e-6;  // rad/m
constexpr double kAxisConeDeg = 15.0;
constexpr double kMomentDominance = 2.0;
constexpr double kMotionThresholdFraction = 1e-3;

/// Assigns the movement label. The moment is compared through moment / characteristic_length.
void classify(MotionEstimate& e, double characteristic_length, double epsilon);

/// Phase-gradient thrust surrogate: t = rho (2 pi f)^2 |W|^2 (-grad psi / |grad psi|) with W = |W| e^{i psi},
/// integrated over the plate. Classified with threshold `epsilon`.
MotionEstimate estimate_motion(const OperatingShape& shape, const fem::Mesh& mesh, const fluid::FluidModel& fluid,
                               double frequency_hz, double epsilon = 0.0);

/// Everything a sweep needs, prepared once.
struct DriveModel {
    fem::Mesh mesh;
    eigen::ModalBasis basis;
    std::vector<ActuatorPatch> patches;
    fluid::FluidModel fluid;
    double damping_ratio = 0.02;
};

struct MovementMap {
    std::vector<double> frequencies_hz;
    std::vector<double> phases_deg;
    std::vector<MotionEstimate> estimates;  // frequency-major
    double epsilon = 0.0;

    const MotionEstimate& at(std::size_t fi, std::size_t pi) const { return estimates[fi * phases_deg.size() + pi]; }
    double max_thrust() const;
};

/// One estimate per (frequency, phase) cell. Cells are computed on `threads` workers and
/// merged in grid order, so the result does not depend on the thread count.
MovementMap movement_map(const DriveModel& model, std::span<const double> frequencies_hz,
                         std::span<const double> phases_deg, unsigned threads = 1);

/// CSV "frequency_hz,phase_deg,thrust_x,thrust_y,moment,label".
void write_movement_csv(std::ostream& os, const MovementMap& map);

struct ReversalReport {
    bool pass = true;
    double worst_relative = 0.0;
    std::size_t pairs_checked = 0;
    std::vector<std::string> failures;
};

/// Checks estimate(-dphi) == mirror(estimate(+dphi)) for every phase whose negation is on the grid,
/// plus vanishing lateral thrust and moment at dphi = 0.
ReversalReport verify_reversal(const MovementMap& map, double characteristic_length, double relative_tolerance = 1e-6);

}  // namespace modeswim::drive
