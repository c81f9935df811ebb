#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modeswim/fem.hpp"
#include "modeswim/mesh.hpp"

namespace modeswim::eigen {

enum class Medium { dry, wet };
std::string to_string(Medium m);

/// Truncated modal basis of K phi = omega^2 M phi.
struct ModalBasis {
    std::vector<double> frequencies_hz;      // ascending; exactly 0 for rigid modes
    std::vector<double> eigenvalues;         // omega^2 in rad^2/s^2 as solved (rigid ones near 0)
    std::vector<Eigen::VectorXd> shapes;     // full mesh DOF vectors, phi^T M_dry phi = 1
    std::size_t rigid_count = 0;             // leading modes classified as rigid-body
    Medium medium = Medium::dry;
    double mass_scale = 1.0;                 // phi^T M_medium phi; 1 + added/structural when wet

    std::size_t size() const { return frequencies_hz.size(); }
    bool is_rigid(std::size_t k) const { return k < rigid_count; }
};

struct SolveOptions {
    /// Shift in Hz. Zero selects an automatic small negative shift that keeps K - sigma M definite.
    double shift_hz = 0.0;
    double tolerance = 1e-8;  // shift-invert residual per mode
    int max_restarts = 60;
    /// When set, exactly degenerate pairs are rotated so the first shape is the most symmetric
    /// under this mirror and the second the most antisymmetric.
    std::optional<fem::MirrorMap> mirror;
};

/// Lowest `count` eigenpairs by block shift-invert Krylov iteration on (K - sigma M, M) with full
/// M-reorthogonalization and Rayleigh-Ritz extraction. Deterministic for identical inputs.
/// Throws SolverError on factorization breakdown and ConvergenceError when the restart budget runs out.
ModalBasis solve_modes(const fem::SystemMatrices& matrices, int count, const SolveOptions& options = {});

/// Dense reference solver (Cholesky reduction to a standard symmetric problem). Intended for
/// systems with at most a few thousand DOFs.
ModalBasis solve_modes_dense(const fem::SystemMatrices& matrices, int count, const SolveOptions& options = {});

/// Disjoint adjacent pairs (i, i+1) of elastic modes with f[i+1] - f[i] <= tol * f[i], scanned greedily from the low end.
std::vector<std::pair<std::size_t, std::size_t>> detect_degenerate_pairs(const ModalBasis& basis,
                                                                        double relative_tolerance);

/// Largest relative residual ||K phi - lambda M phi|| / ||K phi|| over the elastic modes.
double max_relative_residual(const fem::SystemMatrices& matrices, const ModalBasis& basis);

/// Smallest diagonal ratio K_ii / M_ii, the scale used for the automatic shift and rigid-mode threshold.
double diagonal_rayleigh_estimate(const fem::SystemMatrices& matrices);

}  // namespace modeswim::eigen
