#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "modeswim/laminate.hpp"
#include "modeswim/mesh.hpp"

namespace modeswim::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ElementMatrix = Eigen::Matrix<double, 12, 12>;
using ShapeRow = Eigen::Matrix<double, 1, 12>;

/// Axis-aligned rectangle in plate coordinates.
struct Footprint {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// Sets region 1 on every element whose center lies in one of the footprints, region 0 elsewhere.
void assign_regions(Mesh& mesh, std::span<const Footprint> footprints);

/// Cubic (non-conforming, 12-DOF) rectangular Kirchhoff element evaluated at normalized
/// coordinates s, t in [-1, 1]. Rows act on the element DOF vector ordered node-major
/// (w, dw/dx, dw/dy) for the four corners.
struct ShapeEval {
    ShapeRow n, dx, dy, dxx, dyy, dxy;
};
ShapeEval evaluate_shape(double width, double height, double s, double t);

ElementMatrix element_stiffness(double width, double height, const laminate::PlateBendingStiffness& d);
ElementMatrix element_mass(double width, double height, double mass_per_area);

std::array<std::size_t, 12> element_dofs(const Mesh& mesh, std::size_t e);

/// Gauss-Legendre points and weights on [-1, 1].
std::span<const double> gauss_points(int order);
std::span<const double> gauss_weights(int order);

enum class Edge { left, right, bottom, top };

struct BoundaryCondition {
    enum class Kind { free, simply_supported, clamped } kind = Kind::free;
    std::vector<Edge> edges;  // clamped only

    static BoundaryCondition free() { return {}; }
    static BoundaryCondition simply_supported() { return {Kind::simply_supported, {}}; }
    static BoundaryCondition clamped(std::vector<Edge> e) { return {Kind::clamped, std::move(e)}; }
};

/// Global stiffness and mass over the retained DOFs. `dofs[k]` is the full mesh DOF of row k.
struct SystemMatrices {
    SparseMatrix stiffness;
    SparseMatrix mass;
    std::vector<std::size_t> dofs;
    std::size_t full_dof_count = 0;
    BoundaryCondition bc;

    std::size_t size() const { return dofs.size(); }
    /// Scatters a reduced vector into the full DOF space, zero on constrained DOFs.
    Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
};

/// Assembles element matrices in ascending element order. `sections[region]` supplies each
/// element's layup. Throws AssemblyError naming any element with a degenerate Jacobian.
SystemMatrices assemble(const Mesh& mesh, std::span<const laminate::LaminateSection> sections);
SystemMatrices assemble(const Mesh& mesh, const laminate::LaminateSection& section);

/// Removes constrained rows and columns. Edge specs are accepted for rectangles only.
SystemMatrices apply_boundary(const SystemMatrices& matrices, const Mesh& mesh, const BoundaryCondition& bc);

/// Rigid motion w = c0 + c1 x + c2 y as a full DOF vector.
Eigen::VectorXd rigid_motion(const Mesh& mesh, double c0, double c1, double c2);

}  // namespace modeswim::fem
