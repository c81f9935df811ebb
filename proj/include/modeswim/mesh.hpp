#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace modeswim::fem {

enum class Planform { rectangle, circle, cross };

/// Planform outline. Rectangles span [0,a]x[0,b]; circles and crosses are centered on the origin.
struct PlateGeometry {
    Planform planform = Planform::rectangle;
    double a = 0.0;  // rectangle side along x
    double b = 0.0;  // rectangle side along y
    double radius = 0.0;
    double overall_length = 0.0;  // cross extent along x
    double overall_width = 0.0;   // cross extent along y
    double arm_width = 0.0;
    double heading_deg = 0.0;     // body forward axis, measured from +x

    static PlateGeometry rectangle(double a, double b);
    static PlateGeometry circle(double radius);
    static PlateGeometry cross(double overall_length, double overall_width, double arm_width);

    void validate() const;
    bool contains(double x, double y) const;
    double area() const;
    /// Shortest span of the planform.
    double characteristic_length() const;
    double smallest_dimension() const;
    std::array<double, 2> centroid() const;
};

struct Node {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned rectangular element, nodes counterclockwise from the (min x, min y) corner.
struct Element {
    std::array<std::size_t, 4> nodes{};
    int region = 0;  // section index used by assembly
};

constexpr std::size_t kDofsPerNode = 3;

/// Per-node DOFs: transverse deflection w and the slopes dw/dx, dw/dy (the rotations
/// theta_x, theta_y of this element family).
enum Dof : std::size_t { w = 0, slope_x = 1, slope_y = 2 };

struct Mesh {
    PlateGeometry geometry;
    std::vector<Node> nodes;
    std::vector<Element> elements;

    std::size_t dof_count() const { return nodes.size() * kDofsPerNode; }
    static std::size_t dof(std::size_t node, std::size_t local) { return node * kDofsPerNode + local; }
    double element_width(std::size_t e) const;
    double element_height(std::size_t e) const;
    double element_area(std::size_t e) const { return element_width(e) * element_height(e); }
    /// Sum of element areas.
    double area() const;
    /// Nodes lying on an element edge that belongs to exactly one element.
    std::vector<std::size_t> boundary_nodes() const;
};

/// Builds a structured quad mesh. Rectangles and crosses align grid lines with every planform
/// edge; circles keep every grid cell whose center lies inside the radius (stair-stepped edge).
/// Throws ConfigError unless 0 < element size <= half the smallest planform dimension.
Mesh generate_mesh(const PlateGeometry& geometry, double target_element_size);

/// Reflection of the mesh across the body heading axis through the planform centroid.
/// Maps node i to node perm[i]; slopes transform with the reflection matrix.
struct MirrorMap {
    std::vector<std::size_t> node_perm;
    std::array<double, 4> reflection{};  // row-major 2x2 acting on (dw/dx, dw/dy)
};

/// Empty when the mesh has no exact mirror image of itself about the heading axis.
std::optional<MirrorMap> heading_mirror(const Mesh& mesh);

/// Applies the mirror to a DOF vector (any scalar type supporting scalar * value).
template <class Vec>
Vec apply_mirror(const MirrorMap& mirror, const Vec& v) {
    Vec out = v;
    const auto& r = mirror.reflection;
    for (std::size_t i = 0; i < mirror.node_perm.size(); ++i) {
        const std::size_t j = mirror.node_perm[i];
        const auto wi = v[Mesh::dof(i, 0)];
        const auto gx = v[Mesh::dof(i, 1)];
        const auto gy = v[Mesh::dof(i, 2)];
        out[Mesh::dof(j, 0)] = wi;
        out[Mesh::dof(j, 1)] = r[0] * gx + r[1] * gy;
        out[Mesh::dof(j, 2)] = r[2] * gx + r[3] * gy;
    }
    return out;
}

/// CSV tables "id,x,y" and "id,n1,n2,n3,n4".
void write_node_csv(std::ostream& os, const Mesh& mesh);
void write_element_csv(std::ostream& os, const Mesh& mesh);

}  // namespace modeswim::fem
