#include "modeswim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include "modeswim/error.hpp"
#include "modeswim/grid.hpp"

namespace modeswim::fem {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Splits [lo, hi] into equal steps no longer than h (within round-off) and appends the interior and end points.
void subdivide(std::vector<double>& lines, double lo, double hi, double h) {
    const auto n = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / h - 1e-9)));
    for (long k = 1; k <= n; ++k) {
        lines.push_back(k == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
    }
}

std::vector<double> grid_lines(const std::vector<double>& breaks, double h) {
    std::vector<double> lines{breaks.front()};
    for (std::size_t i = 1; i < breaks.size(); ++i) subdivide(lines, breaks[i - 1], breaks[i], h);
    return lines;
}

}  // namespace

PlateGeometry PlateGeometry::rectangle(double a, double b) {
    PlateGeometry g;
    g.planform = Planform::rectangle;
    g.a = a;
    g.b = b;
    return g;
}

PlateGeometry PlateGeometry::circle(double radius) {
    PlateGeometry g;
    g.planform = Planform::circle;
    g.radius = radius;
    return g;
}

PlateGeometry PlateGeometry::cross(double overall_length, double overall_width, double arm_width) {
    PlateGeometry g;
    g.planform = Planform::cross;
    g.overall_length = overall_length;
    g.overall_width = overall_width;
    g.arm_width = arm_width;
    return g;
}

void PlateGeometry::validate() const {
    switch (planform) {
        case Planform::rectangle:
            if (!positive(a) || !positive(b)) throw ConfigError("rectangle sides must be positive");
            break;
        case Planform::circle:
            if (!positive(radius)) throw ConfigError("circle radius must be positive");
            break;
        case Planform::cross:
            if (!positive(overall_length) || !positive(overall_width) || !positive(arm_width)) {
                throw ConfigError("cross dimensions must be positive");
            }
            if (arm_width > std::min(overall_length, overall_width)) {
                throw ConfigError("cross arm width exceeds the overall dimensions");
            }
            break;
    }
    if (!std::isfinite(heading_deg)) throw ConfigError("heading must be finite");
}

bool PlateGeometry::contains(double x, double y) const {
    switch (planform) {
        case Planform::rectangle:
            return x >= 0.0 && x <= a && y >= 0.0 && y <= b;
        case Planform::circle:
            return x * x + y * y <= radius * radius;
        case Planform::cross: {
            const double hw = 0.5 * arm_width;
            const bool horizontal = std::abs(x) <= 0.5 * overall_length && std::abs(y) <= hw;
            const bool vertical = std::abs(x) <= hw && std::abs(y) <= 0.5 * overall_width;
            return horizontal || vertical;
        }
    }
    return false;
}

double PlateGeometry::area() const {
    switch (planform) {
        case Planform::rectangle:
            return a * b;
        case Planform::circle:
            return std::numbers::pi * radius * radius;
        case Planform::cross:
            return arm_width * (overall_length + overall_width - arm_width);
    }
    return 0.0;
}

double PlateGeometry::characteristic_length() const {
    switch (planform) {
        case Planform::rectangle:
            return std::min(a, b);
        case Planform::circle:
            return 2.0 * radius;
        case Planform::cross:
            return std::min(overall_length, overall_width);
    }
    return 0.0;
}

double PlateGeometry::smallest_dimension() const {
    if (planform == Planform::cross) return arm_width;
    return characteristic_length();
}

std::array<double, 2> PlateGeometry::centroid() const {
    if (planform == Planform::rectangle) return {0.5 * a, 0.5 * b};
    return {0.0, 0.0};
}

double Mesh::element_width(std::size_t e) const {
    const auto& n = elements[e].nodes;
    return nodes[n[1]].x - nodes[n[0]].x;
}

double Mesh::element_height(std::size_t e) const {
    const auto& n = elements[e].nodes;
    return nodes[n[3]].y - nodes[n[0]].y;
}

double Mesh::area() const {
    double s = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) s += element_area(e);
    return s;
}

std::vector<std::size_t> Mesh::boundary_nodes() const {
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (const auto& el : elements) {
        for (std::size_t k = 0; k < 4; ++k) {
            auto a = el.nodes[k], b = el.nodes[(k + 1) % 4];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    std::vector<char> on(nodes.size(), 0);
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) on[edge.first] = on[edge.second] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < on.size(); ++i) {
        if (on[i]) out.push_back(i);
    }
    return out;
}

Mesh generate_mesh(const PlateGeometry& geometry, double target_element_size) {
    geometry.validate();
    const double smallest = geometry.smallest_dimension();
    if (!positive(target_element_size) || target_element_size > 0.5 * smallest) {
        throw ConfigError("element size " + format_number(target_element_size) +
                          " m is infeasible: it must be positive and at most half of the smallest planform dimension (" +
                          format_number(smallest) + " m)");
    }

    std::vector<double> xs, ys;
    switch (geometry.planform) {
        case Planform::rectangle:
            xs = grid_lines({0.0, geometry.a}, target_element_size);
            ys = grid_lines({0.0, geometry.b}, target_element_size);
            break;
        case Planform::cross: {
            const double hl = 0.5 * geometry.overall_length, hw = 0.5 * geometry.overall_width,
                         ha = 0.5 * geometry.arm_width;
            xs = grid_lines({-hl, -ha, ha, hl}, target_element_size);
            ys = grid_lines({-hw, -ha, ha, hw}, target_element_size);
            break;
        }
        case Planform::circle: {
            const double r = geometry.radius;
            auto n = static_cast<long>(std::ceil(2.0 * r / target_element_size - 1e-9));
            if (n % 2) ++n;
            for (long k = 0; k <= n; ++k) {
                const double v = k == n ? r : -r + 2.0 * r * static_cast<double>(k) / static_cast<double>(n);
                xs.push_back(v);
            }
            ys = xs;
            break;
        }
    }
    if (xs.size() * ys.size() > 4'000'000) throw ConfigError("element size too small: mesh would be excessive");

    const std::size_t nx = xs.size(), ny = ys.size();
    std::vector<char> cell_on((nx - 1) * (ny - 1), 0);
    std::vector<char> node_used(nx * ny, 0);
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double cx = 0.5 * (xs[i] + xs[i + 1]);
            const double cy = 0.5 * (ys[j] + ys[j + 1]);
            const bool inside = geometry.planform == Planform::circle
                                    ? cx * cx + cy * cy < geometry.radius * geometry.radius
                                    : geometry.contains(cx, cy);
            if (!inside) continue;
            cell_on[j * (nx - 1) + i] = 1;
            node_used[j * nx + i] = node_used[j * nx + i + 1] = 1;
            node_used[(j + 1) * nx + i] = node_used[(j + 1) * nx + i + 1] = 1;
        }
    }

    Mesh mesh;
    mesh.geometry = geometry;
    std::vector<std::size_t> index(nx * ny, 0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            if (!node_used[j * nx + i]) continue;
            index[j * nx + i] = mesh.nodes.size();
            mesh.nodes.push_back({xs[i], ys[j]});
        }
    }
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            if (!cell_on[j * (nx - 1) + i]) continue;
            Element el;
            el.nodes = {index[j * nx + i], index[j * nx + i + 1], index[(j + 1) * nx + i + 1], index[(j + 1) * nx + i]};
            mesh.elements.push_back(el);
        }
    }
    if (mesh.elements.empty()) throw ConfigError("mesh generation produced no elements");
    return mesh;
}

std::optional<MirrorMap> heading_mirror(const Mesh& mesh) {
    const double h = mesh.geometry.heading_deg * std::numbers::pi / 180.0;
    const double c2 = std::cos(2.0 * h), s2 = std::sin(2.0 * h);
    // Snap to exact values for the axis-aligned and diagonal cases.
    auto snap = [](double v) {
        for (double t : {-1.0, 0.0, 1.0}) {
            if (std::abs(v - t) < 1e-12) return t;
        }
        return v;
    };
    MirrorMap m;
    m.reflection = {snap(c2), snap(s2), snap(s2), snap(-c2)};
    const auto [cx, cy] = mesh.geometry.centroid();

    double extent = 0.0;
    for (const auto& n : mesh.nodes) extent = std::max({extent, std::abs(n.x - cx), std::abs(n.y - cy)});
    const double quantum = 1e-9 * std::max(extent, 1e-30);
    auto key = [&](double x, double y) {
        return std::pair{std::llround((x - cx) / quantum), std::llround((y - cy) / quantum)};
    };
    std::map<std::pair<long long, long long>, std::size_t> lookup;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) lookup[key(mesh.nodes[i].x, mesh.nodes[i].y)] = i;

    const auto& r = m.reflection;
    m.node_perm.resize(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double dx = mesh.nodes[i].x - cx, dy = mesh.nodes[i].y - cy;
        const auto it = lookup.find(key(cx + r[0] * dx + r[1] * dy, cy + r[2] * dx + r[3] * dy));
        if (it == lookup.end()) return std::nullopt;
        m.node_perm[i] = it->second;
    }

    // The section layout must be mirror symmetric as well.
    std::map<std::array<std::size_t, 4>, int> region_of;
    for (const auto& el : mesh.elements) {
        auto sorted = el.nodes;
        std::sort(sorted.begin(), sorted.end());
        region_of[sorted] = el.region;
    }
    for (const auto& el : mesh.elements) {
        std::array<std::size_t, 4> image{};
        for (std::size_t k = 0; k < 4; ++k) image[k] = m.node_perm[el.nodes[k]];
        std::sort(image.begin(), image.end());
        const auto it = region_of.find(image);
        if (it == region_of.end() || it->second != el.region) return std::nullopt;
    }
    return m;
}

void write_node_csv(std::ostream& os, const Mesh& mesh) {
    os << "id,x,y\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        os << i << ',' << format_number(mesh.nodes[i].x) << ',' << format_number(mesh.nodes[i].y) << '\n';
    }
}

void write_element_csv(std::ostream& os, const Mesh& mesh) {
    os << "id,n1,n2,n3,n4\n";
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& n = mesh.elements[e].nodes;
        os << e << ',' << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3] << '\n';
    }
}

}  // namespace modeswim::fem
