#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "modeswim/error.hpp"
#include "modeswim/mesh.hpp"

using namespace modeswim;
using fem::PlateGeometry;

TEST(Mesh, RectangleCounts) {
    const auto m = fem::generate_mesh(PlateGeometry::rectangle(0.4, 0.2), 0.05);
    EXPECT_EQ(m.elements.size(), 8u * 4u);
    EXPECT_EQ(m.nodes.size(), 9u * 5u);
    EXPECT_NEAR(m.area(), 0.08, 1e-15);
    EXPECT_EQ(m.boundary_nodes().size(), 2u * 9u + 2u * 3u);
}

TEST(Mesh, ElementsAreCounterclockwiseFromLowerLeft) {
    const auto m = fem::generate_mesh(PlateGeometry::rectangle(1.0, 1.0), 0.25);
    for (const auto& e : m.elements) {
        const auto& p = m.nodes;
        EXPECT_LT(p[e.nodes[0]].x, p[e.nodes[1]].x);
        EXPECT_EQ(p[e.nodes[0]].y, p[e.nodes[1]].y);
        EXPECT_EQ(p[e.nodes[1]].x, p[e.nodes[2]].x);
        EXPECT_LT(p[e.nodes[1]].y, p[e.nodes[2]].y);
        EXPECT_EQ(p[e.nodes[3]].x, p[e.nodes[0]].x);
    }
}

TEST(Mesh, InfeasibleElementSizeIsRejected) {
    EXPECT_NO_THROW(fem::generate_mesh(PlateGeometry::rectangle(1.0, 1.0), 0.5));
    EXPECT_THROW(fem::generate_mesh(PlateGeometry::rectangle(1.0, 1.0), 0.6), ConfigError);
    EXPECT_THROW(fem::generate_mesh(PlateGeometry::rectangle(1.0, 1.0), 0.0), ConfigError);
    EXPECT_THROW(fem::generate_mesh(PlateGeometry::rectangle(-1.0, 1.0), 0.1), ConfigError);
}

TEST(Mesh, CircleAreaConvergesAndIsSymmetric) {
    const double r = 0.08;
    double previous = 1.0;
    for (double h : {0.01, 0.005, 0.0025}) {
        const auto m = fem::generate_mesh(PlateGeometry::circle(r), h);
        const double err = std::abs(m.area() / (std::numbers::pi * r * r) - 1.0);
        EXPECT_LT(err, previous + 1e-12);
        previous = err;
        double sx = 0.0, sy = 0.0;
        for (const auto& n : m.nodes) {
            sx += n.x;
            sy += n.y;
        }
        EXPECT_NEAR(sx, 0.0, 1e-12);
        EXPECT_NEAR(sy, 0.0, 1e-12);
    }
    EXPECT_LT(previous, 0.02);
}

TEST(Mesh, CrossFollowsArms) {
    const auto g = PlateGeometry::cross(0.2, 0.1, 0.02);
    const auto m = fem::generate_mesh(g, 0.01);
    EXPECT_NEAR(m.area(), g.area(), 1e-12);
    EXPECT_NEAR(g.area(), 0.2 * 0.02 + 0.1 * 0.02 - 0.02 * 0.02, 1e-15);
    EXPECT_THROW(fem::generate_mesh(g, 0.015), ConfigError);
}

TEST(Mesh, HeadingMirrorIsAnInvolution) {
    for (double heading : {0.0, 45.0, 90.0}) {
        auto g = PlateGeometry::rectangle(0.16, 0.16);
        g.heading_deg = heading;
        const auto m = fem::generate_mesh(g, 0.02);
        const auto mirror = fem::heading_mirror(m);
        ASSERT_TRUE(mirror) << heading;
        Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(m.dof_count()), -1.0, 2.0);
        const Eigen::VectorXd back = fem::apply_mirror(*mirror, fem::apply_mirror(*mirror, v));
        EXPECT_LT((back - v).norm(), 1e-14 * v.norm()) << heading;
    }
}

TEST(Mesh, MirrorAbsentWithoutSymmetry) {
    auto g = PlateGeometry::rectangle(0.2, 0.1);
    g.heading_deg = 45.0;
    EXPECT_FALSE(fem::heading_mirror(fem::generate_mesh(g, 0.02)));
}

TEST(Mesh, MirrorRespectsRegions) {
    auto g = PlateGeometry::rectangle(0.1, 0.1);
    auto m = fem::generate_mesh(g, 0.02);
    EXPECT_TRUE(fem::heading_mirror(m));
    m.elements.front().region = 1;  // lower-left corner: not mirrored across y = 0.05
    EXPECT_FALSE(fem::heading_mirror(m));
}

TEST(Mesh, CsvExport) {
    const auto m = fem::generate_mesh(PlateGeometry::rectangle(1.0, 1.0), 0.5);
    std::ostringstream nodes, elements;
    fem::write_node_csv(nodes, m);
    fem::write_element_csv(elements, m);
    EXPECT_EQ(nodes.str().substr(0, 7), "id,x,y\n");
    EXPECT_EQ(elements.str().substr(0, 15), "id,n1,n2,n3,n4\n");
    const auto text = nodes.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
}
