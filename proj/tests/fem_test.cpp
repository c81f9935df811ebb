#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "modeswim/error.hpp"
#include "modeswim/fem.hpp"
#include "modeswim/laminate.hpp"

using namespace modeswim;

namespace {

laminate::LaminateSection aluminum(double h = 1e-3) {
    return laminate::section_properties(std::vector<laminate::Layer>{{h, 2700.0, 70e9, 0.3}});
}

// Full DOF vector sampling w(x, y) and its gradient.
template <class W, class Gx, class Gy>
Eigen::VectorXd interpolate(const fem::Mesh& m, W w, Gx gx, Gy gy) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(m.dof_count()));
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const auto [x, y] = m.nodes[i];
        u[static_cast<Eigen::Index>(fem::Mesh::dof(i, fem::w))] = w(x, y);
        u[static_cast<Eigen::Index>(fem::Mesh::dof(i, fem::slope_x))] = gx(x, y);
        u[static_cast<Eigen::Index>(fem::Mesh::dof(i, fem::slope_y))] = gy(x, y);
    }
    return u;
}

}  // namespace

TEST(Fem, ShapeFunctionsInterpolateNodalValues) {
    const double w = 0.3, h = 0.2;
    const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (int c = 0; c < 4; ++c) {
        const auto ev = fem::evaluate_shape(w, h, corners[c][0], corners[c][1]);
        for (int k = 0; k < 12; ++k) {
            EXPECT_NEAR(ev.n[k], k == 3 * c ? 1.0 : 0.0, 1e-13);
            EXPECT_NEAR(ev.dx[k], k == 3 * c + 1 ? 1.0 : 0.0, 1e-12);
            EXPECT_NEAR(ev.dy[k], k == 3 * c + 2 ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(Fem, ElementStiffnessHasExactlyThreeRigidModes) {
    const auto d = laminate::plate_bending_stiffness(aluminum());
    const auto k = fem::element_stiffness(0.02, 0.01, d);
    EXPECT_LT((k - k.transpose()).norm(), 1e-12 * k.norm());
    Eigen::SelfAdjointEigenSolver<fem::ElementMatrix> es(k);
    const auto ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    int zeros = 0;
    for (int i = 0; i < 12; ++i) {
        EXPECT_GT(ev[i], -1e-12 * top);
        if (ev[i] < 1e-10 * top) ++zeros;
    }
    EXPECT_EQ(zeros, 3);
}

TEST(Fem, MassMatrixCarriesTotalMass) {
    const auto m = fem::element_mass(0.02, 0.01, 1.8);
    Eigen::Matrix<double, 12, 1> unit = Eigen::Matrix<double, 12, 1>::Zero();
    for (int c = 0; c < 4; ++c) unit[3 * c] = 1.0;
    EXPECT_NEAR(unit.dot(m * unit), 1.8 * 0.02 * 0.01, 1e-15);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<fem::ElementMatrix>(m).eigenvalues().minCoeff(), 0.0);
}

TEST(Fem, RigidMotionCostsNoEnergy) {
    const auto mesh = fem::generate_mesh(fem::PlateGeometry::rectangle(0.2, 0.1), 0.02);
    const auto sys = fem::assemble(mesh, aluminum());
    const auto u = fem::rigid_motion(mesh, 0.3, -1.2, 0.7);
    EXPECT_LT(std::abs(u.dot(sys.stiffness * u)), 1e-12 * sys.stiffness.norm() * u.squaredNorm());
    const auto one = fem::rigid_motion(mesh, 1.0, 0.0, 0.0);
    EXPECT_NEAR(one.dot(sys.mass * one), aluminum().mass_per_area * 0.02, 1e-14);
}

TEST(Fem, ConstantCurvaturePatchTest) {
    // w = kx x^2/2 + kxy x y + ky y^2/2 has constant curvatures; the strain energy is
    // 1/2 A (D11 kx^2 + 2 D12 kx ky + D22 ky^2 + 4 D66 kxy^2).
    const double a = 0.3, b = 0.2, kx = 0.7, ky = -0.4, kxy = 0.25;
    const auto section = aluminum(2e-3);
    const auto d = laminate::plate_bending_stiffness(section);
    const auto mesh = fem::generate_mesh(fem::PlateGeometry::rectangle(a, b), 0.05);
    const auto sys = fem::assemble(mesh, section);
    const auto u = interpolate(
        mesh, [&](double x, double y) { return 0.5 * kx * x * x + kxy * x * y + 0.5 * ky * y * y; },
        [&](double x, double y) { return kx * x + kxy * y; }, [&](double x, double y) { return kxy * x + ky * y; });
    const double energy = 0.5 * u.dot(sys.stiffness * u);
    const double expected = 0.5 * a * b * (d.d11 * kx * kx + 2 * d.d12 * kx * ky + d.d22 * ky * ky + 4 * d.d66 * kxy * kxy);
    EXPECT_NEAR(energy / expected, 1.0, 1e-10);
}

TEST(Fem, BoundaryConditionsRemoveTheRightDofs) {
    const auto mesh = fem::generate_mesh(fem::PlateGeometry::rectangle(0.1, 0.1), 0.025);
    const auto sys = fem::assemble(mesh, aluminum());
    EXPECT_EQ(fem::apply_boundary(sys, mesh, fem::BoundaryCondition::free()).size(), sys.size());
    EXPECT_EQ(fem::apply_boundary(sys, mesh, fem::BoundaryCondition::simply_supported()).size(), sys.size() - 16);
    const auto clamped = fem::apply_boundary(sys, mesh, fem::BoundaryCondition::clamped({fem::Edge::left}));
    EXPECT_EQ(clamped.size(), sys.size() - 15);
    Eigen::VectorXd r = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(clamped.size()));
    const auto full = clamped.expand(r);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        if (mesh.nodes[i].x == 0.0) EXPECT_EQ(full[static_cast<Eigen::Index>(fem::Mesh::dof(i, 0))], 0.0);
    }
    auto circle = fem::generate_mesh(fem::PlateGeometry::circle(0.05), 0.01);
    const auto csys = fem::assemble(circle, aluminum());
    EXPECT_THROW(fem::apply_boundary(csys, circle, fem::BoundaryCondition::clamped({fem::Edge::left})), ConfigError);
}

TEST(Fem, RegionsSelectSections) {
    auto mesh = fem::generate_mesh(fem::PlateGeometry::rectangle(0.1, 0.1), 0.025);
    const std::vector<fem::Footprint> fp = {{0.0, 0.0, 0.05, 0.05}};
    fem::assign_regions(mesh, fp);
    int inside = 0;
    for (const auto& e : mesh.elements) inside += e.region;
    EXPECT_EQ(inside, 4);
    const std::vector sections = {aluminum(1e-3), aluminum(2e-3)};
    const auto sys = fem::assemble(mesh, sections);
    const auto one = fem::rigid_motion(mesh, 1.0, 0.0, 0.0);
    EXPECT_NEAR(one.dot(sys.mass * one), 2.7 * 0.0075 + 5.4 * 0.0025, 1e-14);
    EXPECT_THROW(fem::assemble(mesh, std::span(sections).first(1)), AssemblyError);
}

TEST(Fem, GaussRulesIntegratePolynomials) {
    for (int order : {2, 3, 4}) {
        const auto p = fem::gauss_points(order);
        const auto w = fem::gauss_weights(order);
        const int degree = 2 * order - 1;
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) sum += w[i] * std::pow(p[i], degree - 1);
        EXPECT_NEAR(sum, 2.0 / degree, 1e-14) << order;
    }
}
