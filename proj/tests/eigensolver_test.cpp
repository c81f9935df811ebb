#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "modeswim/eigensolver.hpp"
#include "modeswim/error.hpp"
#include "modeswim/fem.hpp"
#include "modeswim/laminate.hpp"

using namespace modeswim;

namespace {

laminate::LaminateSection aluminum() {
    return laminate::section_properties(std::vector<laminate::Layer>{{1e-3, 2700.0, 70e9, 0.3}});
}

struct Problem {
    fem::Mesh mesh;
    fem::SystemMatrices sys;
};

Problem plate(fem::PlateGeometry g, double h, fem::BoundaryCondition bc) {
    Problem p{fem::generate_mesh(g, h), {}};
    p.sys = fem::apply_boundary(fem::assemble(p.mesh, aluminum()), p.mesh, bc);
    return p;
}

}  // namespace

TEST(Eigensolver, MatchesDenseReference) {
    const auto p = plate(fem::PlateGeometry::rectangle(0.2, 0.15), 0.025, fem::BoundaryCondition::simply_supported());
    const auto iter = eigen::solve_modes(p.sys, 8);
    const auto dense = eigen::solve_modes_dense(p.sys, 8);
    ASSERT_EQ(iter.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_NEAR(iter.frequencies_hz[k] / dense.frequencies_hz[k], 1.0, 1e-10) << k;
        // Shapes agree up to the fixed sign convention.
        EXPECT_LT((iter.shapes[k] - dense.shapes[k]).norm(), 1e-6 * dense.shapes[k].norm()) << k;
    }
}

TEST(Eigensolver, ShapesAreMassOrthonormal) {
    const auto p = plate(fem::PlateGeometry::rectangle(0.2, 0.2), 0.02, fem::BoundaryCondition::clamped({fem::Edge::left}));
    const auto b = eigen::solve_modes(p.sys, 6);
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(p.sys.size()), 6);
    for (int k = 0; k < 6; ++k) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(p.sys.size()));
        for (std::size_t i = 0; i < p.sys.size(); ++i) r[static_cast<Eigen::Index>(i)] = b.shapes[k][static_cast<Eigen::Index>(p.sys.dofs[i])];
        phi.col(k) = r;
    }
    const Eigen::MatrixXd g = phi.transpose() * (p.sys.mass * phi);
    EXPECT_LT((g - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-10);
    EXPECT_LT(eigen::max_relative_residual(p.sys, b), 1e-8);
    EXPECT_EQ(b.rigid_count, 0u);
    EXPECT_EQ(b.medium, eigen::Medium::dry);
}

TEST(Eigensolver, FreePlateHasThreeRigidModes) {
    for (auto g : {fem::PlateGeometry::rectangle(0.16, 0.16), fem::PlateGeometry::circle(0.08)}) {
        const auto p = plate(g, 0.01, fem::BoundaryCondition::free());
        const auto b = eigen::solve_modes(p.sys, 6);
        EXPECT_EQ(b.rigid_count, 3u);
        const double first_elastic = b.eigenvalues[3];
        int below = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (std::abs(b.eigenvalues[k]) < 1e-6 * first_elastic) ++below;
        }
        EXPECT_EQ(below, 3);
        for (int k = 0; k < 3; ++k) EXPECT_EQ(b.frequencies_hz[k], 0.0);
        EXPECT_GT(b.frequencies_hz[3], 0.0);
    }
}

TEST(Eigensolver, ExplicitShiftFindsTheSameModes) {
    const auto p = plate(fem::PlateGeometry::rectangle(0.2, 0.15), 0.025, fem::BoundaryCondition::simply_supported());
    const auto base = eigen::solve_modes(p.sys, 5);
    eigen::SolveOptions opt;
    opt.shift_hz = 0.5 * base.frequencies_hz[0];
    const auto shifted = eigen::solve_modes(p.sys, 5, opt);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(shifted.frequencies_hz[k] / base.frequencies_hz[k], 1.0, 1e-10);
}

TEST(Eigensolver, IsDeterministic) {
    const auto p = plate(fem::PlateGeometry::circle(0.08), 0.01, fem::BoundaryCondition::free());
    const auto a = eigen::solve_modes(p.sys, 8);
    const auto b = eigen::solve_modes(p.sys, 8);
    EXPECT_EQ(a.frequencies_hz, b.frequencies_hz);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.shapes[k], b.shapes[k]);
}

TEST(Eigensolver, DegeneratePairsOnSymmetricPlate) {
    auto g = fem::PlateGeometry::rectangle(0.2, 0.2);
    g.heading_deg = 45.0;
    const auto p = plate(g, 0.025, fem::BoundaryCondition::simply_supported());
    eigen::SolveOptions opt;
    opt.mirror = fem::heading_mirror(p.mesh);
    ASSERT_TRUE(opt.mirror);
    const auto b = eigen::solve_modes(p.sys, 6, opt);
    const auto pairs = eigen::detect_degenerate_pairs(b, 1e-6);
    ASSERT_FALSE(pairs.empty());
    EXPECT_EQ(pairs.front(), std::make_pair(std::size_t{1}, std::size_t{2}));
    // Canonical rotation: first shape symmetric under the mirror, second antisymmetric.
    const auto& s0 = b.shapes[1];
    const auto& s1 = b.shapes[2];
    EXPECT_NEAR(s0.dot(fem::apply_mirror(*opt.mirror, s0)) / s0.squaredNorm(), 1.0, 1e-6);
    EXPECT_NEAR(s1.dot(fem::apply_mirror(*opt.mirror, s1)) / s1.squaredNorm(), -1.0, 1e-6);
}

TEST(Eigensolver, DegeneracyToleranceIsValidated) {
    eigen::ModalBasis b;
    b.frequencies_hz = {1.0, 1.01, 2.0, 2.5};
    b.eigenvalues = {1.0, 1.02, 4.0, 6.25};
    b.shapes.resize(4);
    EXPECT_EQ(eigen::detect_degenerate_pairs(b, 0.02).size(), 1u);
    EXPECT_TRUE(eigen::detect_degenerate_pairs(b, 0.0).empty());
    EXPECT_THROW(eigen::detect_degenerate_pairs(b, 0.2), DomainError);
    EXPECT_THROW(eigen::detect_degenerate_pairs(b, -0.01), DomainError);
}

TEST(Eigensolver, RejectsBadRequests) {
    const auto p = plate(fem::PlateGeometry::rectangle(0.1, 0.1), 0.05, fem::BoundaryCondition::simply_supported());
    EXPECT_THROW(eigen::solve_modes(p.sys, 0), DomainError);
    EXPECT_THROW(eigen::solve_modes(p.sys, static_cast<int>(p.sys.size()) + 1), DomainError);
    eigen::SolveOptions bad;
    bad.shift_hz = -1.0;
    EXPECT_THROW(eigen::solve_modes(p.sys, 2, bad), DomainError);
}

TEST(Eigensolver, ShiftOnAnEigenvalueIsReported) {
    // K = diag(4, 9, 16), M = I: a shift of (2 pi f)^2 = 4 makes K - sigma M singular.
    fem::SystemMatrices sys;
    sys.stiffness.resize(3, 3);
    sys.mass.resize(3, 3);
    for (int i = 0; i < 3; ++i) {
        sys.stiffness.insert(i, i) = (i + 2.0) * (i + 2.0);
        sys.mass.insert(i, i) = 1.0;
    }
    sys.dofs = {0, 1, 2};
    sys.full_dof_count = 3;
    eigen::SolveOptions opt;
    opt.shift_hz = 1.0 / std::numbers::pi;
    EXPECT_THROW(eigen::solve_modes(sys, 2, opt), SolverError);
    const auto b = eigen::solve_modes(sys, 2);
    EXPECT_NEAR(b.eigenvalues[0], 4.0, 1e-12);
    EXPECT_NEAR(b.eigenvalues[1], 9.0, 1e-12);
}
