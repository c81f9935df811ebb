#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "modeswim/error.hpp"
#include "modeswim/fluid.hpp"

using namespace modeswim;

TEST(Fluid, AddedMassFormulas) {
    const fluid::FluidModel f{1000.0, 1.5};
    EXPECT_NEAR(fluid::beam_added_mass_per_length(0.02, f), 1.5 * 1000.0 * std::numbers::pi * 0.0004 / 4.0, 1e-15);
    EXPECT_NEAR(fluid::plate_added_mass_per_area(0.16, f), 1.5 * 1000.0 * std::numbers::pi / 4.0 * 0.16, 1e-12);
    EXPECT_EQ(fluid::beam_added_mass_per_length(0.02, {0.0, 1.0}), 0.0);
}

TEST(Fluid, WetFrequenciesScaleByAddedMass) {
    eigen::ModalBasis dry;
    dry.frequencies_hz = {0.0, 10.0, 20.0};
    dry.eigenvalues = {0.0, 1.0, 4.0};
    dry.shapes.assign(3, Eigen::VectorXd::Ones(4));
    dry.rigid_count = 1;
    const auto wet = fluid::wet_frequencies(dry, 2.0, 6.0);
    EXPECT_EQ(wet.medium, eigen::Medium::wet);
    EXPECT_EQ(wet.frequencies_hz[0], 0.0);
    EXPECT_NEAR(wet.frequencies_hz[1], 5.0, 1e-14);
    EXPECT_NEAR(wet.frequencies_hz[2], 10.0, 1e-14);
    EXPECT_NEAR(wet.mass_scale, 4.0, 1e-15);
    EXPECT_EQ(wet.shapes, dry.shapes);
    const auto same = fluid::wet_frequencies(dry, 2.0, 0.0);
    EXPECT_EQ(same.frequencies_hz, dry.frequencies_hz);
}

TEST(Fluid, CalibrationRoundTrip) {
    const double beta0 = 9.8;
    const double lambda = fluid::calibrate(22.5, 4.2, beta0);
    EXPECT_NEAR(22.5 / std::sqrt(1.0 + lambda * beta0), 4.2, 1e-12);
    EXPECT_THROW(fluid::calibrate(22.5, 22.5, beta0), CalibrationError);
    EXPECT_THROW(fluid::calibrate(22.5, 30.0, beta0), CalibrationError);
    EXPECT_THROW(fluid::calibrate(22.5, 0.0, beta0), CalibrationError);
}

TEST(Fluid, RejectsNegativeDensity) {
    EXPECT_THROW((fluid::FluidModel{-1.0, 1.0}.validate()), DomainError);
    EXPECT_THROW((fluid::FluidModel{1000.0, -1.0}.validate()), DomainError);
}
