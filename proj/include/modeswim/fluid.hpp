#pragma once

#include "modeswim/eigensolver.hpp"

namespace modeswim::fluid {

/// Incompressible added-mass model. `calibration` scales the flat-strip potential-flow added mass.
struct FluidModel {
    double density = 0.0;      // kg/m^3
    double calibration = 1.0;  // Lambda

    void validate() const;
};

/// Lambda * rho * pi * width^2 / 4, kg/m.
double beam_added_mass_per_length(double width, const FluidModel& fluid);

/// Lambda * rho * (pi/4) * characteristic_length, kg/m^2.
double plate_added_mass_per_area(double characteristic_length, const FluidModel& fluid);

/// Scales every frequency by 1/sqrt(1 + added/structural); shapes are kept, the basis is tagged wet.
eigen::ModalBasis wet_frequencies(const eigen::ModalBasis& dry, double structural_mass, double added_mass);

/// Lambda that moves `dry_frequency` to `target_wet_frequency` given the added/structural mass
/// ratio at Lambda = 1. Throws CalibrationError unless 0 < target < dry.
double calibrate(double dry_frequency, double target_wet_frequency, double baseline_ratio);

}  // namespace modeswim::fluid
