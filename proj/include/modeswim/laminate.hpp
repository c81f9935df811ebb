#pragma once

#include <span>
#include <vector>

namespace modeswim::laminate {

struct Layer {
    double thickness = 0.0;        // m
    double density = 0.0;          // kg/m^3
    double elastic_modulus = 0.0;  // Pa
    double poisson_ratio = 0.0;
};

/// Homogenized bending properties of a layer stack, layers ordered bottom to top.
struct LaminateSection {
    std::vector<Layer> layers;
    double neutral_axis_offset = 0.0;          // m, measured from the bottom face
    double flexural_rigidity_per_width = 0.0;  // N*m, beam convention (no 1 - nu^2)
    double mass_per_area = 0.0;                // kg/m^2

    double total_thickness() const;
};

/// Isotropic plate bending constitutive matrix entries (moment = D * curvature).
struct PlateBendingStiffness {
    double d11 = 0.0;
    double d12 = 0.0;
    double d22 = 0.0;
    double d66 = 0.0;  // multiplies the engineering twist 2*w_xy
};

/// Kirchhoff plate stiffness E*h^3 / (12*(1 - nu^2)).
double bending_stiffness(double elastic_modulus, double thickness, double poisson_ratio);

void validate(const Layer& layer);

/// Classical lamination bending properties about the modulus-weighted neutral axis.
LaminateSection section_properties(std::span<const Layer> layers);

/// Plate constitutive matrix, with the (1 - nu^2) plate correction applied per layer.
/// The neutral axis uses plate moduli E/(1 - nu^2) as weights.
PlateBendingStiffness plate_bending_stiffness(const LaminateSection& section);

}  // namespace modeswim::laminate
