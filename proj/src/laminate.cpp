#include "modeswim/laminate.hpp"

#include <cmath>
#include <string>

#include "modeswim/error.hpp"

namespace modeswim::laminate {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_poisson(double nu) {
    if (!std::isfinite(nu) || nu < 0.0 || nu >= 0.5) {
        throw DomainError("poisson ratio must lie in [0, 0.5), got " + std::to_string(nu));
    }
}

}  // namespace

double LaminateSection::total_thickness() const {
    double h = 0.0;
    for (const auto& l : layers) h += l.thickness;
    return h;
}

double bending_stiffness(double elastic_modulus, double thickness, double poisson_ratio) {
    if (!positive_finite(elastic_modulus)) throw DomainError("elastic modulus must be positive and finite");
    if (!positive_finite(thickness)) throw DomainError("thickness must be positive and finite");
    check_poisson(poisson_ratio);
    return elastic_modulus * thickness * thickness * thickness /
           (12.0 * (1.0 - poisson_ratio * poisson_ratio));
}

void validate(const Layer& layer) {
    if (!positive_finite(layer.thickness)) throw DomainError("layer thickness must be positive and finite");
    if (!positive_finite(layer.density)) throw DomainError("layer density must be positive and finite");
    if (!positive_finite(layer.elastic_modulus)) throw DomainError("layer elastic modulus must be positive and finite");
    check_poisson(layer.poisson_ratio);
}

LaminateSection section_properties(std::span<const Layer> layers) {
    if (layers.empty()) throw DomainError("laminate section needs at least one layer");

    LaminateSection s;
    s.layers.assign(layers.begin(), layers.end());

    double z = 0.0;
    double first_moment = 0.0;
    double axial = 0.0;
    for (const auto& l : layers) {
        validate(l);
        const double centroid = z + 0.5 * l.thickness;
        first_moment += l.elastic_modulus * l.thickness * centroid;
        axial += l.elastic_modulus * l.thickness;
        s.mass_per_area += l.density * l.thickness;
        z += l.thickness;
    }
    s.neutral_axis_offset = first_moment / axial;

    z = 0.0;
    for (const auto& l : layers) {
        const double d = z + 0.5 * l.thickness - s.neutral_axis_offset;
        s.flexural_rigidity_per_width +=
            l.elastic_modulus * (l.thickness * l.thickness * l.thickness / 12.0 + l.thickness * d * d);
        z += l.thickness;
    }
    return s;
}

PlateBendingStiffness plate_bending_stiffness(const LaminateSection& section) {
    double z = 0.0;
    double first_moment = 0.0;
    double axial = 0.0;
    for (const auto& l : section.layers) {
        const double q = l.elastic_modulus / (1.0 - l.poisson_ratio * l.poisson_ratio);
        first_moment += q * l.thickness * (z + 0.5 * l.thickness);
        axial += q * l.thickness;
        z += l.thickness;
    }
    const double axis = first_moment / axial;

    PlateBendingStiffness d;
    z = 0.0;
    for (const auto& l : section.layers) {
        const double offset = z + 0.5 * l.thickness - axis;
        const double inertia = l.thickness * l.thickness * l.thickness / 12.0 + l.thickness * offset * offset;
        const double q = l.elastic_modulus / (1.0 - l.poisson_ratio * l.poisson_ratio);
        d.d11 += q * inertia;
        d.d12 += l.poisson_ratio * q * inertia;
        d.d66 += 0.5 * (1.0 - l.poisson_ratio) * q * inertia;
        z += l.thickness;
    }
    d.d22 = d.d11;
    return d;
}

}  // namespace modeswim::laminate
