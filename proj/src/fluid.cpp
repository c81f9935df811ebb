#include "modeswim/fluid.hpp"

#include <cmath>
#include <numbers>

#include "modeswim/error.hpp"
#include "modeswim/grid.hpp"

namespace modeswim::fluid {

void FluidModel::validate() const {
    if (!std::isfinite(density) || density < 0.0) throw DomainError("fluid density must be >= 0");
    if (!std::isfinite(calibration) || calibration < 0.0) throw DomainError("fluid calibration factor must be >= 0");
}

double beam_added_mass_per_length(double width, const FluidModel& fluid) {
    fluid.validate();
    if (!(width > 0.0)) throw DomainError("beam width must be positive");
    return fluid.calibration * fluid.density * std::numbers::pi * width * width / 4.0;
}

double plate_added_mass_per_area(double characteristic_length, const FluidModel& fluid) {
    fluid.validate();
    if (!(characteristic_length > 0.0)) throw DomainError("characteristic length must be positive");
    return fluid.calibration * fluid.density * std::numbers::pi / 4.0 * characteristic_length;
}

eigen::ModalBasis wet_frequencies(const eigen::ModalBasis& dry, double structural_mass, double added_mass) {
    if (!(structural_mass > 0.0) || !std::isfinite(structural_mass)) throw DomainError("structural mass must be positive");
    if (!(added_mass >= 0.0) || !std::isfinite(added_mass)) throw DomainError("added mass must be >= 0");
    const double beta = added_mass / structural_mass;
    eigen::ModalBasis wet = dry;
    const double factor = 1.0 / std::sqrt(1.0 + beta);
    for (auto& f : wet.frequencies_hz) f *= factor;
    for (auto& l : wet.eigenvalues) l /= 1.0 + beta;
    wet.mass_scale = dry.mass_scale * (1.0 + beta);
    wet.medium = eigen::Medium::wet;
    return wet;
}

double calibrate(double dry_frequency, double target_wet_frequency, double baseline_ratio) {
    if (!(target_wet_frequency > 0.0) || !(dry_frequency > 0.0)) {
        throw CalibrationError("calibration frequencies must be positive");
    }
    if (target_wet_frequency >= dry_frequency) {
        throw CalibrationError("target wet frequency " + format_number(target_wet_frequency) +
                               " Hz is not below the dry frequency " + format_number(dry_frequency) +
                               " Hz; added mass cannot raise a frequency");
    }
    if (!(baseline_ratio > 0.0)) throw CalibrationError("baseline added-mass ratio must be positive");
    const double r = dry_frequency / target_wet_frequency;
    return (r * r - 1.0) / baseline_ratio;
}

}  // namespace modeswim::fluid
