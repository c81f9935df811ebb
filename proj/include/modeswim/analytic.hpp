#pragma once

#include <span>
#include <vector>

#include "modeswim/grid.hpp"
#include "modeswim/laminate.hpp"

namespace modeswim::analytic {

/// Half-wave counts along x (m) and y (n).
struct ModeIndex {
    int m = 1;
    int n = 1;
};

/// Uniform rectangular plate with side lengths a (x) and b (y).
struct AnalyticPlate {
    double a = 1.0;
    double b = 1.0;
    double stiffness = 1.0;      // D, N*m
    double mass_per_area = 1.0;  // kg/m^2
};

void validate(const ModeIndex& idx);
void validate(const AnalyticPlate& plate);

/// sin(m*pi*x/a) * sin(n*pi*y/b) for a simply supported plate.
double ss_mode_shape(const ModeIndex& idx, const AnalyticPlate& plate, double x, double y);

/// Angular eigenfrequency pi^2 (m^2/a^2 + n^2/b^2) sqrt(D/mu), rad/s.
double ss_eigenfrequency(const ModeIndex& idx, const AnalyticPlate& plate);
double ss_frequency_hz(const ModeIndex& idx, const AnalyticPlate& plate);

/// The `count` lowest simply supported frequencies in Hz, ascending, by enumeration.
std::vector<double> ss_lowest_frequencies_hz(const AnalyticPlate& plate, int count);

/// Samples the simply supported mode on an (nx+1)-by-(ny+1) node grid covering the plate.
GridField ss_mode_grid(const ModeIndex& idx, const AnalyticPlate& plate, std::size_t nx, std::size_t ny);

/// cos(gamma) and sin(gamma), exact at multiples of a right angle, with
/// unit_phasor(g + pi) == -unit_phasor(g) bit for bit.
struct Phasor {
    double c = 1.0;
    double s = 0.0;
};
Phasor unit_phasor_deg(double degrees);
Phasor unit_phasor(double radians);

/// Pointwise w_mn cos(gamma) + w_nm sin(gamma).
std::vector<double> superpose_degenerate(std::span<const double> w_mn, std::span<const double> w_nm, double gamma);
GridField superpose_degenerate(const GridField& w_mn, const GridField& w_nm, double gamma);

/// Clamped-free Euler-Bernoulli roots beta_i * L.
std::span<const double> cantilever_roots();

/// Clamped-free frequencies in Hz of a laminated strip of the given length and width.
std::vector<double> cantilever_frequencies(const laminate::LaminateSection& section, double length, double width,
                                           int count);

}  // namespace modeswim::analytic
