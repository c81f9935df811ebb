#include "modeswim/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "modeswim/error.hpp"

namespace modeswim::analytic {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::array<double, 6> kCantileverRoots = {
    1.87510407, 4.69409113, 7.85475744, 10.9955407, 14.1371684, 17.2787595,
};

}  // namespace

void validate(const ModeIndex& idx) {
    if (idx.m < 1 || idx.n < 1) {
        throw DomainError("mode indices must be >= 1, got (" + std::to_string(idx.m) + "," + std::to_string(idx.n) + ")");
    }
}

void validate(const AnalyticPlate& p) {
    for (double v : {p.a, p.b, p.stiffness, p.mass_per_area}) {
        if (!std::isfinite(v) || v <= 0.0) throw DomainError("analytic plate parameters must be positive");
    }
}

double ss_mode_shape(const ModeIndex& idx, const AnalyticPlate& plate, double x, double y) {
    validate(idx);
    validate(plate);
    if (!(x >= 0.0 && x <= plate.a && y >= 0.0 && y <= plate.b)) {
        throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside the plate");
    }
    return std::sin(idx.m * pi * x / plate.a) * std::sin(idx.n * pi * y / plate.b);
}

double ss_eigenfrequency(const ModeIndex& idx, const AnalyticPlate& plate) {
    validate(idx);
    validate(plate);
    const double m = idx.m, n = idx.n;
    return pi * pi * (m * m / (plate.a * plate.a) + n * n / (plate.b * plate.b)) *
           std::sqrt(plate.stiffness / plate.mass_per_area);
}

double ss_frequency_hz(const ModeIndex& idx, const AnalyticPlate& plate) {
    return ss_eigenfrequency(idx, plate) / (2.0 * pi);
}

std::vector<double> ss_lowest_frequencies_hz(const AnalyticPlate& plate, int count) {
    validate(plate);
    std::vector<double> all;
    const int limit = count + 2;
    for (int m = 1; m <= limit; ++m) {
        for (int n = 1; n <= limit; ++n) all.push_back(ss_frequency_hz({m, n}, plate));
    }
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(std::max(count, 0)));
    return all;
}

GridField ss_mode_grid(const ModeIndex& idx, const AnalyticPlate& plate, std::size_t nx, std::size_t ny) {
    validate(idx);
    validate(plate);
    if (nx == 0 || ny == 0) throw DomainError("grid needs at least one interval per direction");
    GridField g(nx + 1, ny + 1, plate.a / static_cast<double>(nx), plate.b / static_cast<double>(ny));
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            // Evaluate on exact fractions so edge values are sin(k*pi) rounded the same way everywhere.
            const double sx = std::sin(idx.m * pi * static_cast<double>(i) / static_cast<double>(nx));
            const double sy = std::sin(idx.n * pi * static_cast<double>(j) / static_cast<double>(ny));
            g.at(i, j) = sx * sy;
        }
    }
    return g;
}

Phasor unit_phasor_deg(double degrees) {
    if (!std::isfinite(degrees)) throw DomainError("phase angle must be finite");
    double r = std::fmod(degrees, 360.0);
    if (r < 0.0) r += 360.0;
    bool negate = false;
    if (r >= 180.0) {
        r -= 180.0;
        negate = true;
    }
    // Snap to a 1e-9 degree grid so that g and g + 180 reduce to the same argument despite
    // the rounding of the addition.
    r = std::round(r * 1e9) / 1e9;
    if (r == 180.0) {
        r = 0.0;
        negate = !negate;
    }
    Phasor p;
    if (r == 0.0) {
        p = {1.0, 0.0};
    } else if (r == 90.0) {
        p = {0.0, 1.0};
    } else {
        const double rad = r * pi / 180.0;
        p = {std::cos(rad), std::sin(rad)};
    }
    if (negate) p = {-p.c, -p.s};
    return p;
}

Phasor unit_phasor(double radians) { return unit_phasor_deg(radians * 180.0 / pi); }

std::vector<double> superpose_degenerate(std::span<const double> w_mn, std::span<const double> w_nm, double gamma) {
    if (w_mn.size() != w_nm.size()) {
        throw ShapeError("superpose_degenerate: fields have " + std::to_string(w_mn.size()) + " and " +
                         std::to_string(w_nm.size()) + " samples");
    }
    const Phasor p = unit_phasor(gamma);
    std::vector<double> out(w_mn.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = w_mn[k] * p.c + w_nm[k] * p.s;
    return out;
}

GridField superpose_degenerate(const GridField& w_mn, const GridField& w_nm, double gamma) {
    if (!w_mn.same_layout(w_nm)) throw ShapeError("superpose_degenerate: grids differ in layout");
    GridField out = w_mn;
    out.values = superpose_degenerate(w_mn.values, w_nm.values, gamma);
    return out;
}

std::span<const double> cantilever_roots() { return kCantileverRoots; }

std::vector<double> cantilever_frequencies(const laminate::LaminateSection& section, double length, double width,
                                           int count) {
    if (count < 1) throw DomainError("cantilever_frequencies: count must be >= 1");
    if (!(length > 0.0) || !(width > 0.0)) throw DomainError("cantilever_frequencies: length and width must be positive");
    const double ei = section.flexural_rigidity_per_width * width;
    const double mass_per_length = section.mass_per_area * width;
    const double scale = std::sqrt(ei / (mass_per_length * std::pow(length, 4)));
    std::vector<double> f;
    for (int i = 0; i < count; ++i) {
        const double root = i < static_cast<int>(kCantileverRoots.size())
                                ? kCantileverRoots[static_cast<std::size_t>(i)]
                                : (2.0 * i + 1.0) * pi / 2.0;
        f.push_back(root * root / (2.0 * pi) * scale);
    }
    return f;
}

}  // namespace modeswim::analytic
