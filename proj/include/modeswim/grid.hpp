#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace modeswim {

/// Scalar field sampled on a regular nx-by-ny grid, stored row-major (y index outer).
struct GridField {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    std::vector<double> values;

    GridField() = default;
    GridField(std::size_t nx_, std::size_t ny_, double dx_, double dy_, double x0_ = 0.0, double y0_ = 0.0)
        : nx(nx_), ny(ny_), dx(dx_), dy(dy_), x0(x0_), y0(y0_), values(nx_ * ny_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * dy; }
    bool same_layout(const GridField& other) const;
};

/// Grid file: a "nx,ny,dx,dy" header line, one line with those values, then ny rows of nx values.
/// Numbers are printed with 9 significant digits.
void write_grid(std::ostream& os, const GridField& g);
void write_grid_file(const std::string& path, const GridField& g);
GridField read_grid(std::istream& is);

/// Shared number formatting for every text output (9 significant digits, "-0" folded to "0").
std::string format_number(double v);

}  // namespace modeswim
