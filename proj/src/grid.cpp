#include "modeswim/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "modeswim/error.hpp"

namespace modeswim {

bool GridField::same_layout(const GridField& other) const {
    return nx == other.nx && ny == other.ny && dx == other.dx && dy == other.dy && x0 == other.x0 &&
           y0 == other.y0 && values.size() == other.values.size();
}

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_grid(std::ostream& os, const GridField& g) {
    os << "nx,ny,dx,dy\n";
    os << g.nx << ',' << g.ny << ',' << format_number(g.dx) << ',' << format_number(g.dy) << '\n';
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            if (i) os << ',';
            os << format_number(g.at(i, j));
        }
        os << '\n';
    }
}

void write_grid_file(const std::string& path, const GridField& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    write_grid(os, g);
}

GridField read_grid(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "nx,ny,dx,dy") throw ConfigError("grid file: missing header");
    if (!std::getline(is, line)) throw ConfigError("grid file: missing dimensions");
    std::size_t nx = 0, ny = 0;
    double dx = 0, dy = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream dims(line);
    if (!(dims >> nx >> c1 >> ny >> c2 >> dx >> c3 >> dy)) throw ConfigError("grid file: bad dimensions");
    GridField g(nx, ny, dx, dy);
    for (std::size_t j = 0; j < ny; ++j) {
        if (!std::getline(is, line)) throw ConfigError("grid file: truncated");
        std::istringstream row(line);
        std::string cell;
        for (std::size_t i = 0; i < nx; ++i) {
            if (!std::getline(row, cell, ',')) throw ConfigError("grid file: short row");
            g.at(i, j) = std::stod(cell);
        }
    }
    return g;
}

}  // namespace modeswim
