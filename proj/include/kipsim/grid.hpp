#pragma once

#include <complex>
#include <vector>

#include "kipsim/errors.hpp"

namespace kipsim {

using RealField = std::vector<double>;
using ComplexField = std::vector<std::complex<double>>;

// Uniform periodic 1D grid on [-L/2, L/2); node i sits at -L/2 + i*dx.
struct Grid1D {
    int n = 0;
    double length = 0.0;
    double spacing = 0.0;
    std::vector<double> x;

    static Grid1D make(int n, double length);

    // Smallest admissible plane-wave wavenumber and the lattice of modes.
    double wavenumber(int mode) const;
};

// Uniform periodic 2D grid, row-major fields: index = iy * nx + ix.
struct Grid2D {
    int nx = 0, ny = 0;
    double length_x = 0.0, length_y = 0.0;
    double dx = 0.0, dy = 0.0;
    std::vector<double> x, y;

    static Grid2D make(int nx, int ny, double length_x, double length_y);
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
};

}  // namespace kipsim
