#include "kipsim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace kipsim {

Grid1D Grid1D::make(int n, double length) {
    if (n < 16) throw ConfigError("grid: need at least 16 nodes, got " + std::to_string(n));
    if (!(length > 0.0)) throw ConfigError("grid: length must be positive");
    Grid1D g;
    g.n = n;
    g.length = length;
    g.spacing = length / n;
    g.x.resize(n);
    for (int i = 0; i < n; ++i) g.x[i] = -0.5 * length + i * g.spacing;
    return g;
}

double Grid1D::wavenumber(int mode) const {
    return 2.0 * M_PI * mode / length;
}

Grid2D Grid2D::make(int nx, int ny, double length_x, double length_y) {
    if (nx < 16 || ny < 16) throw ConfigError("grid2d: need at least 16 nodes per axis");
    if (!(length_x > 0.0) || !(length_y > 0.0)) throw ConfigError("grid2d: lengths must be positive");
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.length_x = length_x;
    g.length_y = length_y;
    g.dx = length_x / nx;
    g.dy = length_y / ny;
    g.x.resize(nx);
    g.y.resize(ny);
    for (int i = 0; i < nx; ++i) g.x[i] = -0.5 * length_x + i * g.dx;
    for (int j = 0; j < ny; ++j) g.y[j] = -0.5 * length_y + j * g.dy;
    return g;
}

namespace {

// 4th-order central stencils: f' ~ (f[-2] - 8f[-1] + 8f[1] - f[2]) / 12h,
// f'' ~ (-f[-2] + 16f[-1] - 30f[0] + 16f[1] - f[2]) / 12h^2.
template <typename T>
void stencil1(int n, double h, const T* f, T* out) {
    const double c = 1.0 / (12.0 * h);
    for (int i = 0; i < n; ++i) {
        int im2 = i - 2 >= 0 ? i - 2 : i - 2 + n;
        int im1 = i - 1 >= 0 ? i - 1 : i - 1 + n;
        int ip1 = i + 1 < n ? i + 1 : i + 1 - n;
        int ip2 = i + 2 < n ? i + 2 : i + 2 - n;
        out[i] = c * (f[im2] - 8.0 * f[im1] + 8.0 * f[ip1] - f[ip2]);
    }
}

template <typename T>
void stencil2(int n, double h, const T* f, T* out) {
    const double c = 1.0 / (12.0 * h * h);
    for (int i = 0; i < n; ++i) {
        int im2 = i - 2 >= 0 ? i - 2 : i - 2 + n;
        int im1 = i - 1 >= 0 ? i - 1 : i - 1 + n;
        int ip1 = i + 1 < n ? i + 1 : i + 1 - n;
        int ip2 = i + 2 < n ? i + 2 : i + 2 - n;
        out[i] = c * (-f[im2] + 16.0 * f[im1] - 30.0 * f[i] + 16.0 * f[ip1] - f[ip2]);
    }
}

template <typename F>
F derivative_impl(const Grid1D& g, const F& field, int order) {
    if (static_cast<int>(field.size()) != g.n) {
        throw ConfigError("spatial_derivative: field size does not match grid");
    }
    if (order != 1 && order != 2) {
        throw std::invalid_argument("spatial_derivative: order must be 1 or 2, got " +
                                    std::to_string(order));
    }
    F out(field.size());
    if (order == 1) {
        stencil1(g.n, g.spacing, field.data(), out.data());
    } else {
        stencil2(g.n, g.spacing, field.data(), out.data());
    }
    return out;
}

void append_row(std::string& out, const double* vals, int count) {
    char buf[64];
    for (int c = 0; c < count; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", vals[c]);
        out += buf;
        out += (c + 1 == count) ? '\n' : ',';
    }
}

}  // namespace

RealField spatial_derivative(const Grid1D& g, const RealField& field, int order) {
    return derivative_impl(g, field, order);
}

ComplexField spatial_derivative(const Grid1D& g, const ComplexField& field, int order) {
    return derivative_impl(g, field, order);
}

void deriv1_into(const Grid1D& g, const double* f, double* out) { stencil1(g.n, g.spacing, f, out); }
void deriv2_into(const Grid1D& g, const double* f, double* out) { stencil2(g.n, g.spacing, f, out); }
void deriv1_into(const Grid1D& g, const std::complex<double>* f, std::complex<double>* out) {
    stencil1(g.n, g.spacing, f, out);
}
void deriv2_into(const Grid1D& g, const std::complex<double>* f, std::complex<double>* out) {
    stencil2(g.n, g.spacing, f, out);
}

double integrate(const Grid1D& g, const RealField& field) {
    if (static_cast<int>(field.size()) != g.n) {
        throw ConfigError("integrate: field size does not match grid");
    }
    return std::accumulate(field.begin(), field.end(), 0.0) * g.spacing;
}

RealField partial_x(const Grid2D& g, const RealField& field) {
    if (field.size() != g.size()) throw ConfigError("partial_x: field size does not match grid");
    RealField out(field.size());
    const double c = 1.0 / (12.0 * g.dx);
    for (int j = 0; j < g.ny; ++j) {
        const double* row = field.data() + static_cast<std::size_t>(j) * g.nx;
        double* orow = out.data() + static_cast<std::size_t>(j) * g.nx;
        for (int i = 0; i < g.nx; ++i) {
            int im2 = (i - 2 + g.nx) % g.nx, im1 = (i - 1 + g.nx) % g.nx;
            int ip1 = (i + 1) % g.nx, ip2 = (i + 2) % g.nx;
            orow[i] = c * (row[im2] - 8.0 * row[im1] + 8.0 * row[ip1] - row[ip2]);
        }
    }
    return out;
}

RealField partial_y(const Grid2D& g, const RealField& field) {
    if (field.size() != g.size()) throw ConfigError("partial_y: field size does not match grid");
    RealField out(field.size());
    const double c = 1.0 / (12.0 * g.dy);
    for (int j = 0; j < g.ny; ++j) {
        int jm2 = (j - 2 + g.ny) % g.ny, jm1 = (j - 1 + g.ny) % g.ny;
        int jp1 = (j + 1) % g.ny, jp2 = (j + 2) % g.ny;
        for (int i = 0; i < g.nx; ++i) {
            out[static_cast<std::size_t>(j) * g.nx + i] =
                c * (field[static_cast<std::size_t>(jm2) * g.nx + i] -
                     8.0 * field[static_cast<std::size_t>(jm1) * g.nx + i] +
                     8.0 * field[static_cast<std::size_t>(jp1) * g.nx + i] -
                     field[static_cast<std::size_t>(jp2) * g.nx + i]);
        }
    }
    return out;
}

double integrate(const Grid2D& g, const RealField& field) {
    if (field.size() != g.size()) throw ConfigError("integrate: field size does not match grid");
    return std::accumulate(field.begin(), field.end(), 0.0) * g.dx * g.dy;
}

int support_transitions(const RealField& rho, double threshold) {
    const int n = static_cast<int>(rho.size());
    int transitions = 0;
    for (int i = 0; i < n; ++i) {
        bool a = rho[i] >= threshold;
        bool b = rho[(i + 1) % n] >= threshold;
        if (a != b) ++transitions;
    }
    return transitions;
}

HydroPair polar_decompose(const Wavefunction& w, double rho_floor) {
    const int n = w.grid.n;
    if (static_cast<int>(w.psi.size()) != n) {
        throw ConfigError("polar_decompose: field size does not match grid");
    }
    HydroPair h;
    h.grid = w.grid;
    h.hbar = w.hbar;
    h.mass = w.mass;
    h.rho.resize(n);
    h.sigma.resize(n);
    int imax = 0;
    for (int i = 0; i < n; ++i) {
        h.rho[i] = std::norm(w.psi[i]);
        if (h.rho[i] > h.rho[imax]) imax = i;
    }
    // The support must be one periodic arc.
    if (support_transitions(h.rho, rho_floor) > 2) {
        throw DecompositionError(
            "polar_decompose: density vanishes inside the support (nodal state); "
            "phase is undefined across the node");
    }
    // Accumulate phase increments outward from the density maximum; each
    // increment is the principal argument of the nearest-neighbour ratio.
    h.sigma[imax] = w.hbar * std::arg(w.psi[imax]);
    for (int stepdir : {+1, -1}) {
        int prev = imax;
        for (int s = 1; s < n; ++s) {
            int i = (imax + stepdir * s % n + n) % n;
            std::complex<double> prevval = w.psi[prev];
            std::complex<double> val = w.psi[i];
            double dphase = 0.0;
            if (std::abs(prevval) > 0.0 && std::abs(val) > 0.0) {
                dphase = std::arg(val / prevval);
            }
            h.sigma[i] = h.sigma[prev] + w.hbar * dphase;
            prev = i;
            if (stepdir == +1 && s == n / 2) break;
            if (stepdir == -1 && s == n - n / 2 - 1) break;
        }
    }
    return h;
}

Wavefunction polar_compose(const HydroPair& h) {
    const int n = h.grid.n;
    if (static_cast<int>(h.rho.size()) != n || static_cast<int>(h.sigma.size()) != n) {
        throw ConfigError("polar_compose: field sizes do not match grid");
    }
    Wavefunction w;
    w.grid = h.grid;
    w.hbar = h.hbar;
    w.mass = h.mass;
    w.psi.resize(n);
    for (int i = 0; i < n; ++i) {
        double amp = h.rho[i] > 0.0 ? std::sqrt(h.rho[i]) : 0.0;
        w.psi[i] = std::polar(amp, h.sigma[i] / h.hbar);
    }
    return w;
}

RealField quantum_potential(const Grid1D& g, const RealField& rho, double hbar, double mass,
                            double rho_floor) {
    RealField amp(g.n);
    for (int i = 0; i < g.n; ++i) amp[i] = std::sqrt(std::max(rho[i], 0.0));
    RealField lap = spatial_derivative(g, amp, 2);
    RealField out(g.n);
    const double c = -hbar * hbar / (2.0 * mass);
    const double amp_floor = std::sqrt(rho_floor);
    for (int i = 0; i < g.n; ++i) out[i] = c * lap[i] / std::max(amp[i], amp_floor);
    return out;
}

RealField phase_gradient(const Wavefunction& w, double rho_floor) {
    ComplexField dpsi = spatial_derivative(w.grid, w.psi, 1);
    RealField out(w.grid.n);
    for (int i = 0; i < w.grid.n; ++i) {
        double rho = std::norm(w.psi[i]);
        out[i] = w.hbar * std::imag(std::conj(w.psi[i]) * dpsi[i]) / (rho + rho_floor);
    }
    return out;
}

std::string snapshot_csv(const Wavefunction& w) {
    HydroPair h = polar_decompose(w);
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "# n=%d length=%.17g hbar=%.17g mass=%.17g\n", w.grid.n,
                  w.grid.length, w.hbar, w.mass);
    out += buf;
    out += "x,re_psi,im_psi,rho,sigma\n";
    for (int i = 0; i < w.grid.n; ++i) {
        double row[5] = {w.grid.x[i], w.psi[i].real(), w.psi[i].imag(), h.rho[i], h.sigma[i]};
        append_row(out, row, 5);
    }
    return out;
}

std::string snapshot_csv(const HydroPair& h) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "# n=%d length=%.17g hbar=%.17g mass=%.17g\n", h.grid.n,
                  h.grid.length, h.hbar, h.mass);
    out += buf;
    out += "x,re_psi,im_psi,rho,sigma\n";
    for (int i = 0; i < h.grid.n; ++i) {
        double amp = h.rho[i] > 0.0 ? std::sqrt(h.rho[i]) : 0.0;
        std::complex<double> psi = std::polar(amp, h.sigma[i] / h.hbar);
        double row[5] = {h.grid.x[i], psi.real(), psi.imag(), h.rho[i], h.sigma[i]};
        append_row(out, row, 5);
    }
    return out;
}

}  // namespace kipsim
