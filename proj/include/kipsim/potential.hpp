#pragma once

#include <cmath>
#include <vector>

#include "kipsim/errors.hpp"

namespace kipsim {

// External potential with analytic gradient.  Gradients are always evaluated
// analytically, never by differencing sampled values: confining potentials
// are not periodic and differencing them across the seam would corrupt the
// drift there.
struct Potential {
    enum class Kind { None, Harmonic, Polynomial };

    Kind kind = Kind::None;
    double omega0 = 1.0;                // harmonic: V = omega0^2 x^2 / 2 (unit mass)
    std::vector<double> coeffs;         // polynomial: V = sum c_k x^k

    static Potential none() { return {}; }
    static Potential harmonic(double omega0) {
        Potential p;
        p.kind = Kind::Harmonic;
        p.omega0 = omega0;
        return p;
    }
    static Potential polynomial(std::vector<double> coeffs) {
        Potential p;
        p.kind = Kind::Polynomial;
        p.coeffs = std::move(coeffs);
        return p;
    }

    double value(double x) const {
        switch (kind) {
            case Kind::None: return 0.0;
            case Kind::Harmonic: return 0.5 * omega0 * omega0 * x * x;
            case Kind::Polynomial: {
                double v = 0.0;
                for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
                return v;
            }
        }
        return 0.0;
    }

    double grad(double x) const {
        switch (kind) {
            case Kind::None: return 0.0;
            case Kind::Harmonic: return omega0 * omega0 * x;
            case Kind::Polynomial: {
                double v = 0.0;
                for (std::size_t k = coeffs.size(); k-- > 1;) v = v * x + coeffs[k] * k;
                return v;
            }
        }
        return 0.0;
    }
};

// Diffusion coefficient D(t, x) with analytic time/space derivatives; the
// parametrized forms cover the constant case and the two modulations the
// diagnostics exercise.
struct Diffusion {
    enum class Kind { Constant, SinT, TanhX };

    Kind kind = Kind::Constant;
    double d0 = 0.1;
    double epsilon = 0.0;
    double omega = 1.0;

    static Diffusion constant(double d) {
        Diffusion f;
        f.d0 = d;
        return f;
    }
    // D(t) = d0 (1 + epsilon sin(omega t))
    static Diffusion sin_t(double d0, double epsilon, double omega = 1.0) {
        Diffusion f;
        f.kind = Kind::SinT;
        f.d0 = d0;
        f.epsilon = epsilon;
        f.omega = omega;
        return f;
    }
    // D(x) = d0 (1 + epsilon tanh x)
    static Diffusion tanh_x(double d0, double epsilon) {
        Diffusion f;
        f.kind = Kind::TanhX;
        f.d0 = d0;
        f.epsilon = epsilon;
        return f;
    }

    bool is_constant() const { return kind == Kind::Constant || epsilon == 0.0; }

    double value(double t, double x) const {
        switch (kind) {
            case Kind::Constant: return d0;
            case Kind::SinT: return d0 * (1.0 + epsilon * std::sin(omega * t));
            case Kind::TanhX: return d0 * (1.0 + epsilon * std::tanh(x));
        }
        return d0;
    }

    double ddt(double t, double) const {
        if (kind == Kind::SinT) return d0 * epsilon * omega * std::cos(omega * t);
        return 0.0;
    }

    double ddx(double, double x) const {
        if (kind == Kind::TanhX) {
            double c = std::cosh(x);
            return d0 * epsilon / (c * c);
        }
        return 0.0;
    }

    // Largest value over the run, used by the stability prechecks.
    double max_value() const {
        switch (kind) {
            case Kind::Constant: return d0;
            case Kind::SinT: return d0 * (1.0 + std::fabs(epsilon));
            case Kind::TanhX: return d0 * (1.0 + std::fabs(epsilon));
        }
        return d0;
    }
};

}  // namespace kipsim
