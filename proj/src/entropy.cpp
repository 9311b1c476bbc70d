#include "kipsim/entropy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kipsim {

namespace {

constexpr double kSmallDeformation = 1e-6;
const double kInf = std::numeric_limits<double>::infinity();

std::string format_param(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

EntropyModel EntropyModel::boltzmann_gibbs() {
    EntropyModel m;
    m.variant_ = EntropyVariant::BoltzmannGibbs;
    m.valid_lo_ = 0.0;
    m.valid_hi_ = kInf;
    return m;
}

EntropyModel EntropyModel::two_param(double kappa_d, double r) {
    if (!std::isfinite(kappa_d) || !std::isfinite(r)) {
        throw ConfigError("two_param: parameters must be finite");
    }
    // ln_{kappa,r} is even in kappa_d; normalize to kappa_d >= 0.
    double k = std::fabs(kappa_d);
    if (!(k < 1.0 + r)) {
        throw ConfigError("two_param: requires |kappa_d| < 1 + r (got kappa_d=" +
                          format_param(kappa_d) + ", r=" + format_param(r) + ")");
    }
    EntropyModel m;
    m.variant_ = EntropyVariant::TwoParam;
    m.kappa_ = k;
    m.r_ = r;
    m.small_kappa_ = k < kSmallDeformation;
    if (!m.small_kappa_) {
        m.ap_ = (r + k) * (1.0 + r + k) / (2.0 * k);
        m.am_ = (r - k) * (1.0 + r - k) / (2.0 * k);
    }
    m.classify_validity();
    return m;
}

EntropyModel EntropyModel::tsallis(double q) {
    if (!std::isfinite(q) || !(q > 0.0)) {
        throw ConfigError("tsallis: requires q > 0 (got q=" + format_param(q) + ")");
    }
    EntropyModel m;
    m.variant_ = EntropyVariant::Tsallis;
    m.q_ = q;
    m.small_q_ = std::fabs(q - 1.0) < kSmallDeformation;
    m.valid_lo_ = 0.0;
    m.valid_hi_ = kInf;
    return m;
}

EntropyModel EntropyModel::kaniadakis(double kappa_d) {
    EntropyModel m = two_param(kappa_d, 0.0);
    m.variant_ = EntropyVariant::Kaniadakis;
    return m;
}

EntropyModel EntropyModel::eip(double kappa_e, EipDrift drift) {
    if (!std::isfinite(kappa_e)) {
        throw ConfigError("eip: kappa_e must be finite");
    }
    EntropyModel m;
    m.variant_ = EntropyVariant::Eip;
    m.kappa_ = kappa_e;
    m.drift_ = drift;
    m.valid_lo_ = 0.0;
    m.valid_hi_ = kappa_e < 0.0 ? -1.0 / kappa_e : kInf;
    return m;
}

std::string EntropyModel::name() const {
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return "bg";
        case EntropyVariant::TwoParam:
            return "two_param(kappa_d=" + format_param(kappa_) + ", r=" + format_param(r_) + ")";
        case EntropyVariant::Tsallis:
            return "tsallis(q=" + format_param(q_) + ")";
        case EntropyVariant::Kaniadakis:
            return "kaniadakis(kappa_d=" + format_param(kappa_) + ")";
        case EntropyVariant::Eip:
            return "eip(kappa_e=" + format_param(kappa_) +
                   (drift_ == EipDrift::Linear ? ", linear_drift)" : ", nonlinear_drift)");
    }
    return "unknown";
}

void EntropyModel::set_rho_floor(double floor) {
    if (!(floor > 0.0) || !(floor < 1.0)) {
        throw ConfigError("rho_floor must lie in (0, 1)");
    }
    rho_floor_ = floor;
}

double EntropyModel::floored(double rho) const {
    if (!(rho > 0.0)) {
        throw DomainError("density must be positive (got " + format_param(rho) + ")");
    }
    return std::max(rho, rho_floor_);
}

// Classify the sign of f(rho) = ap rho^{r+k} - am rho^{r-k} analytically: the
// admissible interval is where d ln kappa / d rho > 0.
void EntropyModel::classify_validity() {
    valid_lo_ = 0.0;
    valid_hi_ = kInf;
    if (small_kappa_) {
        // f0 = rho^r [(1+2r) + r(1+r) ln rho]
        double r = r_;
        if (std::fabs(r) < 1e-14) return;  // f = 1
        double lnstar = -(1.0 + 2.0 * r) / (r * (1.0 + r));
        double rstar = std::exp(lnstar);
        if (r > 0.0) {
            valid_lo_ = rstar;
        } else {
            valid_hi_ = rstar;
        }
        return;
    }
    double k = kappa_;
    if (ap_ > 0.0 && am_ <= 0.0) return;  // positive everywhere
    if (ap_ > 0.0 && am_ > 0.0) {
        valid_lo_ = std::pow(am_ / ap_, 1.0 / (2.0 * k));
        return;
    }
    if (ap_ <= 0.0 && am_ < 0.0) {
        valid_hi_ = std::pow(am_ / ap_, 1.0 / (2.0 * k));
        if (ap_ == 0.0) valid_hi_ = kInf;
        return;
    }
    throw ConfigError("two_param: d ln kappa / d rho <= 0 for all rho "
                      "(kappa_d=" + format_param(kappa_) + ", r=" + format_param(r_) + ")");
}

double EntropyModel::ln_kappa(double rho) const {
    double x = floored(rho);
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return 1.0 + std::log(x);
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis: {
            if (small_kappa_) {
                double lr = std::log(x);
                return std::pow(x, r_) * ((1.0 + r_) * lr + 1.0);
            }
            double k = kappa_, r = r_;
            return ((1.0 + r + k) * std::pow(x, r + k) - (1.0 + r - k) * std::pow(x, r - k)) /
                   (2.0 * k);
        }
        case EntropyVariant::Tsallis: {
            if (small_q_) return 1.0 + std::log(x);
            return (q_ * std::pow(x, q_ - 1.0) - 1.0) / (q_ - 1.0);
        }
        case EntropyVariant::Eip:
            return std::log(x) - std::log1p(kappa_ * x);
    }
    return 0.0;
}

double EntropyModel::dln_kappa(double rho) const {
    double x = floored(rho);
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return 1.0 / x;
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis: {
            if (small_kappa_) {
                double lr = std::log(x);
                return std::pow(x, r_ - 1.0) * ((1.0 + 2.0 * r_) + r_ * (1.0 + r_) * lr);
            }
            double k = kappa_, r = r_;
            return ap_ * std::pow(x, r + k - 1.0) - am_ * std::pow(x, r - k - 1.0);
        }
        case EntropyVariant::Tsallis: {
            if (small_q_) return 1.0 / x;
            return q_ * std::pow(x, q_ - 2.0);
        }
        case EntropyVariant::Eip:
            return 1.0 / (x * (1.0 + kappa_ * x));
    }
    return 0.0;
}

double EntropyModel::d2ln_kappa(double rho) const {
    double x = floored(rho);
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return -1.0 / (x * x);
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis: {
            if (small_kappa_) {
                double lr = std::log(x);
                double r = r_;
                return std::pow(x, r - 2.0) *
                       (3.0 * r * r - 1.0 + (r * r * r - r) * lr);
            }
            double k = kappa_, r = r_;
            return ap_ * (r + k - 1.0) * std::pow(x, r + k - 2.0) -
                   am_ * (r - k - 1.0) * std::pow(x, r - k - 2.0);
        }
        case EntropyVariant::Tsallis: {
            if (small_q_) return -1.0 / (x * x);
            return q_ * (q_ - 2.0) * std::pow(x, q_ - 3.0);
        }
        case EntropyVariant::Eip: {
            double d = 1.0 + kappa_ * x;
            return -(1.0 + 2.0 * kappa_ * x) / (x * x * d * d);
        }
    }
    return 0.0;
}

double EntropyModel::gamma(double rho) const {
    if (!(rho >= 0.0)) {
        throw DomainError("gamma: density must be non-negative (got " + format_param(rho) + ")");
    }
    if (variant_ == EntropyVariant::Eip && drift_ == EipDrift::Nonlinear) {
        return rho * (1.0 + kappa_ * rho);
    }
    return rho;
}

double EntropyModel::dgamma(double rho) const {
    if (!(rho >= 0.0)) {
        throw DomainError("dgamma: density must be non-negative (got " + format_param(rho) + ")");
    }
    if (variant_ == EntropyVariant::Eip && drift_ == EipDrift::Nonlinear) {
        return 1.0 + 2.0 * kappa_ * rho;
    }
    return 1.0;
}

double EntropyModel::f(double rho) const {
    return gamma(floored(rho)) * dln_kappa(rho);
}

double EntropyModel::f_tilde(double rho) const {
    return floored(rho) * dln_kappa(rho);
}

double EntropyModel::f1(double rho) const {
    double d = dln_kappa(rho);
    return gamma(floored(rho)) * d * d;
}

double EntropyModel::f2(double rho) const {
    double x = floored(rho);
    double d = dln_kappa(x);
    return 0.5 * (dgamma(x) * d * d + 2.0 * gamma(x) * d * d2ln_kappa(x));
}

double EntropyModel::f1_tilde(double rho) const {
    double x = floored(rho);
    double d = dln_kappa(x);
    return x * d * d;
}

double EntropyModel::f2_tilde(double rho) const {
    double x = floored(rho);
    double d = dln_kappa(x);
    return 0.5 * (d * d + 2.0 * x * d * d2ln_kappa(x));
}

double EntropyModel::f_antiderivative(double rho) const {
    if (rho == 0.0) return 0.0;
    double x = floored(rho);
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return x;
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis: {
            if (small_kappa_) {
                return std::pow(x, r_ + 1.0) * (1.0 + r_ * std::log(x));
            }
            double k = kappa_, r = r_;
            return ap_ * std::pow(x, r + k + 1.0) / (r + k + 1.0) -
                   am_ * std::pow(x, r - k + 1.0) / (r - k + 1.0);
        }
        case EntropyVariant::Tsallis:
            if (small_q_) return x;
            return std::pow(x, q_);
        case EntropyVariant::Eip:
            if (drift_ == EipDrift::Nonlinear) return x;
            if (std::fabs(kappa_) < 1e-14) return x;
            return std::log1p(kappa_ * x) / kappa_;
    }
    return 0.0;
}

double EntropyModel::kappa_inverse(double y) const {
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw RangeError("kappa_inverse: y must be positive and finite (got " +
                         format_param(y) + ")");
    }
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return y / std::exp(1.0);
        case EntropyVariant::Eip: {
            if (kappa_ > 0.0 && !(y < 1.0 / kappa_)) {
                throw RangeError("kappa_inverse: y outside the range of kappa; admissible "
                                 "y in (0, " + format_param(1.0 / kappa_) + ")");
            }
            return y / (1.0 - kappa_ * y);
        }
        case EntropyVariant::Tsallis:
            if (small_q_) return y / std::exp(1.0);
            break;
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis:
            if (small_kappa_ && std::fabs(r_) < 1e-14) return y / std::exp(1.0);
            break;
    }
    // Guarded bisection on the monotone ln_kappa over the admissible interval,
    // with the bracket clipped to exponent-safe densities.
    double pmax = std::max({std::fabs(r_ + kappa_), std::fabs(r_ - kappa_),
                            std::fabs(q_ - 1.0) + 1.0, 1.0});
    double safe = 650.0 / pmax;
    // ln_kappa floors below rho_floor, so the invertible bracket starts there.
    double lo = std::max({valid_lo_ * (1.0 + 1e-12), std::exp(-safe), rho_floor_});
    double hi = std::min(valid_hi_ * (1.0 - 1e-12), std::exp(safe));
    double target = std::log(y);
    double flo = ln_kappa(lo);
    double fhi = ln_kappa(hi);
    if (target < flo || target > fhi) {
        throw RangeError("kappa_inverse: y=" + format_param(y) +
                         " outside the attainable range [" + format_param(std::exp(flo)) +
                         ", " + format_param(std::exp(fhi)) + "] for model " + name());
    }
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
        double mid = 0.5 * (a + b);
        double v = ln_kappa(std::exp(mid));
        if (v < target) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return std::exp(0.5 * (a + b));
}

std::pair<double, double> EntropyModel::ln_kappa_range() const {
    switch (variant_) {
        case EntropyVariant::BoltzmannGibbs:
            return {-kInf, kInf};
        case EntropyVariant::Eip: {
            // kappa(rho) = rho / (1 + kappa_e rho): bounded above by 1/kappa_e
            // for kappa_e > 0, unbounded otherwise.
            if (kappa_ > 0.0) return {-kInf, -std::log(kappa_)};
            return {-kInf, kInf};
        }
        case EntropyVariant::Tsallis: {
            if (small_q_) return {-kInf, kInf};
            if (q_ > 1.0) return {-1.0 / (q_ - 1.0), kInf};  // ln kappa(0+) finite
            return {-kInf, 1.0 / (1.0 - q_)};                // ceiling as rho -> inf
        }
        case EntropyVariant::TwoParam:
        case EntropyVariant::Kaniadakis: {
            double pmax = std::max({std::fabs(r_ + kappa_), std::fabs(r_ - kappa_), 1.0});
            double safe = 650.0 / pmax;
            double lo = std::max(valid_lo_ * (1.0 + 1e-12), std::exp(-safe));
            double hi = std::min(valid_hi_ * (1.0 - 1e-12), std::exp(safe));
            // Evaluate the deformed log directly (bypassing the floor) at the
            // bracket ends; treat extreme magnitudes as unbounded.
            EntropyModel probe = *this;
            probe.rho_floor_ = std::min(rho_floor_, lo * 0.5);
            double flo = probe.ln_kappa(lo);
            double fhi = probe.ln_kappa(hi);
            if (flo < -1e280) flo = -kInf;
            if (fhi > 1e280) fhi = kInf;
            return {flo, fhi};
        }
    }
    return {-kInf, kInf};
}

DerivedFunctionals::DerivedFunctionals(const EntropyModel& m, double lo, double hi)
    : model(m) {
    if (!(lo > 0.0) || !(hi > lo)) {
        throw ConfigError("derived_functionals: need 0 < lo < hi");
    }
    if (lo < m.rho_valid_lo() || hi > m.rho_valid_hi()) {
        throw ConfigError("derived_functionals: requested density range [" +
                          format_param(lo) + ", " + format_param(hi) +
                          "] exceeds the admissible interval [" +
                          format_param(m.rho_valid_lo()) + ", " +
                          format_param(m.rho_valid_hi()) + "] of model " + m.name());
    }
}

}  // namespace kipsim
