#include "nlsphase/nonlinearity.hpp"

#include <cmath>

#include "nlsphase/error.hpp"
#include "nlsphase/quadrature.hpp"

namespace nlsphase {

double PotentialTerm::value(double r, double t) const {
    double time = 1.0;
    switch (profile) {
        case Profile::constant:
            break;
        case Profile::cosine:
            time = std::cos(omega * t);
            break;
        case Profile::decay:
            time = std::pow(1.0 + t, -kappa);
            break;
    }
    return amplitude * std::pow(1.0 + r, -q) * time;
}

double PotentialTerm::d_dr(double r, double t) const { return -q * value(r, t) / (1.0 + r); }

void NonlinearitySpec::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(a) || !finite(b) || a < 0.0 || b < 0.0)
        throw ValidationError("nonlinearity: couplings a, b must be finite and nonnegative");
    if (a > 0.0 && !(p > 4.0 / 3.0 && p < 4.0))
        throw ValidationError("nonlinearity: power exponent p must lie in (4/3, 4)");
    if (b > 0.0 && !(m > 4.0 / 3.0 && n < 4.0))
        throw ValidationError("nonlinearity: saturated exponents need m > 4/3 and n < 4");
    if (potential) {
        if (!(potential->q > 1.0)) throw ValidationError("nonlinearity: potential decay q must exceed 1");
        if (!finite(potential->amplitude)) throw ValidationError("nonlinearity: potential amplitude must be finite");
    }
    if (weighted) {
        if (!finite(weighted->w_amp) || !(weighted->exponent > 0.0))
            throw ValidationError("nonlinearity: weighted term needs finite amplitude and positive exponent");
    }
}

bool NonlinearitySpec::is_zero() const {
    return a == 0.0 && b == 0.0 && (!potential || potential->amplitude == 0.0) &&
           (!weighted || weighted->w_amp == 0.0);
}

bool NonlinearitySpec::autonomous() const {
    return !potential || potential->profile == PotentialTerm::Profile::constant;
}

double NonlinearitySpec::factor(double s, double r, double t) const {
    double v = 0.0;
    if (a != 0.0) v += a * std::pow(s, p);
    if (b != 0.0 && s > 0.0) v -= b * std::pow(s, m) / (1.0 + std::pow(s, m - n));
    if (potential) v += potential->value(r, t);
    if (weighted) v += weighted->w_amp * std::pow(1.0 + r, -weighted->w_decay) * std::pow(s, weighted->exponent);
    return v;
}

double NonlinearitySpec::d_ds(double s, double r, double) const {
    if (s <= 0.0) return 0.0;
    double v = 0.0;
    if (a != 0.0) v += a * p * std::pow(s, p - 1.0);
    if (b != 0.0) {
        const double sm = std::pow(s, m), sk = std::pow(s, m - n);
        const double den = 1.0 + sk;
        v -= b * (m * sm / s * den - sm * (m - n) * sk / s) / (den * den);
    }
    if (weighted)
        v += weighted->w_amp * std::pow(1.0 + r, -weighted->w_decay) * weighted->exponent *
             std::pow(s, weighted->exponent - 1.0);
    return v;
}

double NonlinearitySpec::d_dr(double s, double r, double t) const {
    double v = 0.0;
    if (potential) v += potential->d_dr(r, t);
    if (weighted)
        v -= weighted->w_decay * weighted->w_amp * std::pow(1.0 + r, -weighted->w_decay - 1.0) *
             std::pow(s, weighted->exponent);
    return v;
}

double NonlinearitySpec::potential_energy_density(double s, double r, double t) const {
    const double rho = s * s;
    double g = 0.0;
    if (a != 0.0) g += a * std::pow(rho, 0.5 * p + 1.0) / (0.5 * p + 1.0);
    if (b != 0.0 && rho > 0.0) {
        // sigma = rho y^2 removes the endpoint singularity of the integrand.
        g -= b * integrate(
                     [&](double y) {
                         const double sig = rho * y * y;
                         const double amp = std::sqrt(sig);
                         return std::pow(amp, m) / (1.0 + std::pow(amp, m - n)) * 2.0 * rho * y;
                     },
                     0.0, 1.0, 32);
    }
    if (potential) g += potential->value(r, t) * rho;
    if (weighted) {
        const double e = weighted->exponent;
        g += weighted->w_amp * std::pow(1.0 + r, -weighted->w_decay) * std::pow(rho, 0.5 * e + 1.0) / (0.5 * e + 1.0);
    }
    return g;
}

std::vector<double> nonlinearity_factor(const NonlinearitySpec& spec, const RadialField& f, double t) {
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double v = spec.factor(std::abs(f.phi(j)), f.r(j), t);
        if (!std::isfinite(v)) throw NumericalError("nonlinearity: overflow at r = " + std::to_string(f.r(j)));
        out[j] = v;
    }
    return out;
}

RadialField eval_nonlinearity(const NonlinearitySpec& spec, const RadialField& f, double t) {
    f.check();
    const auto fac = nonlinearity_factor(spec, f, t);
    RadialField out(f.grid, f.u, f.time);
    for (std::size_t j = 0; j < f.size(); ++j) out.u[j] *= fac[j];
    return out;
}

}  // namespace nlsphase
