#pragma once

#include <optional>

#include "nlsphase/grid.hpp"

namespace nlsphase {

struct PotentialTerm {
    enum class Profile { constant, cosine, decay };
    double amplitude = 1.0;
    double q = 3.0;  // spatial decay (1+r)^{-q}
    Profile profile = Profile::constant;
    double omega = 1.0;  // cosine: cos(omega t)
    double kappa = 1.0;  // decay: (1+t)^{-kappa}

    double value(double r, double t) const;
    double d_dr(double r, double t) const;
};

// W(r) |phi|^e with W = w_amp (1+r)^{-w_decay}.
struct WeightedTerm {
    double w_amp = 1.0;
    double w_decay = 2.0;
    double exponent = 2.0;
};

// N(|phi|, r, t) = a s^p - b s^m / (1 + s^{m-n}) + V(r,t) + W(r) s^e, s = |phi|.
struct NonlinearitySpec {
    double a = 0.0, p = 2.0;
    double b = 0.0, m = 3.0, n = 1.0;
    std::optional<PotentialTerm> potential;
    std::optional<WeightedTerm> weighted;

    void validate() const;
    bool is_zero() const;
    bool autonomous() const;

    // Real local factor at amplitude s.
    double factor(double s, double r, double t) const;
    double d_ds(double s, double r, double t) const;
    // Explicit r-dependence at fixed amplitude.
    double d_dr(double s, double r, double t) const;
    // int_0^{s^2} factor(sqrt(sigma)) d sigma
    double potential_energy_density(double s, double r, double t) const;
};

RadialField eval_nonlinearity(const NonlinearitySpec& spec, const RadialField& f, double t);
// Pointwise factor N(|phi(r_j)|, r_j, t).
std::vector<double> nonlinearity_factor(const NonlinearitySpec& spec, const RadialField& f, double t);

}  // namespace nlsphase
