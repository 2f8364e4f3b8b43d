#pragma once

#include <string>
#include <vector>

#include "nlsphase/dynamics.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/observables.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

// Tail statistics over the last quartile of a series.
struct TailStats {
    double estimate = 0.0;     // mean of the tail
    double oscillation = 0.0;  // max - min over the tail
    double decay_rate = 0.0;   // log-log slope of |value - estimate| before the tail
    bool decay_fitted = false;
};

TailStats tail_stats(const std::vector<double>& times, const std::vector<double>& values);

struct GammaLimitResult {
    ObservableSeries series;  // <F gamma F>_t
    TailStats tail;
    double gamma_hat = 0.0;
    bool nonnegative = false;  // gamma_hat >= -oscillation
};

// <F(<x>/t^alpha) gamma F(<x>/t^alpha)> along the run.
GammaLimitResult gamma_limit_estimate(const Trajectory& run, double alpha, const Cutoff& F = Cutoff::rising(1.0));

// (f, |p| f) from the sine spectrum of the reduced field.
double abs_momentum_expectation(const RadialField& f);

enum class PropagationPreset { PE, PE2, PE3, PE4V2, PE5, PEBoundary, Bab, PEr2 };

std::string preset_name(PropagationPreset p);
PropagationPreset preset_from_name(const std::string& name);

struct PresetParams {
    double alpha = 0.6;
    double beta = 0.4;
    double delta = 0.5;    // PE-2, PE-3
    double c0 = 0.5;       // PE-4V2
    double c1 = 0.1;       // PE-5
    double a = 0.5;        // Bab: <x> / (t^1/2 (log t)^a)
    double b = -0.5;       // Bab: gamma t^1/2 (log t)^b
    double c = 0.5;        // Bab threshold
    double gamma_cap = 8.0;  // PE-r2: |gamma| < gamma_cap
    double t0 = 0.0;       // start of integration; 0 selects the first time with t^alpha >= 4
};

// Throws ValidationError naming the preset case that is violated.
void validate_preset(PropagationPreset p, const PresetParams& q);

struct PropagationResult {
    std::string preset;
    std::vector<double> times;
    std::vector<std::vector<double>> terms;  // per-term integrands, already time weighted
    std::vector<double> integrand;           // sum of terms
    std::vector<double> running_integral;
    std::vector<double> counterpart;  // PE-3: the outgoing analogue of the integrand
    double t0 = 0.0;
    double increment_early = 0.0;  // integral over [T/4, T/2]
    double increment_late = 0.0;   // integral over [T/2, T]
    double tail_ratio = 0.0;
    bool converged = false;
    int boundary_terms = 0;  // PE-boundary: J0 + 1 scaled copies
};

PropagationResult propagation_integral(const Trajectory& run, PropagationPreset preset, const PresetParams& q,
                                       const GammaQuadrature& quad = {});

json verdict_json(const PropagationResult& r);

// Smallest J with (3/4)^J < alpha / 8.
int boundary_scaling_terms(double alpha);

struct BoundaryLimitResult {
    ObservableSeries series;  // <F' gamma F'>_t and its running integral from t0
    double tail_magnitude = 0.0;
    double growth_exponent = 0.0;  // log-log slope of |integral| over the second half
    double fitted_constant = 0.0;  // max |integral(T)| / T^alpha
};

BoundaryLimitResult boundary_limit_check(const Trajectory& run, double alpha, const Cutoff& F = Cutoff::rising(1.0));

struct MorawetzRow {
    double t;
    double lhs;          // <F gamma F>_t - <F gamma F>_{t1}
    double main;         // (4/M) <sqrt(FF') gamma^2 sqrt(FF')>
    double boundary;     // M^{-3} symmetrization term
    double interaction;  // 2 Im (N phi, B phi)
    double rhs;          // time integral of main + boundary + interaction from t1
};

struct MorawetzResult {
    std::vector<MorawetzRow> rows;
    double relative_residual = 0.0;  // |lhs - rhs| / |lhs| at the window end
    bool scaled = false;             // M below the large-M regime
};

MorawetzResult exterior_morawetz(const Trajectory& run, double M, double t1, double t2, bool allow_scaled = false);

struct DilationRow {
    double t;
    double a_projected;  // <1/2 (A P+ + P+ A)>
    double p_projected;  // <p P+ p>
};

std::vector<DilationRow> dilation_bound_series(const Trajectory& run, double M, double R = 0.0);
// log-log slope of |<A P+>_T - <A P+>_0| over the M values.
double dilation_sweep_slope(const Trajectory& run, const std::vector<double>& Ms);

struct SmoothingValue {
    double value;
    double window;
};

// int int | |D|^{3/2} phi |^2 density(r) dx dt over snapshots in [t_lo, t_hi].
SmoothingValue local_smoothing_functional(const Trajectory& run, const VectorFieldKind& kind, double t_lo,
                                          double t_hi);

struct VirialRow {
    double t;
    double lhs;        // centered difference of <A>
    double kinetic2;   // 2 ||grad phi||^2
    double potential;  // int r d_r N |phi|^2
    double residual;   // |lhs - (kinetic2 - potential)|
};

std::vector<VirialRow> virial_series(const Trajectory& run);
double dilation_expectation(const RadialField& f);

// Linear interpolation of a running integral at time t.
double interpolate_series(const std::vector<double>& times, const std::vector<double>& values, double t);
// Least-squares slope of log|y| against log x, skipping nonpositive entries.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlsphase
