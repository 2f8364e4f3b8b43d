#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlsphase/flow.hpp"
#include "nlsphase/grid.hpp"
#include "nlsphase/mellin.hpp"
#include "nlsphase/spectral_function.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

// Time scale t^p (log t)^q used by the position and gamma factors.
struct TimeScale {
    double power = 0.0;
    double log_power = 0.0;

    double operator()(double t) const;
};

// One factor of a composed observable. Factors act right to left.
struct Factor {
    enum class Kind { Position, GammaFunction, DilationFunction, Tanh, Weight, Gamma, Dilation, Momentum };
    Kind kind = Kind::Weight;
    // Position: profile(<x> / scale(t)).
    // DilationFunction: profile(lambda / scale(t)).
    std::function<double(double)> profile;
    // GammaFunction: spectral(gamma * scale(t)).
    SpectralFunction spectral;
    TimeScale scale;
    TanhProjection tanh;
    std::function<double(double r, double t)> weight;
    std::function<double(double k)> multiplier;

    static Factor position(const Cutoff& c, double alpha, double log_power = 0.0);
    // sqrt(F F') evaluated pointwise from the tabulated cutoff.
    static Factor position_sqrt_ffp(const Cutoff& c, double alpha, double log_power = 0.0);
    static Factor position_prime(const Cutoff& c, double alpha, double log_power = 0.0);
    static Factor position_profile(std::function<double(double)> p, double alpha, double log_power = 0.0);
    static Factor gamma_function(SpectralFunction f, double beta = 0.0, double log_power = 0.0);
    // c(A t^{-eps})
    static Factor dilation_cutoff(const Cutoff& c, double eps);
    static Factor tanh_projection(const TanhProjection& p);
    static Factor multiply(std::function<double(double r, double t)> w);
    static Factor gamma();
    static Factor dilation();
    static Factor momentum(std::function<double(double k)> m);
};

struct ObservableSpec {
    std::string label;
    std::vector<Factor> factors;  // X = factors[0] factors[1] ... factors[n-1]
};

struct ObservableContext {
    const FlowMap* flow = nullptr;  // default flow when null
    GammaQuadrature quadrature;
};

RadialField apply_factor(const Factor& fac, const RadialField& f, double t, const ObservableContext& ctx = {});
RadialField apply_observable(const ObservableSpec& obs, const RadialField& f, double t,
                             const ObservableContext& ctx = {});
// (X f, f) before symmetrization.
cplx raw_expectation(const ObservableSpec& obs, const RadialField& f, double t, const ObservableContext& ctx = {});
// (1/2 (X + X*) f, f) = Re (X f, f).
double expectation(const ObservableSpec& obs, const RadialField& f, double t, const ObservableContext& ctx = {});

// Pointwise helpers on the grid.
std::vector<double> position_values(const Grid& g, const std::function<double(double)>& profile, double scale);
RadialField multiply_pointwise(const RadialField& f, std::span<const double> w);

// sqrt(F(l) F'(l)), zero where the product vanishes or is negative.
double sqrt_ffp(const Cutoff& c, double lambda);
// d/dl sqrt(F F').
double sqrt_ffp_slope(const Cutoff& c, double lambda);

// 1/2 (a(r) x/r . p + p . x/r a(r)) on radial fields; in reduced form -i(a u' + a_r u / 2).
std::vector<cplx> apply_radial_field(const Grid& g, std::span<const cplx> u, const std::function<double(double)>& a,
                                     const std::function<double(double)>& a_r);

struct ObservableSeries {
    std::string label;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> running_integral;  // trapezoid of weight(t) value(t)
};

ObservableSeries expectation_series(const ObservableSpec& obs, const std::vector<RadialField>& snapshots,
                                    const std::function<double(double)>& time_weight = nullptr,
                                    const ObservableContext& ctx = {});

void write_series_csv(const std::string& path, const ObservableSeries& s, const std::string& value_unit);

}  // namespace nlsphase
