#pragma once

#include <functional>
#include <vector>

#include "nlsphase/grid.hpp"

namespace nlsphase {

// Periodic logarithmic grid t_j = ln r_min + j dt, j < n_log, dt = ln(r_max/r_min)/n_log.
struct LogGrid {
    double r_min = 0.2;
    double r_max = 200.0;
    std::size_t n_log = 8192;

    void validate() const;
    double dt() const;
    double t(std::size_t j) const;
    // Dilation eigenvalue carried by FFT bin m (signed frequency).
    double lambda(std::size_t m) const;
    static LogGrid defaults(const Grid& g);
};

struct SpectralMultiplierA {
    LogGrid log;
    std::vector<cplx> samples;  // FFT bin order

    static SpectralMultiplierA from_function(const LogGrid& log, const std::function<cplx(double)>& m);
};

struct TanhProjection {
    enum class Sign { outgoing, incoming };
    double M = 100.0;
    double R = 10.0;
    Sign sign = Sign::outgoing;

    void validate() const;
    double operator()(double lambda) const;
};

SpectralMultiplierA tanh_projection_multiplier(const TanhProjection& p, const LogGrid& log);

// (U phi)(t) = e^{3t/2} phi(e^t) on the log grid.
std::vector<cplx> to_log_grid(const RadialField& f, const LogGrid& log);
// Inverse map back to the radial grid; zero outside the log window.
RadialField from_log_grid(std::span<const cplx> w, const LogGrid& log, const GridPtr& grid, double time);
// (4 pi int |U phi|^2 dt)^{1/2}, the L2 norm of phi on the window.
double log_grid_norm(std::span<const cplx> w, const LogGrid& log);
// Fraction of the mass of f on [r_min, r_max] of the log grid.
double log_window_mass_fraction(const RadialField& f, const LogGrid& log);

RadialField func_of_dilation(const SpectralMultiplierA& m, const RadialField& f,
                             double mass_tolerance = 1e-6);

struct LeakageResult {
    double leakage;
    double band_mass_f;  // fraction of the mass kept by the band filter
    double band_mass_g;
};

// ||P+_{M,R}(A)(f g)|| / ||f g|| after filtering f and g to |lambda| <= N.
LeakageResult highlow_leakage(double N, double M, double R, const RadialField& f, const RadialField& g,
                              const LogGrid& log);

// Max over bins of |DFT(U(f g)) - (shifted transform of f) * (transform of g)| relative to
// the largest bin; the shift is lambda -> lambda - 3i/2.
double mellin_convolution_residual(const RadialField& f, const RadialField& g, const LogGrid& log);

}  // namespace nlsphase
