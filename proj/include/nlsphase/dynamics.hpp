#pragma once

#include <utility>
#include <vector>

#include "nlsphase/grid.hpp"
#include "nlsphase/nonlinearity.hpp"

namespace nlsphase {

// Strang split-step propagator for i phi_t = -Delta phi + N phi: half kick,
// exact spectral drift e^{-i k^2 dt}, half kick. Explicit time dependence of
// N is sampled at the midpoint of the step.
class Stepper {
public:
    Stepper(GridPtr grid, NonlinearitySpec spec, double dt);

    void step(RadialField& f) const;
    double dt() const { return dt_; }
    const NonlinearitySpec& spec() const { return spec_; }

private:
    GridPtr grid_;
    NonlinearitySpec spec_;
    double dt_;
    std::vector<cplx> drift_;

    void kick(RadialField& f, double t_mid) const;
};

RadialField step(const RadialField& state, const NonlinearitySpec& spec, double dt);
// e^{i Delta t} f
RadialField free_evolve(const RadialField& f, double t);

struct RunOptions {
    double dt = 0.005;
    double t_end = 10.0;
    std::size_t stride = 20;  // steps between snapshots
    double boundary_threshold = 1e-6;
    double h1_cap = 1e6;
};

struct Trajectory {
    GridPtr grid;
    NonlinearitySpec spec;
    double dt = 0.0;
    std::vector<RadialField> snapshots;
    std::vector<bool> boundary_flags;
    double max_mass_drift = 0.0;  // relative, over the whole run
    double max_step_mass_drift = 0.0;
    double valid_until = 0.0;  // last snapshot time before boundary contamination

    std::vector<double> times() const;
    std::size_t size() const { return snapshots.size(); }
};

Trajectory evolve(const RadialField& f0, const NonlinearitySpec& spec, const RunOptions& opt);
// Exact free trajectory sampled at the given times.
Trajectory free_trajectory(const RadialField& f0, const std::vector<double>& times);

// int |grad phi|^2 + G(|phi|^2), dG/d rho = N.
double energy(const RadialField& f, const NonlinearitySpec& spec, double t);
double kinetic_energy(const RadialField& f);

// ||(x - 2 t p) psi||, constant along free evolution.
double pseudo_conformal(const RadialField& psi, double t);

struct VelocityRow {
    double t;
    double interior_mass;  // fraction in r <= v1 t
    double exterior_mass;  // fraction in r >= v2 t
};
// f0 is band-filtered to |k| in [v_lo, v_hi] first.
std::vector<VelocityRow> velocity_bound_scan(const RadialField& f0, std::pair<double, double> band, double v1,
                                             double v2, const std::vector<double>& times);
RadialField band_filter(const RadialField& f, double k_lo, double k_hi);

// (sum_t dt ||phi(t)||_{L^6}^2)^{1/2} over the snapshots.
double strichartz_l2l6(const Trajectory& run);
double l6_norm(const RadialField& f);
// sup_{r >= 1} r |phi(r)| / ||phi||_{H^1}
double radial_sobolev_ratio(const RadialField& f);

}  // namespace nlsphase
