#include "nlsphase/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/operators.hpp"
#include "nlsphase/simd/kernels.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

Stepper::Stepper(GridPtr grid, NonlinearitySpec spec, double dt)
    : grid_(std::move(grid)), spec_(std::move(spec)), dt_(dt) {
    if (!(dt > 0.0)) throw ValidationError("stepper: dt must be positive");
    spec_.validate();
    const auto k = grid_->wavenumbers();
    drift_.resize(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) drift_[m] = std::polar(1.0, -k[m] * k[m] * dt_);
}

void Stepper::kick(RadialField& f, double t_mid) const {
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double v = spec_.factor(std::abs(f.phi(j)), f.r(j), t_mid);
        if (!std::isfinite(v)) throw NumericalError("step: non-finite interaction at r = " + std::to_string(f.r(j)));
        f.u[j] *= std::polar(1.0, -0.5 * dt_ * v);
    }
}

void Stepper::step(RadialField& f) const {
    const double t_mid = f.time + 0.5 * dt_;
    const bool linear_free = spec_.is_zero();
    if (!linear_free) kick(f, t_mid);
    grid_->apply_multiplier(f.u, drift_);
    if (!linear_free) kick(f, t_mid);
    f.time += dt_;
    for (const auto& v : f.u)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("step: NaN detected at t = " + std::to_string(f.time));
}

RadialField step(const RadialField& state, const NonlinearitySpec& spec, double dt) {
    state.check();
    Stepper s(state.grid, spec, dt);
    RadialField out = state;
    s.step(out);
    return out;
}

RadialField free_evolve(const RadialField& f, double t) {
    f.check();
    RadialField out = f;
    if (t == 0.0) return out;
    const auto k = f.grid->wavenumbers();
    std::vector<cplx> mult(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) mult[m] = std::polar(1.0, -k[m] * k[m] * t);
    f.grid->apply_multiplier(out.u, mult);
    out.time = f.time + t;
    return out;
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.time);
    return t;
}

Trajectory evolve(const RadialField& f0, const NonlinearitySpec& spec, const RunOptions& opt) {
    f0.check();
    if (!(opt.t_end > 0.0)) throw ValidationError("run: t_end must be positive");
    if (opt.stride == 0) throw ValidationError("run: snapshot stride must be positive");
    Stepper stepper(f0.grid, spec, opt.dt);
    Trajectory run;
    run.grid = f0.grid;
    run.spec = spec;
    run.dt = opt.dt;
    RadialField f = f0;
    const double m0 = norm(f) * norm(f);
    auto record = [&](const RadialField& s) {
        run.snapshots.push_back(s);
        const bool flag = edge_mass_fraction(s, 0.05) > opt.boundary_threshold;
        run.boundary_flags.push_back(flag);
        if (!flag && (run.boundary_flags.size() == 1 || !run.boundary_flags[run.boundary_flags.size() - 2]))
            run.valid_until = s.time;
    };
    record(f);
    const std::size_t steps = static_cast<std::size_t>(std::llround(opt.t_end / opt.dt));
    double prev_mass = m0;
    for (std::size_t i = 1; i <= steps; ++i) {
        stepper.step(f);
        f.time = f0.time + static_cast<double>(i) * opt.dt;
        if (i % opt.stride == 0 || i == steps) {
            const double mass = norm(f) * norm(f);
            if (m0 > 0.0) {
                run.max_mass_drift = std::max(run.max_mass_drift, std::abs(mass - m0) / m0);
                const double per = std::abs(mass - prev_mass) / m0 /
                                   static_cast<double>(i % opt.stride == 0 ? opt.stride : i % opt.stride);
                run.max_step_mass_drift = std::max(run.max_step_mass_drift, per);
            }
            prev_mass = mass;
            if (norm(f, NormKind::h1()) > opt.h1_cap)
                throw NumericalError("run: H1 norm exceeded the configured cap at t = " + std::to_string(f.time));
            record(f);
        }
    }
    return run;
}

Trajectory free_trajectory(const RadialField& f0, const std::vector<double>& times) {
    Trajectory run;
    run.grid = f0.grid;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) throw ValidationError("trajectory: times must increase");
        RadialField s = free_evolve(f0, times[i] - f0.time);
        s.time = times[i];
        const bool flag = edge_mass_fraction(s, 0.05) > 1e-6;
        run.boundary_flags.push_back(flag);
        if (!flag && (i == 0 || !run.boundary_flags[i - 1])) run.valid_until = times[i];
        run.snapshots.push_back(std::move(s));
    }
    if (!times.empty()) run.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    return run;
}

double kinetic_energy(const RadialField& f) {
    const double n = norm(f, NormKind::hdot1());
    return n * n;
}

double energy(const RadialField& f, const NonlinearitySpec& spec, double t) {
    double pot = 0.0;
    const double h = f.grid->h();
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = f.r(j);
        pot += spec.potential_energy_density(std::abs(f.phi(j)), r, t) * r * r;
    }
    return kinetic_energy(f) + four_pi * h * pot;
}

double pseudo_conformal(const RadialField& psi, double t) {
    const auto du = psi.grid->derivative(psi.u);
    RadialField w = RadialField::zeros(psi.grid, psi.time);
    const cplx two_it{0.0, 2.0 * t};
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double r = psi.r(j);
        w.u[j] = r * psi.u[j] + two_it * (du[j] - psi.u[j] / r);
    }
    return norm(w);
}

RadialField band_filter(const RadialField& f, double k_lo, double k_hi) {
    if (!(k_hi > k_lo && k_lo >= 0.0)) throw ValidationError("band filter: need 0 <= k_lo < k_hi");
    RadialField out = f;
    // Supported in [k_lo, k_hi]; each edge is a degree-7 smoothstep spanning half the band.
    const double w = 0.5 * (k_hi - k_lo);
    const auto step = smoothstep(7);
    auto edge = [&](double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : step(x)); };
    f.grid->apply_multiplier(out.u, [&](double k) { return edge((k - k_lo) / w) * edge((k_hi - k) / w); });
    return out;
}

std::vector<VelocityRow> velocity_bound_scan(const RadialField& f0, std::pair<double, double> band, double v1,
                                             double v2, const std::vector<double>& times) {
    const RadialField g = band_filter(f0, band.first, band.second);
    const double total = norm(g) * norm(g);
    std::vector<VelocityRow> rows;
    for (double t : times) {
        const RadialField s = free_evolve(g, t);
        if (v2 * t > s.grid->r_max()) throw ValidationError("velocity scan: exterior cone exits the grid");
        const double inner_mass = shell_mass(s, 0.0, v1 * t);
        const double outer_mass = shell_mass(s, v2 * t, s.grid->r_max());
        rows.push_back({t, total > 0 ? inner_mass / total : 0.0, total > 0 ? outer_mass / total : 0.0});
    }
    return rows;
}

double l6_norm(const RadialField& f) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double a = std::abs(f.phi(j));
        const double r = f.r(j);
        s += std::pow(a, 6) * r * r;
    }
    return std::pow(four_pi * f.grid->h() * s, 1.0 / 6.0);
}

double strichartz_l2l6(const Trajectory& run) {
    double s = 0.0;
    for (std::size_t i = 1; i < run.size(); ++i) {
        const double dt = run.snapshots[i].time - run.snapshots[i - 1].time;
        const double a = l6_norm(run.snapshots[i - 1]), b = l6_norm(run.snapshots[i]);
        s += 0.5 * dt * (a * a + b * b);
    }
    return std::sqrt(s);
}

double radial_sobolev_ratio(const RadialField& f) {
    const double h1 = norm(f, NormKind::h1());
    if (h1 == 0.0) return 0.0;
    double sup = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (f.r(j) >= 1.0) sup = std::max(sup, std::abs(f.u[j]));
    return sup / h1;
}

}  // namespace nlsphase
