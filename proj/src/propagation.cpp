#include "nlsphase/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nlsphase/error.hpp"
#include "nlsphase/mellin.hpp"
#include "nlsphase/operators.hpp"

namespace nlsphase {

namespace {

RadialField gamma_of(const RadialField& f) { return apply(OperatorTag::gamma(), f); }

RadialField scaled_position(const RadialField& f, const std::function<double(double)>& profile, double scale) {
    return multiply_pointwise(f, position_values(*f.grid, profile, scale));
}

std::vector<double> trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (v[i - 1] + v[i]);
    return out;
}

bool in_open(double x, double lo, double hi) { return x > lo && x < hi; }

constexpr double same_tol = 1e-12;

}  // namespace

double interpolate_series(const std::vector<double>& times, const std::vector<double>& values, double t) {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double den = static_cast<double>(n) * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (static_cast<double>(n) * sxy - sx * sy) / den;
}

TailStats tail_stats(const std::vector<double>& times, const std::vector<double>& values) {
    TailStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    const std::size_t start = n - std::max<std::size_t>(1, n / 4);
    double lo = values[start], hi = values[start], sum = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
        sum += values[i];
    }
    s.estimate = sum / static_cast<double>(n - start);
    s.oscillation = hi - lo;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < start; ++i) {
        x.push_back(times[i]);
        y.push_back(values[i] - s.estimate);
    }
    if (x.size() >= 3) {
        s.decay_rate = loglog_slope(x, y);
        s.decay_fitted = true;
    }
    return s;
}

double abs_momentum_expectation(const RadialField& f) {
    const Grid& g = *f.grid;
    const auto c = g.sine_coefficients(f.u);
    const auto k = g.wavenumbers();
    double s = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) s += k[m] * std::norm(c[m]);
    return 4.0 * std::numbers::pi * 0.5 * g.r_max() * s;
}

GammaLimitResult gamma_limit_estimate(const Trajectory& run, double alpha, const Cutoff& F) {
    if (!in_open(alpha, 1.0 / 3.0, 1.0)) throw ValidationError("gamma limit: alpha must lie in (1/3, 1)");
    if (run.size() == 0 || !(std::pow(run.snapshots.back().time, alpha) > 4.0))
        throw ValidationError("gamma limit: run too short, need t_max^alpha > 4");
    GammaLimitResult res;
    res.series.label = "<F gamma F>";
    const auto profile = [&](double l) { return F(l); };
    for (const auto& f : run.snapshots) {
        if (!(f.time > 0.0)) continue;
        const RadialField g = scaled_position(f, profile, std::pow(f.time, alpha));
        res.series.times.push_back(f.time);
        res.series.values.push_back(inner(gamma_of(g), g).real());
    }
    res.series.running_integral = trapezoid(res.series.times, res.series.values);
    res.tail = tail_stats(res.series.times, res.series.values);
    res.gamma_hat = res.tail.estimate;
    res.nonnegative = res.gamma_hat >= -res.tail.oscillation - 1e-12;
    return res;
}

std::string preset_name(PropagationPreset p) {
    switch (p) {
        case PropagationPreset::PE: return "PE";
        case PropagationPreset::PE2: return "PE-2";
        case PropagationPreset::PE3: return "PE-3";
        case PropagationPreset::PE4V2: return "PE-4V2";
        case PropagationPreset::PE5: return "PE-5";
        case PropagationPreset::PEBoundary: return "PE-boundary";
        case PropagationPreset::Bab: return "Bab";
        case PropagationPreset::PEr2: return "PE-r2";
    }
    return "?";
}

PropagationPreset preset_from_name(const std::string& name) {
    for (auto p : {PropagationPreset::PE, PropagationPreset::PE2, PropagationPreset::PE3, PropagationPreset::PE4V2,
                   PropagationPreset::PE5, PropagationPreset::PEBoundary, PropagationPreset::Bab,
                   PropagationPreset::PEr2})
        if (preset_name(p) == name) return p;
    throw ValidationError("unknown propagation preset " + name);
}

int boundary_scaling_terms(double alpha) {
    int J = 0;
    while (std::pow(0.75, J) >= alpha / 8.0) ++J;
    return J;
}

void validate_preset(PropagationPreset p, const PresetParams& q) {
    const std::string name = preset_name(p);
    auto fail = [&](const std::string& why) { throw ValidationError(name + ": " + why); };
    const bool sum_one = std::abs(q.alpha + q.beta - 1.0) <= same_tol;
    switch (p) {
        case PropagationPreset::PE:
        case PropagationPreset::PE2:
        case PropagationPreset::PE3:
            if (!in_open(q.alpha, 1.0 / 3.0, 1.0)) fail("alpha must lie in (1/3, 1)");
            if (p != PropagationPreset::PE && !(q.delta > 0.0)) fail("delta must be positive");
            break;
        case PropagationPreset::PE4V2: {
            const bool case1 = in_open(q.alpha, 0.5, 1.0) && q.alpha + q.beta < 1.0 - same_tol && q.c0 > 0.0;
            const bool case2 = in_open(q.alpha, 1.0 / 3.0, 1.0) && in_open(q.beta, 0.0, q.alpha) && q.c0 > 0.0;
            const bool case3 = q.alpha > 0.5 && sum_one && q.c0 > 0.5 * q.alpha;
            if (!(case1 || case2 || case3))
                fail("no admissible case: (1) alpha in (1/2,1), alpha+beta<1, c0>0; (2) alpha in (1/3,1), "
                     "beta in (0,alpha), c0>0; (3) alpha>1/2, alpha+beta=1, c0>alpha/2");
            break;
        }
        case PropagationPreset::PE5:
            if (!(q.alpha > 0.5 && q.alpha < 1.0)) fail("alpha must exceed 1/2");
            if (!sum_one) fail("alpha + beta must equal 1");
            if (!in_open(q.c1, 0.0, 0.25 * q.alpha)) fail("c1 must lie in (0, alpha/4)");
            break;
        case PropagationPreset::PEBoundary:
            if (!(q.alpha > 0.5 && q.alpha < 1.0)) fail("alpha must exceed 1/2");
            if (!sum_one) fail("alpha + beta must equal 1");
            break;
        case PropagationPreset::Bab:
            if (!(3.0 * q.a - q.b > 1.0)) fail("error control needs 3a - b > 1");
            if (!(2.0 * q.a - 2.0 * q.b > 1.0)) fail("error control needs 2a - 2b > 1");
            if (q.a + q.b < -same_tol) {
                if (!(q.c > 0.0)) fail("c must be positive");
            } else if (std::abs(q.a + q.b) <= same_tol) {
                if (!(q.c > 0.25)) fail("a + b = 0 needs c > 1/4");
            } else {
                fail("needs a + b < 0, or a + b = 0 with c > 1/4");
            }
            break;
        case PropagationPreset::PEr2:
            if (!(q.alpha > 0.5 && q.alpha < 1.0)) fail("alpha must exceed 1/2");
            if (!(q.beta > 0.0 && q.beta <= 1.0 - q.alpha + same_tol)) fail("beta must lie in (0, 1 - alpha]");
            if (!(q.gamma_cap >= 1.0)) fail("gamma cap must be at least 1");
            break;
    }
}

PropagationResult propagation_integral(const Trajectory& run, PropagationPreset preset, const PresetParams& q,
                                       const GammaQuadrature& quad) {
    validate_preset(preset, q);
    const FlowMap& fm = default_flow();
    const Cutoff F1 = Cutoff::rising(1.0);
    const auto f1 = [&](double l) { return F1(l); };
    const auto w1 = [&](double l) { return sqrt_ffp(F1, l); };
    const auto fgamma = [&](const SpectralFunction& F, const RadialField& f) {
        return apply_function_of_gamma(fm, F, f, quad);
    };
    const bool bab = preset == PropagationPreset::Bab;
    // Position scale: t^alpha, or t^{1/2} (log t)^a for the log-refined family.
    const TimeScale xscale = bab ? TimeScale{0.5, q.a} : TimeScale{q.alpha, 0.0};

    PropagationResult res;
    res.preset = preset_name(preset);
    res.t0 = q.t0;
    if (res.t0 <= 0.0) {
        for (const auto& f : run.snapshots) {
            if (bab && !(f.time > std::exp(1.0))) continue;
            if (f.time > 0.0 && xscale(f.time) >= 4.0) {
                res.t0 = f.time;
                break;
            }
        }
        if (res.t0 <= 0.0) throw ValidationError(res.preset + ": run never reaches the regime t^alpha >= 4");
    }

    const int J0 = boundary_scaling_terms(q.alpha);
    if (preset == PropagationPreset::PEBoundary) res.boundary_terms = J0 + 1;

    for (const auto& f : run.snapshots) {
        const double t = f.time;
        if (t < res.t0 - 1e-12) continue;
        const double s = xscale(t);
        const double ta = s;  // weight 1/t^alpha of the leading term
        std::vector<double> terms;
        double counterpart = 0.0;
        switch (preset) {
            case PropagationPreset::PE: {
                const RadialField wf = scaled_position(f, w1, s);
                const double g2 = norm(gamma_of(wf));
                terms = {g2 * g2 / ta};
                break;
            }
            case PropagationPreset::PE2: {
                const RadialField wf = scaled_position(f, w1, s);
                const RadialField psi = fgamma(SpectralFunction::from_cutoff(Cutoff::rising(q.delta)), wf);
                terms = {inner(gamma_of(psi), wf).real() / ta, inner(psi, wf).real() / t};
                break;
            }
            case PropagationPreset::PE3: {
                const RadialField g = scaled_position(f, f1, s);
                const auto out_fn = SpectralFunction::from_cutoff(Cutoff::rising(q.delta));
                const RadialField in = fgamma(out_fn.reflect(), g);
                const RadialField out = fgamma(out_fn, g);
                terms = {inner(gamma_of(in), g).real() / ta, inner(in, g).real() / ta};
                counterpart = (std::abs(inner(gamma_of(out), g).real()) + inner(out, g).real()) / ta;
                break;
            }
            case PropagationPreset::PE4V2: {
                const double tau = std::pow(t, -q.beta);
                const auto F4 = SpectralFunction::from_cutoff(Cutoff::rising(q.c0));
                const RadialField wf = scaled_position(f, w1, s);
                const RadialField g = scaled_position(f, f1, s);
                const RadialField psi = fgamma(F4.scaled(tau), wf);
                const RadialField chi = fgamma(F4.prime().scaled(tau), g);
                terms = {inner(gamma_of(psi), wf).real() / ta, inner(chi, g).real() / t};
                break;
            }
            case PropagationPreset::PE5: {
                const double tau = std::pow(t, -q.beta);
                const auto F5 = SpectralFunction::from_cutoff(Cutoff::falling(q.c1));
                const auto F51 = SpectralFunction::from_cutoff(Cutoff::rising(q.c1)).reflect();
                const RadialField wf = scaled_position(f, w1, s);
                const RadialField g = scaled_position(f, f1, s);
                const RadialField a = fgamma(F51.scaled(tau), wf);
                const RadialField b = fgamma(F5.scaled(tau), wf);
                const RadialField c = fgamma(F5.lambda_prime().scaled(tau), g);
                terms = {std::abs(inner(gamma_of(a), wf).real()) / ta, inner(b, wf).real() / t,
                         std::abs(inner(c, g).real()) / t};
                break;
            }
            case PropagationPreset::PEBoundary: {
                const double tau = std::pow(t, -q.beta);
                const auto F2 = SpectralFunction::from_cutoff(Cutoff::rising(1.0));
                SpectralFunction F2t = SpectralFunction::constant(0.0);
                for (int j = 0; j <= J0; ++j) F2t = F2t + F2.prime().scaled(std::pow(0.75, j));
                const auto f1t = [&](double l) {
                    double v = 0.0;
                    for (int j = 0; j <= J0; ++j) v += sqrt_ffp(F1, std::pow(4.0 / 3.0, j) * l);
                    return v;
                };
                const RadialField h = scaled_position(f, f1t, s);
                const RadialField g = scaled_position(f, f1, s);
                terms = {inner(fgamma(F2.scaled(tau), h), h).real() / t, inner(fgamma(F2t.scaled(tau), g), g).real() / t};
                break;
            }
            case PropagationPreset::Bab: {
                const double tau = 1.0 / TimeScale{0.5, q.b}(t);
                const auto F2 = SpectralFunction::from_cutoff(Cutoff::rising(q.c));
                const RadialField G = scaled_position(f, w1, s);
                const RadialField g = scaled_position(f, f1, s);
                const RadialField psi = fgamma(F2.scaled(tau), G);
                const RadialField chi = fgamma((F2.lambda_prime() * (1.0 / q.c)).scaled(tau), g);
                terms = {inner(gamma_of(psi), G).real() / s, inner(chi, g).real() / t};
                break;
            }
            case PropagationPreset::PEr2: {
                const Cutoff band = Cutoff::window(std::pow(t, -q.beta), q.gamma_cap);
                const auto Gp = SpectralFunction::from_cutoff(band);
                const RadialField wf = scaled_position(f, w1, s);
                const RadialField gw = gamma_of(wf);
                const RadialField up = gamma_of(fgamma(Gp, wf));
                const RadialField dn = gamma_of(fgamma(Gp.reflect(), wf));
                const double cube = inner(gamma_of(up), gw).real() - inner(gamma_of(dn), gw).real();
                const double sq = inner(up, gw).real() + inner(dn, gw).real();
                terms = {cube / ta, sq / t};
                break;
            }
        }
        res.times.push_back(t);
        if (res.terms.size() < terms.size()) res.terms.resize(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) res.terms[i].push_back(terms[i]);
        res.integrand.push_back(std::accumulate(terms.begin(), terms.end(), 0.0));
        if (preset == PropagationPreset::PE3) res.counterpart.push_back(counterpart);
    }
    if (res.times.size() < 2) throw ValidationError(res.preset + ": fewer than two snapshots after t0");
    res.running_integral = trapezoid(res.times, res.integrand);
    const double T = res.times.back();
    if (T < 4.0 * res.t0)
        throw ValidationError(res.preset + ": dyadic tail windows need t_end >= 4 t0 (t0 = " + fmt_num(res.t0) + ")");
    const auto I = [&](double t) { return interpolate_series(res.times, res.running_integral, t); };
    res.increment_early = I(T / 2) - I(T / 4);
    res.increment_late = I(T) - I(T / 2);
    const double e = std::abs(res.increment_early), l = std::abs(res.increment_late);
    res.tail_ratio = e > 0.0 ? l / e : (l > 0.0 ? INFINITY : 0.0);
    res.converged = res.tail_ratio < 1.0;
    return res;
}

json verdict_json(const PropagationResult& r) {
    return {{"preset", r.preset},
            {"converged", r.converged},
            {"tail_ratio", r.tail_ratio},
            {"fitted_exponent", loglog_slope(r.times, r.integrand)},
            {"t0", r.t0},
            {"integral", r.running_integral.empty() ? 0.0 : r.running_integral.back()}};
}

BoundaryLimitResult boundary_limit_check(const Trajectory& run, double alpha, const Cutoff& F) {
    if (!in_open(alpha, 1.0 / 3.0, 1.0)) throw ValidationError("boundary limit: alpha must lie in (1/3, 1)");
    BoundaryLimitResult res;
    res.series.label = "<F' gamma F'>";
    const auto profile = [&](double l) { return F.derivative(l, 1); };
    for (const auto& f : run.snapshots) {
        if (!(f.time > 0.0)) continue;
        const RadialField g = scaled_position(f, profile, std::pow(f.time, alpha));
        res.series.times.push_back(f.time);
        res.series.values.push_back(inner(gamma_of(g), g).real());
    }
    res.series.running_integral = trapezoid(res.series.times, res.series.values);
    const auto& tt = res.series.times;
    const auto& v = res.series.values;
    const std::size_t n = v.size();
    if (n == 0) return res;
    for (std::size_t i = n - std::max<std::size_t>(1, n / 4); i < n; ++i)
        res.tail_magnitude = std::max(res.tail_magnitude, std::abs(v[i]));
    std::vector<double> x, y;
    for (std::size_t i = n / 2; i < n; ++i) {
        x.push_back(tt[i]);
        y.push_back(res.series.running_integral[i]);
    }
    res.growth_exponent = loglog_slope(x, y);
    for (std::size_t i = 0; i < n; ++i)
        res.fitted_constant =
            std::max(res.fitted_constant, std::abs(res.series.running_integral[i]) / std::pow(tt[i], alpha));
    return res;
}

MorawetzResult exterior_morawetz(const Trajectory& run, double M, double t1, double t2, bool allow_scaled) {
    if (!(M >= 4.0)) throw ValidationError("exterior Morawetz: M must be at least 4");
    if (M < 100.0 && !allow_scaled) throw ValidationError("exterior Morawetz: M >= 100 unless scaling is allowed");
    if (!(t2 > t1)) throw ValidationError("exterior Morawetz: empty window");
    MorawetzResult res;
    res.scaled = M < 100.0;
    const Cutoff F1 = Cutoff::rising(1.0);
    const auto f1 = [&](double l) { return F1(l); };
    const auto w1 = [&](double l) { return sqrt_ffp(F1, l); };
    double b_start = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < run.size(); ++i) {
        const RadialField& f = run.snapshots[i];
        if (f.time < t1 - 1e-9 || f.time > t2 + 1e-9) continue;
        if (i < run.boundary_flags.size() && run.boundary_flags[i])
            throw NumericalError("exterior Morawetz: boundary contamination inside the window");
        const Grid& g = *f.grid;
        const RadialField Ff = scaled_position(f, f1, M);
        const RadialField gF = gamma_of(Ff);
        const double b = inner(gF, Ff).real();
        const double gw = norm(gamma_of(scaled_position(f, w1, M)));
        double bnd = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double l = default_weight().beta(g.r(j)) / M;
            const double d1 = F1.derivative(l, 1), d2 = F1.derivative(l, 2), d3 = F1.derivative(l, 3);
            const double sl = sqrt_ffp_slope(F1, l);
            // (F F')'' - 4 ((F F')^{1/2})'^2
            bnd += (3.0 * d1 * d2 + F1(l) * d3 - 4.0 * sl * sl) * std::norm(f.u[j]);
        }
        bnd *= 4.0 * std::numbers::pi * g.h() / (M * M * M);
        double inter = 0.0;
        if (!run.spec.is_zero()) {
            RadialField Bf = scaled_position(gF, f1, M);
            inter = 2.0 * inner(eval_nonlinearity(run.spec, f, f.time), Bf).imag();
        }
        MorawetzRow row{f.time, 0.0, 4.0 / M * gw * gw, bnd, inter, 0.0};
        if (first) {
            b_start = b;
            first = false;
        } else {
            const MorawetzRow& p = res.rows.back();
            row.rhs = p.rhs + 0.5 * (row.t - p.t) *
                                  (p.main + p.boundary + p.interaction + row.main + row.boundary + row.interaction);
        }
        row.lhs = b - b_start;
        res.rows.push_back(row);
    }
    if (res.rows.size() < 2) throw ValidationError("exterior Morawetz: fewer than two snapshots in the window");
    const auto& last = res.rows.back();
    res.relative_residual = last.lhs != 0.0 ? std::abs(last.lhs - last.rhs) / std::abs(last.lhs)
                                            : std::abs(last.rhs);
    return res;
}

std::vector<DilationRow> dilation_bound_series(const Trajectory& run, double M, double R) {
    if (R <= 0.0) R = std::sqrt(M);
    const TanhProjection P{M, R, TanhProjection::Sign::outgoing};
    P.validate();
    std::vector<DilationRow> rows;
    for (const auto& f : run.snapshots) {
        const Grid& g = *f.grid;
        const LogGrid log = LogGrid::defaults(g);
        const auto ap = SpectralMultiplierA::from_function(log, [&](double l) { return cplx(l * P(l)); });
        const auto pp = tanh_projection_multiplier(P, log);
        const double a = inner(func_of_dilation(ap, f), f).real();
        // p acts on radial fields as x/r d/dr, and the dilation group acts on x/r h(r) as on h.
        RadialField d(f.grid, g.derivative(f.u), f.time);
        for (std::size_t j = 0; j < d.size(); ++j) d.u[j] -= f.u[j] / g.r(j);
        d.u.back() = 0.0;
        const double p = inner(func_of_dilation(pp, d), d).real();
        rows.push_back({f.time, a, p});
    }
    return rows;
}

double dilation_sweep_slope(const Trajectory& run, const std::vector<double>& Ms) {
    std::vector<double> x, y;
    for (double M : Ms) {
        const auto rows = dilation_bound_series(run, M);
        x.push_back(M);
        y.push_back(rows.back().a_projected - rows.front().a_projected);
    }
    return loglog_slope(x, y);
}

SmoothingValue local_smoothing_functional(const Trajectory& run, const VectorFieldKind& kind, double t_lo,
                                          double t_hi) {
    if (!(t_hi > t_lo)) throw ValidationError("local smoothing: empty window");
    std::vector<double> t, v;
    for (const auto& f : run.snapshots) {
        if (f.time < t_lo - 1e-9 || f.time > t_hi + 1e-9) continue;
        const Grid& g = *f.grid;
        std::vector<cplx> d = f.u;
        g.apply_multiplier(d, [](double k) { return std::pow(k, 1.5); });
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < d.size(); ++j) s += std::norm(d[j]) * morawetz_field(kind, g.r(j)).density;
        t.push_back(f.time);
        v.push_back(4.0 * std::numbers::pi * g.h() * s);
    }
    if (t.size() < 2) throw ValidationError("local smoothing: fewer than two snapshots in the window");
    return {trapezoid(t, v).back(), t.back() - t.front()};
}

double dilation_expectation(const RadialField& f) { return inner(apply(OperatorTag::dilation(), f), f).real(); }

std::vector<VirialRow> virial_series(const Trajectory& run) {
    if (!run.spec.autonomous())
        throw ValidationError("virial: explicit time dependence is unsupported");
    if (run.size() < 3) throw ValidationError("virial: need at least 3 snapshots");
    std::vector<double> a(run.size());
    for (std::size_t i = 0; i < run.size(); ++i) a[i] = dilation_expectation(run.snapshots[i]);
    std::vector<VirialRow> rows;
    for (std::size_t i = 1; i + 1 < run.size(); ++i) {
        const RadialField& f = run.snapshots[i];
        const Grid& g = *f.grid;
        const double lhs = (a[i + 1] - a[i - 1]) / (run.snapshots[i + 1].time - run.snapshots[i - 1].time);
        const double kin = 2.0 * kinetic_energy(f);
        double pot = 0.0;
        if (!run.spec.is_zero()) {
            const auto du = g.derivative(f.u);
            for (std::size_t j = 0; j + 1 < f.size(); ++j) {
                const double r = g.r(j);
                const cplx phi = f.u[j] / r;
                const cplx phi_r = (du[j] - f.u[j] / r) / r;
                const double s = std::abs(phi);
                const double s_r = s > 0.0 ? (std::conj(phi) * phi_r).real() / s : 0.0;
                const double v_r = run.spec.d_ds(s, r, f.time) * s_r + run.spec.d_dr(s, r, f.time);
                pot += r * v_r * std::norm(f.u[j]);
            }
            pot *= 4.0 * std::numbers::pi * g.h();
        }
        rows.push_back({f.time, lhs, kin, pot, std::abs(lhs - (kin - pot))});
    }
    return rows;
}

}  // namespace nlsphase
