#include "nlsphase/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/fft.hpp"
#include "nlsphase/flow.hpp"
#include "nlsphase/interp.hpp"
#include "nlsphase/mellin.hpp"
#include "nlsphase/observables.hpp"
#include "nlsphase/operators.hpp"
#include "nlsphase/propagation.hpp"

namespace nlsphase {

namespace {

const RadialField& snapshot_at(const Trajectory& run, double t) {
    for (const auto& f : run.snapshots)
        if (std::abs(f.time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return f;
    throw ValidationError("no snapshot at t = " + fmt_num(t));
}

double mean_bracket_x(const RadialField& f) {
    const Grid& g = *f.grid;
    const SmoothWeight& w = default_weight();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double m = std::norm(f.u[j]);
        num += w.beta(g.r(j)) * m;
        den += m;
    }
    return den > 0.0 ? num / den : 0.0;
}

// (B f, f) for B = b(|op|) acting through the chosen operator.
double band_form(const RadialField& f, MicrolocalOperator op, const std::vector<Cutoff>& rising_edges,
                 std::size_t j) {
    // Band j: R(e_j) - R(e_{j-1}) with R(e) = F(|lambda| >= e); R(e_{-1}) = 0 and R(e_J) = 1.
    const std::size_t J = rising_edges.size();
    if (op == MicrolocalOperator::gamma) {
        const auto abs_rising = [](const Cutoff& c) {
            const auto s = SpectralFunction::from_cutoff(c);
            return s + s.reflect();
        };
        SpectralFunction b = j < J ? abs_rising(rising_edges[j]) : SpectralFunction::constant(1.0);
        if (j > 0) b = b - abs_rising(rising_edges[j - 1]);
        return inner(apply_function_of_gamma(default_flow(), b, f), f).real();
    }
    // Parseval on a zero-padded log grid: the period must resolve the narrowest
    // transition (width e_min / 2) with at least 8 bins.
    const LogGrid log = LogGrid::defaults(*f.grid);
    if (1.0 - log_window_mass_fraction(f, log) > 1e-6)
        throw ValidationError("microlocal map: field mass outside the log window exceeds tolerance");
    const double e_min = rising_edges.back().a();
    const double period = std::max(static_cast<double>(log.n_log) * log.dt(), 32.0 * std::numbers::pi / e_min);
    std::size_t n = log.n_log;
    while (static_cast<double>(n) * log.dt() < period) n *= 2;
    auto w = to_log_grid(f, log);
    w.resize(n, cplx{});
    std::vector<cplx> W(n);
    fft_forward(w, W);
    const auto R = [&](std::size_t k, double l) { return rising_edges[k](std::abs(l)); };
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const long kk = k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
        const double l = 2.0 * std::numbers::pi * static_cast<double>(kk) / (static_cast<double>(n) * log.dt());
        const double hi = j < J ? R(j, l) : 1.0;
        const double lo = j > 0 ? R(j - 1, l) : 0.0;
        acc += (hi - lo) * std::norm(W[k]);
    }
    return 4.0 * std::numbers::pi * log.dt() * acc / static_cast<double>(n);
}

}  // namespace

double h1_surrogate_norm(const RadialField& f) {
    RadialField g = f;
    f.grid->apply_multiplier(g.u, [](double k) { return k * k / std::sqrt(1.0 + k * k); });
    return norm(g);
}

ChannelResult extract_free_channel(const Trajectory& run, double alpha0, const Cutoff& F,
                                   const std::vector<double>& sample_times, double tolerance) {
    if (!(alpha0 > 0.5 && alpha0 < 1.0)) throw ValidationError("free channel: alpha0 must lie in (1/2, 1)");
    if (sample_times.empty()) throw ValidationError("free channel: no sample times");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw ValidationError("free channel: sample times must increase");
    if (run.size() == 0) throw ValidationError("free channel: empty run");
    ChannelResult res;
    res.alpha0 = alpha0;
    res.F = F;
    res.times = sample_times;
    const auto profile = [&](double l) { return F(l); };
    for (double t : sample_times) {
        if (!(t > 0.0)) throw ValidationError("free channel: sample times must be positive");
        const RadialField& f = snapshot_at(run, t);
        RadialField cut = multiply_pointwise(f, position_values(*f.grid, profile, std::pow(t, alpha0)));
        RadialField w = free_evolve(cut, -t);
        w.time = 0.0;
        res.omegas.push_back(std::move(w));
    }
    const std::size_t n = res.omegas.size();
    res.cauchy_l2.assign(n, std::vector<double>(n, 0.0));
    res.cauchy_h1.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const RadialField d = res.omegas[i] - res.omegas[j];
            res.cauchy_l2[i][j] = res.cauchy_l2[j][i] = norm(d);
            res.cauchy_h1[i][j] = res.cauchy_h1[j][i] = h1_surrogate_norm(d);
        }
    res.omega = res.omegas.back();
    res.late_gap = n >= 2 ? res.cauchy_l2[n - 2][n - 1] : 0.0;
    res.tolerance = tolerance > 0.0 ? tolerance : 0.1 * norm(run.snapshots.front());
    res.accepted = n >= 2 && res.late_gap <= res.tolerance;
    return res;
}

DecompositionReport decompose(const Trajectory& run, const ChannelResult& channel, double alpha,
                              const RadialField& probe) {
    DecompositionReport rep;
    const double m0 = std::pow(norm(run.snapshots.front()), 2);
    const double mo = std::pow(norm(channel.omega), 2);
    std::vector<double> t_ext, ext, t_orth, orth;
    for (const auto& f : run.snapshots) {
        const double t = f.time;
        const RadialField free_part = free_evolve(channel.omega, t);
        RadialField wb = f - free_part;
        wb.time = t;
        const RadialField check = f - free_part - wb;
        DecompositionRow row{};
        row.t = t;
        row.norm_wb = norm(wb);
        row.exterior_mass = t > 0.0 ? shell_mass(wb, std::pow(t, alpha), f.grid->r_max()) : 0.0;
        row.mean_bracket_x = mean_bracket_x(wb);
        row.orthogonality = std::abs(inner(wb, free_evolve(probe, t)));
        row.mass_bookkeeping = row.norm_wb * row.norm_wb + mo - m0;
        row.identity_residual = norm(check);
        if (t > 0.0) {
            t_ext.push_back(t);
            ext.push_back(row.exterior_mass);
            t_orth.push_back(t);
            orth.push_back(row.orthogonality);
        }
        rep.rows.push_back(row);
        rep.weakly_bounded.push_back(std::move(wb));
    }
    const auto half = [](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<long>(v.size() / 2), v.end());
    };
    rep.exterior_exponent = loglog_slope(half(t_ext), half(ext));
    rep.orthogonality_exponent = loglog_slope(half(t_orth), half(orth));
    rep.below_floor = rep.rows.empty() || std::pow(rep.rows.back().norm_wb, 2) < 1e-3;
    return rep;
}

WlsDiagnostics wls_diagnostics(const std::vector<RadialField>& series) {
    std::vector<double> t, x;
    for (const auto& f : series)
        if (f.time > 0.0) {
            t.push_back(f.time);
            x.push_back(mean_bracket_x(f));
        }
    if (t.size() < 3 || t.back() < 4.0 * t.front())
        throw ValidationError("wls diagnostics: series must span T >= 4 t0");
    WlsDiagnostics d;
    double mass = 0.0;
    for (const auto& f : series) mass = std::max(mass, std::pow(norm(f), 2));
    // Ordinary least squares in log-log with the slope's standard error.
    const std::size_t n = t.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += std::log(t[i]);
        sy += std::log(x[i]);
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(t[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(x[i]) - my);
    }
    d.exponent = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::log(x[i]) - my - d.exponent * (std::log(t[i]) - mx);
        ss += e * e;
    }
    d.stderr_exponent = n > 2 ? std::sqrt(ss / static_cast<double>(n - 2) / sxx) : 0.0;
    if (mass < 1e-3)
        d.verdict = "below measurement floor";
    else if (std::abs(d.exponent - 1.0) <= 0.1)
        d.verdict = "ballistic";
    else if (std::abs(d.exponent) <= 0.05)
        d.verdict = "localized";
    else if (d.exponent <= 0.6)
        d.verdict = "weakly localized";
    else
        d.verdict = "intermediate";
    return d;
}

ZeroFrequencySeries zero_frequency_mass(const Trajectory& run, double beta, double tolerance) {
    if (!(beta > 0.0)) throw ValidationError("zero frequency: beta must be positive");
    ZeroFrequencySeries z;
    const Cutoff c = Cutoff::falling(1.0);
    for (const auto& f : run.snapshots) {
        if (!(f.time > 0.0)) continue;
        RadialField g = f;
        const double s = std::pow(f.time, beta);
        f.grid->apply_multiplier(g.u, [&](double k) { return c(k * s); });
        z.times.push_back(f.time);
        z.values.push_back(inner(g, f).real());
    }
    z.tail_oscillation = tail_stats(z.times, z.values).oscillation;
    z.settled = beta > 2.0 / 3.0 && z.tail_oscillation <= tolerance;
    return z;
}

MicrolocalMap microlocal_map(const RadialField& f, double t, const std::vector<double>& alphas,
                             MicrolocalOperator op) {
    if (!(t > 1.0)) throw ValidationError("microlocal map: t must exceed 1");
    if (alphas.empty()) throw ValidationError("microlocal map: no scales");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1])) throw ValidationError("microlocal map: alphas must increase");
    const Grid& g = *f.grid;
    const double s_max = std::pow(t, alphas.back());
    if (s_max > 0.5 * g.r_max()) throw ValidationError("microlocal map: shell lattice exits the grid");
    // Band edges e_j = t^{-alpha_j} descend; the narrowest transition must be resolvable.
    std::vector<Cutoff> edges;
    for (double a : alphas) edges.push_back(Cutoff::rising(std::pow(t, -a)));
    const double e_min = std::pow(t, -alphas.back());
    if (op == MicrolocalOperator::gamma && 0.5 * e_min < 4.0 * std::numbers::pi / g.r_max())
        throw ValidationError("microlocal map: band lattice below the grid's momentum resolution");
    const std::size_t I = alphas.size() + 1, J = alphas.size() + 1;
    std::vector<Cutoff> shell_edges;
    for (double a : alphas) shell_edges.push_back(Cutoff::rising(std::pow(t, a)));
    MicrolocalMap map;
    map.mass.assign(I, std::vector<double>(J, 0.0));
    for (std::size_t i = 0; i < I; ++i) {
        // Shell i: R(s_{i-1}) - R(s_i) with R(s_{-1}) = 1, R(s_I) = 0.
        const auto chi = [&](double x) {
            const double lo = i > 0 ? shell_edges[i - 1](x) : 1.0;
            const double hi = i + 1 < I ? shell_edges[i](x) : 0.0;
            return lo - hi;
        };
        const RadialField cf = multiply_pointwise(f, position_values(g, chi, 1.0));
        const double sm = std::pow(norm(cf), 2);
        map.shell_mass.push_back(sm);
        double row = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            map.mass[i][j] = sm > 0.0 ? band_form(cf, op, edges, j) : 0.0;
            row += map.mass[i][j];
        }
        map.row_sum.push_back(row);
    }
    return map;
}

RadialField dilate(const RadialField& f, double scale) {
    if (!(scale > 0.0)) throw ValidationError("dilate: scale must be positive");
    const Grid& g = *f.grid;
    RadialField out = RadialField::zeros(f.grid, f.time);
    if (scale == 1.0) {
        out.u = f.u;
        return out;
    }
    const OversampledField fine(g, f.u, 8), coarse(g, f.u, 4);
    double diff = 0.0, mag = 0.0;
    const double root = std::sqrt(scale);
    for (std::size_t j = 0; j + 1 < f.size(); ++j) {
        const double r = scale * g.r(j);
        if (r >= g.r_max()) break;
        const cplx a = fine(r), b = coarse(r);
        out.u[j] = root * a;
        diff = std::max(diff, std::abs(a - b));
        mag = std::max(mag, std::abs(a));
    }
    if (mag > 0.0 && diff > 1e-6 * mag) throw NumericalError("dilate: resampling accuracy below 1e-6");
    return out;
}

SelfSimilarRecord self_similar_profile(const std::vector<RadialField>& series, double alpha,
                                       const std::vector<double>& sample_times, double momentum_cap,
                                       double tolerance) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw ValidationError("self-similar profile: alpha must lie in (0, 1/2]");
    SelfSimilarRecord rec;
    const Cutoff shell = Cutoff::window(0.5, 4.0);
    const Cutoff cap = Cutoff::falling(momentum_cap);
    for (double t : sample_times) {
        const RadialField* f = nullptr;
        for (const auto& s : series)
            if (std::abs(s.time - t) <= 1e-9 * std::max(1.0, t)) f = &s;
        if (!f) throw ValidationError("self-similar profile: no snapshot at t = " + fmt_num(t));
        if (!(t > 0.0)) throw ValidationError("self-similar profile: sample times must be positive");
        RadialField p = dilate(*f, std::pow(t, alpha));
        for (std::size_t j = 0; j < p.size(); ++j) p.u[j] *= shell(p.grid->r(j));
        p.grid->apply_multiplier(p.u, [&](double k) { return cap(k); });
        rec.times.push_back(t);
        rec.profiles.push_back(std::move(p));
    }
    const std::size_t n = rec.profiles.size();
    rec.distances.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            rec.distances[i][j] = rec.distances[j][i] = norm(rec.profiles[i] - rec.profiles[j]);
    for (std::size_t i = 0; i + 1 < n; ++i) rec.sequential |= rec.distances[i][i + 1] <= tolerance;
    return rec;
}

std::vector<SequentialBound> sequential_A_bound(const std::vector<RadialField>& series,
                                                const std::vector<double>& M_list) {
    std::vector<const RadialField*> fields;
    for (const auto& f : series)
        if (f.time > 0.0) fields.push_back(&f);
    if (fields.size() < 2 || fields.back()->time < 4.0 * fields.front()->time)
        throw ValidationError("sequential bound: series must span T >= 4 t0");
    const double t0 = fields.front()->time;
    std::vector<SequentialBound> out;
    for (double M : M_list) {
        if (!(M > 0.0)) throw ValidationError("sequential bound: radius multipliers must be positive");
        SequentialBound b{M, {}, {}, {}, {}, 0.0};
        for (const RadialField* f : fields) {
            const RadialField af = apply(OperatorTag::dilation(), *f);
            b.times.push_back(f->time);
            b.values.push_back(std::sqrt(shell_mass(af, 0.0, M * std::sqrt(f->time))));
        }
        // Dyadic windows [t0 2^k, t0 2^{k+1}).
        for (double lo = t0; lo <= b.times.back(); lo *= 2.0) {
            double best = INFINITY, at = 0.0;
            for (std::size_t i = 0; i < b.times.size(); ++i)
                if (b.times[i] >= lo && b.times[i] < 2.0 * lo && b.values[i] < best) {
                    best = b.values[i];
                    at = b.times[i];
                }
            if (std::isfinite(best)) {
                b.window_min_times.push_back(at);
                b.window_min_values.push_back(best);
            }
        }
        b.slope = loglog_slope(b.window_min_times, b.window_min_values);
        out.push_back(std::move(b));
    }
    return out;
}

json channel_json(const ChannelResult& c) {
    return {{"alpha0", c.alpha0},
            {"times", c.times},
            {"cauchy_l2", c.cauchy_l2},
            {"cauchy_h1", c.cauchy_h1},
            {"late_gap", c.late_gap},
            {"tolerance", c.tolerance},
            {"accepted", c.accepted}};
}

}  // namespace nlsphase
