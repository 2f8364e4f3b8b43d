#include "nlsphase/observables.hpp"

#include <cmath>

#include "nlsphase/error.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/operators.hpp"

namespace nlsphase {

double TimeScale::operator()(double t) const {
    double s = power == 0.0 ? 1.0 : std::pow(t, power);
    if (log_power != 0.0) {
        if (!(t > 1.0)) throw ValidationError("log-refined time scale needs t > 1");
        s *= std::pow(std::log(t), log_power);
    }
    return s;
}

double sqrt_ffp(const Cutoff& c, double lambda) {
    const double h = c(lambda) * c.derivative(lambda, 1);
    return h > 0.0 ? std::sqrt(h) : 0.0;
}

double sqrt_ffp_slope(const Cutoff& c, double lambda) {
    const double f0 = c(lambda), f1 = c.derivative(lambda, 1), f2 = c.derivative(lambda, 2);
    const double h = f0 * f1;
    if (!(h > 1e-300)) return 0.0;
    return (f1 * f1 + f0 * f2) / (2.0 * std::sqrt(h));
}

Factor Factor::position_profile(std::function<double(double)> p, double alpha, double log_power) {
    Factor f;
    f.kind = Kind::Position;
    f.profile = std::move(p);
    f.scale = {alpha, log_power};
    return f;
}

Factor Factor::position(const Cutoff& c, double alpha, double log_power) {
    return position_profile([c](double l) { return c(l); }, alpha, log_power);
}

Factor Factor::position_sqrt_ffp(const Cutoff& c, double alpha, double log_power) {
    return position_profile([c](double l) { return sqrt_ffp(c, l); }, alpha, log_power);
}

Factor Factor::position_prime(const Cutoff& c, double alpha, double log_power) {
    return position_profile([c](double l) { return c.derivative(l, 1); }, alpha, log_power);
}

Factor Factor::gamma_function(SpectralFunction sf, double beta, double log_power) {
    Factor f;
    f.kind = Kind::GammaFunction;
    f.spectral = std::move(sf);
    f.scale = {beta, log_power};
    return f;
}

Factor Factor::dilation_cutoff(const Cutoff& c, double eps) {
    Factor f;
    f.kind = Kind::DilationFunction;
    f.profile = [c](double l) { return c(l); };
    f.scale = {eps, 0.0};
    return f;
}

Factor Factor::tanh_projection(const TanhProjection& p) {
    p.validate();
    Factor f;
    f.kind = Kind::Tanh;
    f.tanh = p;
    return f;
}

Factor Factor::multiply(std::function<double(double, double)> w) {
    Factor f;
    f.kind = Kind::Weight;
    f.weight = std::move(w);
    return f;
}

Factor Factor::gamma() {
    Factor f;
    f.kind = Kind::Gamma;
    return f;
}

Factor Factor::dilation() {
    Factor f;
    f.kind = Kind::Dilation;
    return f;
}

Factor Factor::momentum(std::function<double(double)> m) {
    Factor f;
    f.kind = Kind::Momentum;
    f.multiplier = std::move(m);
    return f;
}

std::vector<double> position_values(const Grid& g, const std::function<double(double)>& profile, double scale) {
    const SmoothWeight& w = default_weight();
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = profile(w.beta(g.r(j)) / scale);
    return v;
}

RadialField multiply_pointwise(const RadialField& f, std::span<const double> w) {
    RadialField out = f;
    for (std::size_t j = 0; j < out.size(); ++j) out.u[j] *= w[j];
    return out;
}

std::vector<cplx> apply_radial_field(const Grid& g, std::span<const cplx> u, const std::function<double(double)>& a,
                                     const std::function<double(double)>& a_r) {
    std::vector<cplx> du = g.derivative(u);
    const cplx mi(0.0, -1.0);
    for (std::size_t j = 0; j < du.size(); ++j) {
        const double r = g.r(j);
        du[j] = mi * (a(r) * du[j] + 0.5 * a_r(r) * u[j]);
    }
    du.back() = 0.0;
    return du;
}

RadialField apply_factor(const Factor& fac, const RadialField& f, double t, const ObservableContext& ctx) {
    const Grid& g = *f.grid;
    switch (fac.kind) {
        case Factor::Kind::Position:
            return multiply_pointwise(f, position_values(g, fac.profile, fac.scale(t)));
        case Factor::Kind::GammaFunction: {
            const FlowMap& fm = ctx.flow ? *ctx.flow : default_flow();
            const double s = fac.scale(t);
            const SpectralFunction F = s == 1.0 ? fac.spectral : fac.spectral.scaled(1.0 / s);
            return apply_function_of_gamma(fm, F, f, ctx.quadrature);
        }
        case Factor::Kind::DilationFunction: {
            const double s = fac.scale(t);
            const auto m = SpectralMultiplierA::from_function(LogGrid::defaults(g),
                                                              [&](double l) { return cplx(fac.profile(l / s)); });
            return func_of_dilation(m, f);
        }
        case Factor::Kind::Tanh:
            return func_of_dilation(tanh_projection_multiplier(fac.tanh, LogGrid::defaults(g)), f);
        case Factor::Kind::Weight: {
            RadialField out = f;
            for (std::size_t j = 0; j < out.size(); ++j) out.u[j] *= fac.weight(g.r(j), t);
            return out;
        }
        case Factor::Kind::Gamma:
            return apply(OperatorTag::gamma(), f);
        case Factor::Kind::Dilation:
            return apply(OperatorTag::dilation(), f);
        case Factor::Kind::Momentum: {
            RadialField out = f;
            g.apply_multiplier(out.u, fac.multiplier);
            return out;
        }
    }
    throw ValidationError("unknown observable factor");
}

RadialField apply_observable(const ObservableSpec& obs, const RadialField& f, double t,
                             const ObservableContext& ctx) {
    RadialField cur = f;
    for (auto it = obs.factors.rbegin(); it != obs.factors.rend(); ++it) cur = apply_factor(*it, cur, t, ctx);
    return cur;
}

cplx raw_expectation(const ObservableSpec& obs, const RadialField& f, double t, const ObservableContext& ctx) {
    bool scaled = false;
    for (const auto& fac : obs.factors)
        scaled |= fac.scale.power != 0.0 || fac.scale.log_power != 0.0;
    if (scaled && !(t > 0.0)) throw ValidationError("observable " + obs.label + ": scaled factors need t > 0");
    return inner(apply_observable(obs, f, t, ctx), f);
}

double expectation(const ObservableSpec& obs, const RadialField& f, double t, const ObservableContext& ctx) {
    return raw_expectation(obs, f, t, ctx).real();
}

ObservableSeries expectation_series(const ObservableSpec& obs, const std::vector<RadialField>& snapshots,
                                    const std::function<double(double)>& time_weight,
                                    const ObservableContext& ctx) {
    ObservableSeries s;
    s.label = obs.label;
    for (const auto& f : snapshots) {
        s.times.push_back(f.time);
        s.values.push_back(expectation(obs, f, f.time, ctx));
    }
    s.running_integral.assign(s.values.size(), 0.0);
    for (std::size_t i = 1; i < s.values.size(); ++i) {
        const double w0 = time_weight ? time_weight(s.times[i - 1]) : 1.0;
        const double w1 = time_weight ? time_weight(s.times[i]) : 1.0;
        s.running_integral[i] = s.running_integral[i - 1] +
                                0.5 * (s.times[i] - s.times[i - 1]) * (w0 * s.values[i - 1] + w1 * s.values[i]);
    }
    return s;
}

void write_series_csv(const std::string& path, const ObservableSeries& s, const std::string& value_unit) {
    CsvWriter w(path);
    w.comment(s.label);
    w.header({"t", "value[" + value_unit + "]", "running_integral[" + value_unit + "*time]"});
    for (std::size_t i = 0; i < s.times.size(); ++i) w.row({s.times[i], s.values[i], s.running_integral[i]});
}

}  // namespace nlsphase
