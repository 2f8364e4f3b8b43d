#include "nlsphase/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/fft.hpp"
#include "nlsphase/interp.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
constexpr std::size_t upsample = 4;
}  // namespace

void LogGrid::validate() const {
    if (!(r_min > 0.0 && r_max > r_min)) throw ValidationError("log grid: need 0 < r_min < r_max");
    if (n_log < 16 || (n_log & (n_log - 1)) != 0) throw ValidationError("log grid: n_log must be a power of two >= 16");
}

double LogGrid::dt() const { return std::log(r_max / r_min) / static_cast<double>(n_log); }
double LogGrid::t(std::size_t j) const { return std::log(r_min) + static_cast<double>(j) * dt(); }

double LogGrid::lambda(std::size_t m) const {
    const long mm = m < n_log / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n_log);
    return 2.0 * std::numbers::pi * static_cast<double>(mm) / (static_cast<double>(n_log) * dt());
}

LogGrid LogGrid::defaults(const Grid& g) { return {1e-7 * g.r_max(), g.r_max(), 2 * g.size()}; }

SpectralMultiplierA SpectralMultiplierA::from_function(const LogGrid& log,
                                                       const std::function<cplx(double)>& m) {
    log.validate();
    SpectralMultiplierA out{log, std::vector<cplx>(log.n_log)};
    for (std::size_t k = 0; k < log.n_log; ++k) out.samples[k] = m(log.lambda(k));
    return out;
}

void TanhProjection::validate() const {
    if (!(M > 1.0)) throw ValidationError("tanh projection: M must exceed 1");
    if (!(R >= 2.0 && R <= M)) throw ValidationError("tanh projection: need 2 <= R <= M");
}

double TanhProjection::operator()(double lambda) const {
    return sign == Sign::outgoing ? 0.5 * (1.0 + std::tanh((lambda - M) / R))
                                  : 0.5 * (1.0 - std::tanh((lambda + M) / R));
}

SpectralMultiplierA tanh_projection_multiplier(const TanhProjection& p, const LogGrid& log) {
    p.validate();
    return SpectralMultiplierA::from_function(log, [&](double l) { return cplx(p(l)); });
}

std::vector<cplx> to_log_grid(const RadialField& f, const LogGrid& log) {
    log.validate();
    f.check();
    OversampledField os(*f.grid, f.u, 8);
    std::vector<cplx> w(log.n_log);
    for (std::size_t j = 0; j < log.n_log; ++j) {
        const double t = log.t(j);
        const double r = std::exp(t);
        // e^{3t/2} phi(r) = e^{t/2} u(r)
        w[j] = r < f.grid->r_max() ? std::exp(0.5 * t) * os(r) : cplx{};
    }
    return w;
}

RadialField from_log_grid(std::span<const cplx> w, const LogGrid& log, const GridPtr& grid, double time) {
    const std::size_t n = log.n_log;
    if (w.size() != n) throw ValidationError("log grid: sample count mismatch");
    // Band-limited periodic interpolation: 4x spectral upsampling then Lagrange-8.
    std::vector<cplx> W(n);
    fft_forward(w, W);
    const std::size_t L = upsample * n;
    std::vector<cplx> Z(L, cplx{});
    for (std::size_t m = 0; m < n / 2; ++m) Z[m] = W[m];
    for (std::size_t m = n / 2 + 1; m < n; ++m) Z[L - n + m] = W[m];
    Z[n / 2] = 0.5 * W[n / 2];
    Z[L - n / 2] = 0.5 * W[n / 2];
    std::vector<cplx> fine(L);
    fft_backward(Z, fine);
    for (auto& v : fine) v /= static_cast<double>(n);
    const double fine_dt = log.dt() / static_cast<double>(upsample);
    const double t0 = std::log(log.r_min);
    RadialField out = RadialField::zeros(grid, time);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        const double r = grid->r(j);
        if (r < log.r_min || r > log.r_max) continue;
        const double x = (std::log(r) - t0) / fine_dt;
        const double fl = std::floor(x);
        const auto taps = lagrange8(x - fl);
        const long i0 = static_cast<long>(fl) - 3;
        cplx s{};
        for (int k = 0; k < 8; ++k) {
            long i = (i0 + k) % static_cast<long>(L);
            if (i < 0) i += static_cast<long>(L);
            s += taps[static_cast<std::size_t>(k)] * fine[static_cast<std::size_t>(i)];
        }
        out.u[j] = s / std::sqrt(r);
    }
    out.u.back() = 0.0;
    return out;
}

double log_grid_norm(std::span<const cplx> w, const LogGrid& log) {
    double s = 0.0;
    for (const auto& v : w) s += std::norm(v);
    return std::sqrt(four_pi * log.dt() * s);
}

double log_window_mass_fraction(const RadialField& f, const LogGrid& log) {
    const double total = norm(f) * norm(f);
    if (total == 0.0) return 1.0;
    return shell_mass(f, log.r_min, log.r_max) / total;
}

RadialField func_of_dilation(const SpectralMultiplierA& m, const RadialField& f, double mass_tolerance) {
    const LogGrid& log = m.log;
    log.validate();
    if (m.samples.size() != log.n_log) throw ValidationError("dilation multiplier: sample count mismatch");
    const double total = norm(f);
    if (total == 0.0) return RadialField::zeros(f.grid, f.time);
    if (1.0 - log_window_mass_fraction(f, log) > mass_tolerance)
        throw ValidationError("dilation multiplier: field mass outside the log window exceeds tolerance");
    auto w = to_log_grid(f, log);
    std::vector<cplx> W(log.n_log);
    fft_forward(w, W);
    for (std::size_t k = 0; k < log.n_log; ++k) W[k] *= m.samples[k] / static_cast<double>(log.n_log);
    fft_backward(W, w);
    return from_log_grid(w, log, f.grid, f.time);
}

LeakageResult highlow_leakage(double N, double M, double R, const RadialField& f, const RadialField& g,
                              const LogGrid& log) {
    require_same_grid(f, g);
    if (!(N > 0.0)) throw ValidationError("high/low leakage: band N must be positive");
    const double ng = norm(g), nf = norm(f);
    if (nf == 0.0 || ng == 0.0) return {0.0, 0.0, 0.0};
    const Cutoff band = Cutoff::falling(N);
    const auto bm = SpectralMultiplierA::from_function(log, [&](double l) { return cplx(band(std::abs(l))); });
    const RadialField fb = func_of_dilation(bm, f);
    const RadialField gb = func_of_dilation(bm, g);
    const double kf = norm(fb) / nf, kg = norm(gb) / ng;
    if (kf * kf < 1e-3 || kg * kg < 1e-3)
        throw NumericalError("high/low leakage: band filter keeps less than 1e-3 of the mass");
    RadialField prod = RadialField::zeros(f.grid, f.time);
    for (std::size_t j = 0; j < prod.size(); ++j) prod.u[j] = fb.u[j] * gb.u[j] / f.r(j);
    const double np = norm(prod);
    if (np == 0.0) return {0.0, kf * kf, kg * kg};
    const TanhProjection P{M, R, TanhProjection::Sign::outgoing};
    const auto pm = tanh_projection_multiplier(P, log);
    const RadialField hi = func_of_dilation(pm, prod, 1.0);
    return {norm(hi) / np, kf * kf, kg * kg};
}

double mellin_convolution_residual(const RadialField& f, const RadialField& g, const LogGrid& log) {
    require_same_grid(f, g);
    const std::size_t n = log.n_log;
    const auto wf = to_log_grid(f, log);
    const auto wg = to_log_grid(g, log);
    // U(fg) = e^{-3t/2} Uf Ug on the log grid.
    std::vector<cplx> wp(n), shifted(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double damp = std::exp(-1.5 * log.t(j));
        wp[j] = damp * wf[j] * wg[j];
        shifted[j] = damp * wf[j];
    }
    std::vector<cplx> P(n), Fs(n), G(n);
    fft_forward(wp, P);
    // Transform of f along the line Im lambda = -3/2.
    fft_forward(shifted, Fs);
    fft_forward(wg, G);
    double worst = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        cplx conv{};
        for (std::size_t k = 0; k < n; ++k) conv += Fs[k] * G[(m + n - k) % n];
        conv /= static_cast<double>(n);
        worst = std::max(worst, std::abs(conv - P[m]));
        scale = std::max(scale, std::abs(P[m]));
    }
    return scale == 0.0 ? 0.0 : worst / scale;
}

}  // namespace nlsphase
