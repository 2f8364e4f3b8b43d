#include "nlsphase/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/fft.hpp"
#include "nlsphase/operators.hpp"
#include "nlsphase/quadrature.hpp"
#include "nlsphase/simd/kernels.hpp"

namespace nlsphase {

namespace {
constexpr double frozen_level = -1e7;
}

FlowMap::FlowMap(const SmoothWeight& w) : w_(&w) {
    const double step = w.table_step();
    const std::size_t cells = static_cast<std::size_t>(std::llround(1.0 / step));
    std::vector<double> lam{2.0}, b{0.0}, sl{1.0};
    for (std::size_t i = cells; i-- > 0;) {
        const double lo = 1.0 + step * static_cast<double>(i);
        const double d = w.d1(lo);
        if (!(d > 0.0)) break;
        const double inc = integrate([&](double x) { return 1.0 / w.d1(x); }, lo, lo + step, 8);
        const double next = b.back() - inc;
        if (!std::isfinite(next)) break;
        lam.push_back(lo);
        b.push_back(next);
        sl.push_back(1.0 / d);
        if (next < frozen_level) break;
    }
    lam_.assign(lam.rbegin(), lam.rend());
    b_.assign(b.rbegin(), b.rend());
    slope_.assign(sl.rbegin(), sl.rend());
}

double FlowMap::B(double lambda) const {
    if (lambda >= 2.0) return lambda - 2.0;
    if (lambda <= lam_.front()) return b_.front();
    const auto it = std::upper_bound(lam_.begin(), lam_.end(), lambda);
    const std::size_t i = static_cast<std::size_t>(it - lam_.begin()) - 1;
    const double hcell = lam_[i + 1] - lam_[i];
    const double t = (lambda - lam_[i]) / hcell;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * b_[i] + (t3 - 2 * t2 + t) * hcell * slope_[i] +
                     (-2 * t3 + 3 * t2) * b_[i + 1] + (t3 - t2) * hcell * slope_[i + 1];
    // Hermite can overshoot where 1/beta' varies by decades within a cell.
    return std::clamp(v, b_[i], b_[i + 1]);
}

double FlowMap::B_inverse(double b) const {
    if (b >= 0.0) return b + 2.0;
    if (b <= b_.front()) return lam_.front();
    const auto it = std::upper_bound(b_.begin(), b_.end(), b);
    const std::size_t i = static_cast<std::size_t>(it - b_.begin()) - 1;
    double lo = lam_[i], hi = lam_[i + 1];
    double x = lo + (hi - lo) * (b - b_[i]) / (b_[i + 1] - b_[i]);
    for (int iter = 0; iter < 60; ++iter) {
        const double f = B(x) - b;
        if (f > 0.0) hi = x; else lo = x;
        const double d = 1.0 / w_->d1(x);
        double nx = x - f / d;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 1e-15 * x) return nx;
        x = nx;
    }
    return x;
}

double FlowMap::z(double a, double r) const {
    if (r <= 1.0) return r;
    if (r >= 2.0 && r + a >= 2.0) return r + a;
    if (r <= lam_.front()) return r;
    return B_inverse(B(r) + a);
}

const FlowMap& default_flow() {
    static const FlowMap fm(default_weight());
    return fm;
}

double flow_z(const FlowMap& fm, double a, double r) {
    if (r < 0.0) throw ValidationError("flow: negative radius");
    return fm.z(a, r);
}

namespace {

// The flow is a translation in the straightened variable rho = B(z) + 2:
// for output radii r >= 2, (e^{i a gamma} u)(r) = E(r + a) with
// E(rho) = u(z) sqrt(beta'(z)), z = B^{-1}(rho - 2). Sampled on the fine
// grid rho_i = i * step, i >= -neg, and zero beyond r_max.
class StraightenedField {
public:
    StraightenedField(const FlowMap& fm, const OversampledField& os, double r_max, double reach)
        : step_(os.step()) {
        neg_ = static_cast<long>(std::ceil(std::max(0.0, reach - 2.0) / step_)) + 16;
        const long fine_last = static_cast<long>(os.samples().size()) - 1;
        pos_ = fine_last + 16;
        e_.assign(static_cast<std::size_t>(neg_ + pos_ + 1), cplx{});
        const long two = static_cast<long>(std::ceil(2.0 / step_));
        const auto& w = fm.weight();
        for (long i = -neg_; i <= pos_; ++i) {
            const double rho = static_cast<double>(i) * step_;
            cplx v{};
            if (i >= two) {
                if (i <= fine_last) v = os.samples()[static_cast<std::size_t>(i)];
            } else {
                const double z = fm.B_inverse(rho - 2.0);
                if (z > fm.frozen_radius() && z < r_max) v = os(z) * std::sqrt(w.d1(z));
            }
            e_[static_cast<std::size_t>(i + neg_)] = v;
        }
        double mx = 0.0;
        for (const auto& v : e_) mx = std::max(mx, std::abs(v));
        lo_ = 0;
        hi_ = static_cast<long>(e_.size()) - 1;
        if (mx == 0.0) {
            empty_ = true;
            return;
        }
        while (lo_ < hi_ && std::abs(e_[static_cast<std::size_t>(lo_)]) <= 1e-15 * mx) ++lo_;
        while (hi_ > lo_ && std::abs(e_[static_cast<std::size_t>(hi_)]) <= 1e-15 * mx) --hi_;
    }

    bool empty() const { return empty_; }
    double step() const { return step_; }
    // Support in rho.
    double rho_lo() const { return static_cast<double>(lo_ - neg_ - 4) * step_; }
    double rho_hi() const { return static_cast<double>(hi_ - neg_ + 4) * step_; }
    const cplx* sample_ptr(long i) const { return e_.data() + (i + neg_); }
    bool in_range(long i) const { return i >= -neg_ && i <= pos_; }

    cplx operator()(double rho) const {
        const double x = rho / step_;
        const double fl = std::floor(x);
        const long i0 = static_cast<long>(fl) - 3;
        if (!in_range(i0) || !in_range(i0 + 7)) return 0.0;
        const auto w = lagrange8(x - fl);
        cplx s{};
        for (int k = 0; k < 8; ++k) s += w[static_cast<std::size_t>(k)] * *sample_ptr(i0 + k);
        return s;
    }

private:
    std::vector<cplx> e_;
    double step_;
    long neg_ = 0, pos_ = 0, lo_ = 0, hi_ = 0;
    bool empty_ = false;
};

// out[j] += weight * (e^{i a gamma} u)(r_j) for r_j > 1.
void accumulate_flow(const FlowMap& fm, const Grid& g, const StraightenedField& E, std::size_t factor,
                     double a, cplx weight, std::span<cplx> out) {
    const double h = g.h(), rmax = g.r_max();
    const std::size_t n = g.size();
    const auto& w = fm.weight();
    // Mollified zone 1 < r < 2: few points, direct evaluation.
    for (std::size_t j = 0; j < n && g.r(j) < 2.0; ++j) {
        const double r = g.r(j);
        // beta' underflows next to r = 1; the flow is frozen there.
        if (r <= fm.frozen_radius()) continue;
        const double rho = fm.B(r) + 2.0 + a;
        if (rho >= rmax) continue;
        out[j] += weight * E(rho) / std::sqrt(w.d1(r));
    }
    // Exterior: pure translation in rho.
    const double r_lo = std::max(2.0, E.rho_lo() - a);
    const double r_hi = std::min(rmax, E.rho_hi() - a);
    if (r_hi < r_lo) return;
    std::size_t j0 = static_cast<std::size_t>(std::max(0.0, std::ceil(r_lo / h) - 1.0));
    while (j0 < n && g.r(j0) < 2.0) ++j0;
    std::size_t j1 = std::min(n - 1, static_cast<std::size_t>(std::floor(r_hi / h)));
    if (j1 < j0) return;
    const double shift = a / E.step();
    const double shift_fl = std::floor(shift);
    const auto taps = lagrange8(shift - shift_fl);
    const long P = static_cast<long>(factor);
    const long src0 = P * static_cast<long>(j0 + 1) + static_cast<long>(shift_fl) - 3;
    const long src_end = P * static_cast<long>(j1 + 1) + static_cast<long>(shift_fl) + 4;
    if (!E.in_range(src0) || !E.in_range(src_end)) {
        for (std::size_t j = j0; j <= j1; ++j) out[j] += weight * E(g.r(j) + a);
        return;
    }
    simd::kernels().fir8_strided(out.data() + j0, weight, taps.data(), E.sample_ptr(src0), factor,
                                 j1 - j0 + 1);
}

constexpr std::size_t oversampling = 8;

// Inputs vanishing on r < 2 live where gamma = -i d/dr on the reduced field, so
// F(gamma) is the Fourier multiplier F(k) on a zero-padded copy. The padding
// equals the kernel tail window, which bounds wrap-around by the tail tolerance.
bool exterior_supported(const Grid& g, std::span<const cplx> u) {
    for (std::size_t j = 0; j < u.size() && g.r(j) < 2.0; ++j)
        if (u[j] != cplx{}) return false;
    return true;
}

RadialField exterior_function_of_gamma(const FlowMap& fm, const SpectralFunction& F, const RadialField& f,
                                       double S, GammaFunctionReport* report) {
    const Grid& g = *f.grid;
    const double h = g.h();
    const std::size_t n = g.size();
    std::size_t j2 = 0;
    while (j2 < n && g.r(j2) < 2.0) ++j2;
    const std::size_t pad = static_cast<std::size_t>(std::ceil(S / h)) + 16;
    std::size_t N = 1;
    while (N < n - j2 + 2 * pad) N <<= 1;
    std::vector<cplx> x(N, cplx{}), y(N);
    for (std::size_t j = j2; j < n; ++j) x[pad + j - j2] = f.u[j];
    fft_forward(x, y);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(N) * h);
    const double R = F.support_radius();
    const auto value = [&](double k) { return k > R ? F.lim_plus() : (k < -R ? F.lim_minus() : F(k)); };
    for (std::size_t m = 0; m < N; ++m) {
        double mult;
        if (2 * m == N) {
            const double k = dk * static_cast<double>(m);
            mult = 0.5 * (value(k) + value(-k));
        } else {
            const double k = dk * (2 * m < N ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(N));
            mult = value(k);
        }
        y[m] *= mult / static_cast<double>(N);
    }
    fft_backward(y, x);
    RadialField out = RadialField::zeros(f.grid, f.time);
    for (std::size_t j = j2; j < n; ++j) out.u[j] = x[pad + j - j2];
    const auto& w = fm.weight();
    const double r2 = j2 < n ? g.r(j2) : g.r_max();
    for (std::size_t j = 0; j < j2; ++j) {
        const double r = g.r(j);
        if (r <= 1.0 || r <= fm.frozen_radius()) continue;
        const double pos = static_cast<double>(pad) + (fm.B(r) + 2.0 - r2) / h;
        const double fl = std::floor(pos);
        if (fl - 3.0 < 0.0 || fl + 4.0 >= static_cast<double>(N)) continue;
        const auto taps = lagrange8(pos - fl);
        cplx v{};
        const std::size_t i0 = static_cast<std::size_t>(fl) - 3;
        for (std::size_t k = 0; k < 8; ++k) v += taps[k] * x[i0 + k];
        out.u[j] = v / std::sqrt(w.d1(r));
    }
    out.u.back() = 0.0;
    if (report) *report = {S, h, N, N};
    return out;
}

}  // namespace

FlowResult gamma_group(const FlowMap& fm, double a, const RadialField& f) {
    f.check();
    const Grid& g = *f.grid;
    RadialField out = RadialField::zeros(f.grid, f.time);
    for (std::size_t j = 0; j < f.size() && g.r(j) <= fm.frozen_radius(); ++j) out.u[j] = f.u[j];
    OversampledField os(g, f.u, oversampling);
    StraightenedField E(fm, os, g.r_max(), std::abs(a) + 2.0 * g.h());
    bool flag = false;
    if (!E.empty()) {
        accumulate_flow(fm, g, E, oversampling, a, 1.0, out.u);
        // Mass transported past r_max is lost.
        flag = E.rho_hi() - a > g.r_max() + 8.0 * g.h() && a < 0.0;
    }
    out.u.back() = 0.0;
    flag = flag || boundary_contaminated(out, 1e-8);
    return {std::move(out), flag};
}

RadialField apply_function_of_gamma(const FlowMap& fm, const SpectralFunction& F, const RadialField& f,
                                    const GammaQuadrature& q, GammaFunctionReport* report) {
    f.check();
    const Grid& g = *f.grid;
    RadialField out = RadialField::zeros(f.grid, f.time);
    const double mean = F.mean();
    for (std::size_t j = 0; j < f.size(); ++j)
        out.u[j] = (g.r(j) <= fm.frozen_radius() ? F(0.0) : mean) * f.u[j];
    if (F.pieces().empty()) {
        if (report) *report = {0.0, 0.0, 0, 0};
        return out;
    }
    // Spectral extent of the field.
    const auto c = g.sine_coefficients(f.u);
    double cmax = 0.0;
    for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) {
        if (report) *report = {0.0, 0.0, 0, 0};
        return out;
    }
    double k_eff = g.wavenumbers()[0];
    for (std::size_t m = 0; m < c.size(); ++m)
        if (std::abs(c[m]) > q.spectral_floor * cmax) k_eff = g.wavenumbers()[m];
    const double S = F.window_for_tail(q.tail_tol);
    if (q.exterior_fft && exterior_supported(g, f.u)) return exterior_function_of_gamma(fm, F, f, S, report);
    const double ds = std::numbers::pi / (1.5 * k_eff + 2.0 * F.support_radius());
    const std::size_t half = static_cast<std::size_t>(std::ceil(S / ds));
    if (2 * half > q.max_nodes)
        throw NumericalError("function of gamma: tail bound needs " + std::to_string(2 * half) +
                             " nodes, above the configured cap");
    OversampledField os(g, f.u, oversampling);
    const double reach = std::min(S, g.r_max() + 4.0) + 2.0 * g.h();
    StraightenedField E(fm, os, g.r_max(), reach);
    std::size_t used = 0;
    for (std::size_t k = 0; k < half; ++k) {
        for (double sign : {1.0, -1.0}) {
            const double s = sign * (static_cast<double>(k) + 0.5) * ds;
            // Translations that move the straightened support off the grid vanish.
            if (E.rho_lo() - s > g.r_max()) continue;
            if (E.rho_hi() - s < 2.0 && (s < 0.0 || E.rho_hi() - s < 1.0 - 1e7)) continue;
            const cplx wgt = F.decaying_transform(s) * ds;
            accumulate_flow(fm, g, E, oversampling, s, wgt, out.u);
            ++used;
        }
    }
    out.u.back() = 0.0;
    if (report) *report = {S, ds, used, 2 * half};
    return out;
}

RadialField func_of_gamma(const FlowMap& fm, const Cutoff& c, double tau, const RadialField& f,
                          const GammaQuadrature& q) {
    if (!(tau > 0.0)) throw ValidationError("function of gamma: tau must be positive");
    return apply_function_of_gamma(fm, SpectralFunction::from_cutoff(c).scaled(tau), f, q);
}

}  // namespace nlsphase
