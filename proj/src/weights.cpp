#include "nlsphase/weights.hpp"

#include <algorithm>
#include <cmath>

#include "nlsphase/error.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/quadrature.hpp"

namespace nlsphase {

namespace {

double raw_bump(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    return std::exp(-1.0 / (x - 1.0) - 1.0 / (2.0 - x));
}

double bump_norm() {
    static const double z = integrate(raw_bump, 1.0, 2.0, 16, 2000);
    return z;
}

double central_diff(const std::function<double(double)>& f, double x) {
    const double e = 1e-5;
    return (f(x + e) - f(x - e)) / (2.0 * e);
}

}  // namespace

Bump standard_bump() {
    Bump b;
    b.value = [](double x) { return raw_bump(x) / bump_norm(); };
    b.d1 = [](double x) {
        if (x <= 1.0 || x >= 2.0) return 0.0;
        const double u = x - 1.0, v = 2.0 - x;
        return raw_bump(x) / bump_norm() * (1.0 / (u * u) - 1.0 / (v * v));
    };
    b.d2 = [](double x) {
        if (x <= 1.0 || x >= 2.0) return 0.0;
        const double u = x - 1.0, v = 2.0 - x;
        const double s1 = 1.0 / (u * u) - 1.0 / (v * v);
        const double s2 = -2.0 / (u * u * u) - 2.0 / (v * v * v);
        return raw_bump(x) / bump_norm() * (s2 + s1 * s1);
    };
    return b;
}

SmoothWeight SmoothWeight::build(const Bump& bump) {
    if (!bump.value) throw ValidationError("bump: missing profile");
    for (double x : {-1.0, 0.0, 0.5, 0.999, 1.0, 2.0, 2.001, 2.5, 5.0})
        if (bump.value(x) != 0.0) throw ValidationError("bump: support must lie inside (1,2)");
    SmoothWeight w;
    w.bump_ = bump;
    if (!w.bump_.d1) w.bump_.d1 = [f = bump.value](double x) { return central_diff(f, x); };
    if (!w.bump_.d2) w.bump_.d2 = [f = w.bump_.d1](double x) { return central_diff(f, x); };

    const std::size_t cells = static_cast<std::size_t>(std::llround(1.0 / w.step_));
    w.b0_.assign(cells + 1, 0.0);
    w.b1_.assign(cells + 1, 0.0);
    w.b2_.assign(cells + 1, 0.0);
    const GaussRule& g = gauss_legendre(8);
    const auto& alpha = w.bump_.value;
    for (std::size_t i = 0; i < cells; ++i) {
        const double lo = 1.0 + w.step_ * static_cast<double>(i);
        const double hi = lo + w.step_;
        w.b1_[i + 1] = w.b1_[i] + integrate(alpha, lo, hi, 8);
        // beta increment: integrate beta' over the cell, beta'(x) = b1[i] + int_lo^x alpha.
        double s = 0.0;
        for (std::size_t q = 0; q < g.x.size(); ++q) {
            const double x = lo + 0.5 * w.step_ * (1.0 + g.x[q]);
            s += g.w[q] * (w.b1_[i] + integrate(alpha, lo, x, 8));
        }
        w.b0_[i + 1] = w.b0_[i] + 0.5 * w.step_ * s;
        w.b2_[i] = alpha(lo);
    }
    w.b2_[cells] = alpha(2.0);
    for (std::size_t i = 0; i <= cells; ++i)
        if (w.b2_[i] < 0.0) throw ValidationError("bump: profile must be nonnegative");
    if (std::abs(w.b1_[cells] - 1.0) > 1e-10)
        throw ValidationError("bump: integral must equal 1 to 1e-10");
    // Continuity at r = 2 fixes the constant.
    w.c_ = 2.0 - w.b0_[cells];
    for (auto& v : w.b0_) v += w.c_;
    return w;
}

double SmoothWeight::hermite(const std::vector<double>& v, const std::vector<double>& slope,
                             double r) const {
    const double x = (r - 1.0) / step_;
    std::size_t i = static_cast<std::size_t>(std::floor(x));
    i = std::min(i, v.size() - 2);
    const double t = x - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * v[i] + h10 * step_ * slope[i] + h01 * v[i + 1] + h11 * step_ * slope[i + 1];
}

double SmoothWeight::beta(double r) const {
    if (r <= 1.0) return c_;
    if (r >= 2.0) return r;
    return hermite(b0_, b1_, r);
}

double SmoothWeight::d1(double r) const {
    if (r <= 1.0) return 0.0;
    if (r >= 2.0) return 1.0;
    return hermite(b1_, b2_, r);
}

double SmoothWeight::d2(double r) const { return (r > 1.0 && r < 2.0) ? bump_.value(r) : 0.0; }
double SmoothWeight::d3(double r) const { return (r > 1.0 && r < 2.0) ? bump_.d1(r) : 0.0; }
double SmoothWeight::d4(double r) const { return (r > 1.0 && r < 2.0) ? bump_.d2(r) : 0.0; }

double SmoothWeight::delta_g(double r) const {
    if (r >= 2.0) return 2.0 / r;
    if (r <= 1.0) return 0.0;
    return 2.0 * d1(r) / r + d2(r);
}

double SmoothWeight::delta2_g(double r) const {
    if (r >= 2.0 || r <= 1.0) return 0.0;
    return 4.0 * d3(r) / r + d4(r);
}

WeightDerivs SmoothWeight::derivs(double r) const {
    if (r < 0.0) throw ValidationError("weight: negative radius");
    return {beta(r), d1(r), delta_g(r), delta2_g(r), d2(r)};
}

SmoothWeight build_beta(const Bump& bump) { return SmoothWeight::build(bump); }

const SmoothWeight& default_weight() {
    static const SmoothWeight w = SmoothWeight::build(standard_bump());
    return w;
}

WeightDerivs eval_weight_derivs(const SmoothWeight& w, double r) { return w.derivs(r); }

double smooth_bracket_delta2_g(double r) {
    if (r < 0.0) throw ValidationError("weight: negative radius");
    const double jr = std::sqrt(1.0 + r * r);
    return -15.0 / std::pow(jr, 7);
}

Polynomial smoothstep_slope(int order) {
    if (order < 5 || order % 2 == 0) throw ValidationError("cutoff: profile order must be odd and >= 5");
    const int q = (order - 1) / 2;
    Polynomial p({1.0});
    const Polynomial x({0.0, 1.0}), one_minus_x({1.0, -1.0});
    for (int i = 0; i < q; ++i) p = p * x * one_minus_x;
    const double total = p.antiderivative()(1.0);
    return p * (1.0 / total);
}

Polynomial smoothstep(int order) { return smoothstep_slope(order).antiderivative(); }

Cutoff Cutoff::rising(double a, int order) {
    if (!(a > 0.0)) throw ValidationError("cutoff: threshold must be positive");
    Cutoff c;
    c.kind_ = CutoffKind::rising;
    c.a_ = a;
    c.order_ = order;
    c.s_ = smoothstep(order);
    c.ds_ = smoothstep_slope(order);
    return c;
}

Cutoff Cutoff::falling(double a, int order) {
    Cutoff c = rising(a, order);
    c.kind_ = CutoffKind::falling;
    return c;
}

Cutoff Cutoff::window(double a, double b, int order) {
    Cutoff c = rising(a, order);
    if (!(b > 4.0 * a)) throw ValidationError("cutoff: window requires b > 4a");
    c.kind_ = CutoffKind::window;
    c.b_ = b;
    return c;
}

double Cutoff::rise(double a, double lambda, int k) const {
    const double y = 2.0 * lambda / a - 1.0;
    if (k == 0) {
        if (y <= 0.0) return 0.0;
        if (y >= 1.0) return 1.0;
        return s_(y);
    }
    if (y <= 0.0 || y >= 1.0) return 0.0;
    Polynomial p = s_;
    for (int i = 0; i < k; ++i) p = p.derivative();
    return std::pow(2.0 / a, k) * p(y);
}

double Cutoff::derivative(double lambda, int k) const {
    switch (kind_) {
        case CutoffKind::rising:
            return rise(a_, lambda, k);
        case CutoffKind::falling:
            return k == 0 ? 1.0 - rise(a_, lambda, 0) : -rise(a_, lambda, k);
        case CutoffKind::window:
            return rise(a_, lambda, k) - rise(b_, lambda, k);
    }
    return 0.0;
}

Cutoff smooth_char(CutoffKind kind, double a, double b, int order) {
    switch (kind) {
        case CutoffKind::rising:
            return Cutoff::rising(a, order);
        case CutoffKind::falling:
            return Cutoff::falling(a, order);
        case CutoffKind::window:
            return Cutoff::window(a, b, order);
    }
    throw ValidationError("cutoff: unknown kind");
}

VectorFieldKind VectorFieldKind::sqrt_smoothed(double theta) {
    if (!(theta > 1.0 && theta < 2.0)) throw ValidationError("SqrtSmoothed: theta must lie in (1,2)");
    return {Tag::SqrtSmoothed, theta};
}

VectorFieldKind VectorFieldKind::xfr(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("XfR: epsilon must lie in (0,1)");
    return {Tag::XfR, eps};
}

MorawetzValue morawetz_field(const VectorFieldKind& kind, double r) {
    if (r < 0.0) throw ValidationError("vector field: negative radius");
    switch (kind.tag) {
        case VectorFieldKind::Tag::Gamma0:
            // Hessian of |x| annihilates radial gradients away from the origin.
            return {1.0, 0.0};
        case VectorFieldKind::Tag::SmoothedBeta: {
            const auto& w = default_weight();
            return {w.d1(r), w.d2(r)};
        }
        case VectorFieldKind::Tag::SqrtSmoothed: {
            const double theta = kind.param;
            if (!(theta > 1.0 && theta < 2.0)) throw ValidationError("SqrtSmoothed: theta must lie in (1,2)");
            const double eps = 2.0 - theta;
            if (r == 0.0) return {0.0, INFINITY};
            const double f = r / std::sqrt(r * r + std::pow(r, theta));
            const double dens =
                0.5 * eps * std::pow(r, -(1.0 - 0.5 * eps)) * std::pow(std::pow(r, eps) + 1.0, -1.5);
            return {f, dens};
        }
        case VectorFieldKind::Tag::XfR: {
            const double eps = kind.param;
            if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("XfR: epsilon must lie in (0,1)");
            if (r == 0.0) return {INFINITY, INFINITY};
            const double jr = std::sqrt(1.0 + r * r);
            const double f = 1.0 / (std::pow(r, 1.0 - eps) * std::pow(jr, eps));
            const double dens = eps / (std::pow(r, 1.0 - eps) * std::pow(jr, 2.0 + eps));
            return {f, dens};
        }
    }
    return {0.0, 0.0};
}

void dump_cutoff_csv(const std::string& path, const Cutoff& c, double lo, double hi, int samples) {
    CsvWriter w(path);
    w.comment("cutoff kind=" + std::to_string(static_cast<int>(c.kind())) + " a=" + fmt_num(c.a()) +
              " b=" + fmt_num(c.b()) + " order=" + std::to_string(c.order()));
    w.header({"lambda", "value", "d1", "d2"});
    for (int i = 0; i < samples; ++i) {
        const double l = lo + (hi - lo) * i / std::max(1, samples - 1);
        w.row({l, c(l), c.derivative(l, 1), c.derivative(l, 2)});
    }
}

void dump_weight_csv(const std::string& path, const SmoothWeight& sw, double hi, int samples) {
    CsvWriter w(path);
    w.comment("smooth weight C=" + fmt_num(sw.constant()));
    w.header({"r", "beta", "d1", "d2", "delta_g", "delta2_g"});
    for (int i = 0; i < samples; ++i) {
        const double r = hi * i / std::max(1, samples - 1);
        w.row({r, sw.beta(r), sw.d1(r), sw.d2(r), sw.delta_g(r), sw.delta2_g(r)});
    }
}

}  // namespace nlsphase
