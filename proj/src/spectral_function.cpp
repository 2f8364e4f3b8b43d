#include "nlsphase/spectral_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsphase/error.hpp"
#include "nlsphase/quadrature.hpp"

namespace nlsphase {

namespace {
constexpr cplx I{0.0, 1.0};

std::vector<Polynomial> derivative_chain(const Polynomial& p) {
    std::vector<Polynomial> chain{p};
    for (std::size_t k = 0; k < p.degree(); ++k) chain.push_back(chain.back().derivative());
    return chain;
}
}  // namespace

cplx poly_fourier(const Polynomial& p, double w) {
    if (std::abs(w) <= 30.0) {
        const GaussRule& g = gauss_legendre(48);
        cplx s{};
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double y = 0.5 * (1.0 + g.x[i]);
            s += g.w[i] * p(y) * std::exp(-I * (w * y));
        }
        return 0.5 * s;
    }
    // Repeated integration by parts; exact for polynomials.
    const cplx e1 = std::exp(-I * w);
    const cplx iw = I * w;
    cplx s{};
    cplx denom = iw;
    for (const auto& q : derivative_chain(p)) {
        s += (q(0.0) - q(1.0) * e1) / denom;
        denom *= iw;
    }
    return s;
}

SpectralFunction::SpectralFunction(double lim_minus, double lim_plus, std::vector<PolyPiece> pieces)
    : lim_minus_(lim_minus), lim_plus_(lim_plus), pieces_(std::move(pieces)) {}

SpectralFunction SpectralFunction::from_cutoff(const Cutoff& c) {
    auto rise_piece = [&](double a, double sign) {
        return PolyPiece{0.5 * a, 0.5 * a, c.profile_slope() * (sign * 2.0 / a)};
    };
    switch (c.kind()) {
        case CutoffKind::rising:
            return {0.0, 1.0, {rise_piece(c.a(), 1.0)}};
        case CutoffKind::falling:
            return {1.0, 0.0, {rise_piece(c.a(), -1.0)}};
        case CutoffKind::window:
            return {0.0, 0.0, {rise_piece(c.a(), 1.0), rise_piece(c.b(), -1.0)}};
    }
    throw ValidationError("spectral function: unknown cutoff kind");
}

SpectralFunction SpectralFunction::lambda_times_window(const Cutoff& w) {
    if (w.kind() != CutoffKind::window) throw ValidationError("lambda_times_window: window cutoff required");
    const Polynomial& S = w.profile();
    const Polynomial& dS = w.profile_slope();
    const double a = w.a(), b = w.b();
    std::vector<PolyPiece> pieces;
    // d/dl [l S(y)] = S(y) + l S'(y) (2/a), l = a/2 + (a/2) y
    pieces.push_back({0.5 * a, 0.5 * a, S + Polynomial({1.0, 1.0}) * dS});
    pieces.push_back({a, 0.5 * b - a, Polynomial({1.0})});
    // d/dl [l (1 - S(y))] = 1 - S(y) - l S'(y) (2/b), l = b/2 + (b/2) y
    pieces.push_back({0.5 * b, 0.5 * b, Polynomial({1.0}) + S * -1.0 + Polynomial({-1.0, -1.0}) * dS});
    return {0.0, 0.0, std::move(pieces)};
}

double SpectralFunction::operator()(double lambda) const { return derivative(lambda, 0); }

double SpectralFunction::derivative(double lambda, int k) const {
    if (k < 0) throw ValidationError("spectral function: negative derivative order");
    double s = k == 0 ? lim_minus_ : 0.0;
    for (const auto& pc : pieces_) {
        const double lo = std::min(pc.lambda0, pc.lambda0 + pc.c1);
        const double hi = std::max(pc.lambda0, pc.lambda0 + pc.c1);
        if (k == 0) {
            const Polynomial anti = pc.p.antiderivative();
            if (lambda >= hi) {
                s += std::abs(pc.c1) * anti(1.0);
            } else if (lambda > lo) {
                const double y = (lambda - pc.lambda0) / pc.c1;
                s += pc.c1 > 0 ? pc.c1 * anti(y) : -pc.c1 * (anti(1.0) - anti(y));
            }
            continue;
        }
        if (lambda <= lo || lambda >= hi) continue;
        const double y = (lambda - pc.lambda0) / pc.c1;
        Polynomial q = pc.p;
        for (int i = 1; i < k; ++i) q = q.derivative();
        s += q(y) / std::pow(pc.c1, k - 1);
    }
    return s;
}

SpectralFunction SpectralFunction::reflect() const {
    std::vector<PolyPiece> p;
    for (const auto& pc : pieces_) p.push_back({-pc.lambda0, -pc.c1, pc.p * -1.0});
    return {lim_plus_, lim_minus_, std::move(p)};
}

SpectralFunction SpectralFunction::scaled(double tau) const {
    if (!(tau > 0.0)) throw ValidationError("spectral function: scale must be positive");
    std::vector<PolyPiece> p;
    for (const auto& pc : pieces_) p.push_back({tau * pc.lambda0, tau * pc.c1, pc.p * (1.0 / tau)});
    return {lim_minus_, lim_plus_, std::move(p)};
}

SpectralFunction SpectralFunction::prime() const {
    std::vector<PolyPiece> p;
    for (const auto& pc : pieces_) p.push_back({pc.lambda0, pc.c1, pc.p.derivative() * (1.0 / pc.c1)});
    return {0.0, 0.0, std::move(p)};
}

SpectralFunction SpectralFunction::lambda_prime() const {
    // (l f')' = f' + l f'' with l = lambda0 + c1 y
    std::vector<PolyPiece> p;
    for (const auto& pc : pieces_) {
        const Polynomial lam({pc.lambda0, pc.c1});
        p.push_back({pc.lambda0, pc.c1, pc.p + lam * pc.p.derivative() * (1.0 / pc.c1)});
    }
    return {0.0, 0.0, std::move(p)};
}

SpectralFunction SpectralFunction::operator+(const SpectralFunction& o) const {
    auto p = pieces_;
    p.insert(p.end(), o.pieces_.begin(), o.pieces_.end());
    return {lim_minus_ + o.lim_minus_, lim_plus_ + o.lim_plus_, std::move(p)};
}

SpectralFunction SpectralFunction::operator*(double s) const {
    auto p = pieces_;
    for (auto& pc : p) pc.p = pc.p * s;
    return {s * lim_minus_, s * lim_plus_, std::move(p)};
}

SpectralFunction SpectralFunction::operator-(const SpectralFunction& o) const { return *this + o * -1.0; }

cplx SpectralFunction::derivative_transform(double s) const {
    cplx acc{};
    for (const auto& pc : pieces_)
        acc += std::abs(pc.c1) * std::exp(-I * (pc.lambda0 * s)) * poly_fourier(pc.p, pc.c1 * s);
    return acc / (2.0 * std::numbers::pi);
}

cplx SpectralFunction::decaying_transform(double s) const {
    if (s == 0.0) throw NumericalError("spectral function: transform singular at s = 0");
    return derivative_transform(s) / (I * s);
}

std::vector<double> SpectralFunction::jump_magnitudes() const {
    // Jumps of f^{(k+1)} at each breakpoint; adjacent pieces cancel.
    struct Jump {
        double at;
        std::size_t k;
        double v;
        double mag;  // coefficient scale, for deciding exact cancellation
    };
    std::vector<Jump> jumps;
    std::size_t kmax = 0;
    for (const auto& pc : pieces_) {
        const auto chain = derivative_chain(pc.p);
        kmax = std::max(kmax, chain.size());
        const double lo_y = pc.c1 > 0 ? 0.0 : 1.0;
        const double lo = pc.lambda0 + pc.c1 * lo_y;
        const double hi = pc.lambda0 + pc.c1 * (1.0 - lo_y);
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const double scale = std::pow(pc.c1, -static_cast<double>(k));
            double mag = 0.0;
            for (double co : chain[k].coeffs()) mag += std::abs(co);
            mag *= std::abs(scale);
            jumps.push_back({lo, k, chain[k](lo_y) * scale, mag});
            jumps.push_back({hi, k, -chain[k](1.0 - lo_y) * scale, mag});
        }
    }
    std::sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) {
        return x.k != y.k ? x.k < y.k : x.at < y.at;
    });
    std::vector<double> c(kmax, 0.0);
    for (std::size_t i = 0; i < jumps.size();) {
        std::size_t j = i;
        double v = 0.0, scale = 0.0;
        while (j < jumps.size() && jumps[j].k == jumps[i].k &&
               std::abs(jumps[j].at - jumps[i].at) <= 1e-12 * (1.0 + std::abs(jumps[i].at))) {
            v += jumps[j].v;
            scale += jumps[j].mag;
            ++j;
        }
        if (std::abs(v) > 1e-11 * scale) c[jumps[i].k] += std::abs(v);
        i = j;
    }
    return c;
}

double SpectralFunction::transform_envelope(double s) const {
    const auto c = jump_magnitudes();
    const double w = std::abs(s);
    double acc = 0.0, wk = w;
    for (double ck : c) {
        acc += ck / wk;
        wk *= w;
    }
    return acc / (2.0 * std::numbers::pi);
}

double SpectralFunction::window_for_tail(double tol) const {
    if (pieces_.empty()) return 0.0;
    const auto c = jump_magnitudes();
    // int_{|s|>S} envelope(s)/|s| ds = (1/pi) sum_k c_k S^{-(k+1)} / (k+1)
    auto tail = [&](double S) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            acc += c[k] * std::pow(S, -static_cast<double>(k + 1)) / static_cast<double>(k + 1);
        return acc / std::numbers::pi;
    };
    double lo = 1e-6, hi = 1.0;
    while (tail(hi) > tol) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("spectral function: tail bound unachievable");
    }
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > tol ? lo : hi) = mid;
    }
    return hi;
}

double SpectralFunction::support_radius() const {
    double r = 0.0;
    for (const auto& pc : pieces_) r = std::max({r, std::abs(pc.lambda0), std::abs(pc.lambda0 + pc.c1)});
    return r;
}

double SpectralFunction::transform_moment(int n, double S, std::size_t nodes) const {
    const double ds = S / static_cast<double>(nodes);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double s = (static_cast<double>(k) + 0.5) * ds;
        acc += (std::abs(decaying_transform(s)) + std::abs(decaying_transform(-s))) * std::pow(s, n);
    }
    return acc * ds;
}

}  // namespace nlsphase
