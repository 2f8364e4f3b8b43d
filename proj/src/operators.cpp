#include "nlsphase/operators.hpp"

#include <cmath>

#include "nlsphase/error.hpp"

namespace nlsphase {

namespace {
constexpr cplx I{0.0, 1.0};
}

std::vector<cplx> apply_gamma(const Grid& g, std::span<const cplx> u, const SmoothWeight& w) {
    const auto du = g.derivative(u);
    std::vector<cplx> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = g.r(j);
        if (r <= 1.0) {
            out[j] = 0.0;
            continue;
        }
        const double b1 = w.d1(r);
        out[j] = -I * (b1 * (du[j] - u[j] / r) + 0.5 * w.delta_g(r) * u[j]);
    }
    return out;
}

std::vector<cplx> apply_laplacian(const Grid& g, std::span<const cplx> u) {
    std::vector<cplx> out(u.begin(), u.end());
    g.apply_multiplier(out, [](double k) { return -k * k; });
    return out;
}

std::vector<cplx> apply_dilation(const Grid& g, std::span<const cplx> u) {
    const auto du = g.derivative(u);
    std::vector<cplx> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = -I * (g.r(j) * du[j] + 0.5 * u[j]);
    return out;
}

RadialField apply(const OperatorTag& tag, const RadialField& f) {
    f.check();
    const Grid& g = *f.grid;
    RadialField out = RadialField::zeros(f.grid, f.time);
    switch (tag.kind) {
        case OperatorTag::Kind::Gamma0: {
            auto du = g.derivative(f.u);
            for (auto& v : du) v *= -I;
            out.u = std::move(du);
            break;
        }
        case OperatorTag::Kind::Gamma:
            out.u = apply_gamma(g, f.u, tag.weight ? *tag.weight : default_weight());
            break;
        case OperatorTag::Kind::Dilation:
            out.u = apply_dilation(g, f.u);
            break;
        case OperatorTag::Kind::Laplacian:
            out.u = apply_laplacian(g, f.u);
            break;
        case OperatorTag::Kind::AbsMomentum:
            out.u = f.u;
            g.apply_multiplier(out.u, [](double k) { return k; });
            break;
        case OperatorTag::Kind::MomentumCutoff: {
            out.u = f.u;
            const Cutoff c = tag.cutoff;
            const double s = tag.scale;
            g.apply_multiplier(out.u, [&](double k) { return c(k * s); });
            break;
        }
    }
    return out;
}

bool boundary_contaminated(const RadialField& f, double threshold) {
    return edge_mass_fraction(f, 0.05) > threshold;
}

ExteriorResidual exterior_identity_residual(const RadialField& f, const SmoothWeight& w) {
    const double h1 = norm(f, NormKind::h1());
    if (h1 == 0.0) throw ValidationError("exterior identity: zero norm");
    const double total = norm(f) * norm(f);
    const double inner_mass = shell_mass(f, 0.0, 2.0);
    const bool support_ok =
        inner_mass <= 1e-8 * total && !boundary_contaminated(f, 1e-8);
    const Grid& g = *f.grid;
    auto gu = apply_gamma(g, f.u, w);
    auto ggu = apply_gamma(g, gu, w);
    auto lu = apply_laplacian(g, f.u);
    RadialField res(f.grid, std::move(ggu), f.time);
    for (std::size_t j = 0; j < res.u.size(); ++j) res.u[j] += lu[j];
    res.u.back() = 0.0;
    return {norm(res) / h1, support_ok};
}

double commutator_support_check(const RadialField& f, const SmoothWeight& w) {
    const Grid& g = *f.grid;
    auto gu = apply_gamma(g, f.u, w);
    auto lgu = apply_laplacian(g, gu);
    auto lu = apply_laplacian(g, f.u);
    auto glu = apply_gamma(g, lu, w);
    RadialField c(f.grid, std::vector<cplx>(f.size()), f.time);
    for (std::size_t j = 0; j < c.u.size(); ++j) c.u[j] = -I * lgu[j] + I * glu[j];
    return std::abs(inner(f, c));
}

WeightCommutator weight_commutator_forms(const RadialField& f, const SmoothWeight& w) {
    const Grid& g = *f.grid;
    std::vector<cplx> gu(f.size());
    for (std::size_t j = 0; j < gu.size(); ++j) gu[j] = w.beta(g.r(j)) * f.u[j];
    auto lgu = apply_laplacian(g, gu);
    auto lu = apply_laplacian(g, f.u);
    RadialField c(f.grid, std::vector<cplx>(f.size()), f.time);
    for (std::size_t j = 0; j < c.u.size(); ++j) c.u[j] = -I * (lgu[j] - w.beta(g.r(j)) * lu[j]);
    RadialField gam(f.grid, apply_gamma(g, f.u, w), f.time);
    return {inner(c, f), 2.0 * inner(gam, f)};
}

}  // namespace nlsphase
