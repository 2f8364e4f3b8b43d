#pragma once

#include "nlsphase/grid.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

struct OperatorTag {
    enum class Kind { Gamma0, Gamma, Dilation, Laplacian, AbsMomentum, MomentumCutoff };
    Kind kind = Kind::Gamma;
    const SmoothWeight* weight = nullptr;  // Gamma; default weight when null
    Cutoff cutoff = Cutoff::rising(1.0);    // MomentumCutoff
    double scale = 1.0;                     // MomentumCutoff: F(|k| * scale)

    static OperatorTag gamma0() { return {Kind::Gamma0}; }
    static OperatorTag gamma(const SmoothWeight* w = nullptr) { return {Kind::Gamma, w}; }
    static OperatorTag dilation() { return {Kind::Dilation}; }
    static OperatorTag laplacian() { return {Kind::Laplacian}; }
    static OperatorTag abs_momentum() { return {Kind::AbsMomentum}; }
    static OperatorTag momentum_cutoff(const Cutoff& c, double scale) {
        return {Kind::MomentumCutoff, nullptr, c, scale};
    }
};

RadialField apply(const OperatorTag& tag, const RadialField& f);

// Reduced-form building blocks.
std::vector<cplx> apply_gamma(const Grid& g, std::span<const cplx> u, const SmoothWeight& w);
std::vector<cplx> apply_laplacian(const Grid& g, std::span<const cplx> u);
std::vector<cplx> apply_dilation(const Grid& g, std::span<const cplx> u);

// True when the last 5% of the grid carries more than `threshold` of the mass.
bool boundary_contaminated(const RadialField& f, double threshold = 1e-8);

struct ExteriorResidual {
    double residual;
    bool support_ok;  // mass >= 1 - 1e-8 in r >= 2 and away from r_max
};

// ||(gamma^2 + Delta) f|| / ||f||_{H^1}.
ExteriorResidual exterior_identity_residual(const RadialField& f, const SmoothWeight& w);

// |(f, [-i Delta, gamma] f)| by composition.
double commutator_support_check(const RadialField& f, const SmoothWeight& w);

// (f, -i(Delta g - g Delta) f) and 2 (f, gamma f) for the weight g = beta(r).
struct WeightCommutator {
    cplx lhs;
    cplx rhs;
};
WeightCommutator weight_commutator_forms(const RadialField& f, const SmoothWeight& w);

}  // namespace nlsphase
