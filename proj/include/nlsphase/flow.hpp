#pragma once

#include <vector>

#include "nlsphase/grid.hpp"
#include "nlsphase/interp.hpp"
#include "nlsphase/spectral_function.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

// Transport map of the vector field beta'(r) d/dr: B(l) = int_2^l ds / beta'(s)
// and z(a, r) = B^{-1}(B(r) + a) for r > 1.
class FlowMap {
public:
    explicit FlowMap(const SmoothWeight& w);

    const SmoothWeight& weight() const { return *w_; }
    double B(double lambda) const;
    double B_inverse(double b) const;
    double z(double a, double r) const;
    // Below this radius the flow is frozen (B < -1e7).
    double frozen_radius() const { return lam_.front(); }

private:
    const SmoothWeight* w_;
    std::vector<double> lam_;    // ascending nodes on [frozen_radius, 2]
    std::vector<double> b_;      // B at lam_
    std::vector<double> slope_;  // 1 / beta' at lam_
};

const FlowMap& default_flow();

double flow_z(const FlowMap& fm, double a, double r);

struct FlowResult {
    RadialField field;
    bool boundary_flag;  // transported mass left the grid or reached its edge
};

// e^{i a gamma} f.
FlowResult gamma_group(const FlowMap& fm, double a, const RadialField& f);

struct GammaQuadrature {
    double tail_tol = 1e-8;
    double spectral_floor = 1e-13;  // relative level defining the field's k extent
    std::size_t max_nodes = 400000;
    // Fields vanishing on r < 2 go through the exact exterior multiplier.
    bool exterior_fft = true;
};

struct GammaFunctionReport {
    double window;        // S
    double node_spacing;  // delta s
    std::size_t nodes_used;
    std::size_t nodes_total;
};

// F(gamma) f by the Fourier representation.
RadialField apply_function_of_gamma(const FlowMap& fm, const SpectralFunction& F, const RadialField& f,
                                    const GammaQuadrature& q = {}, GammaFunctionReport* report = nullptr);

// c(gamma / tau) f.
RadialField func_of_gamma(const FlowMap& fm, const Cutoff& c, double tau, const RadialField& f,
                          const GammaQuadrature& q = {});

}  // namespace nlsphase
