#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "nlsphase/grid.hpp"

namespace nlsphase {

// 8-point Lagrange weights for a node at fractional offset t in [0,1) from
// sample 3 of a window of 8 consecutive samples.
std::array<double, 8> lagrange8(double t);

// Trigonometric interpolant of a reduced field sampled `factor` times finer,
// evaluated off-grid with 8-point Lagrange. Respects the odd symmetry of the
// sine basis at r = 0 and r = r_max.
class OversampledField {
public:
    OversampledField(const Grid& grid, std::span<const cplx> u, std::size_t factor = 8);

    cplx operator()(double r) const;
    // Sample i of the fine grid (r = i * step()), with odd reflection outside.
    cplx at(long i) const;
    double step() const { return step_; }
    std::size_t factor() const { return factor_; }
    const std::vector<cplx>& samples() const { return fine_; }

private:
    std::vector<cplx> fine_;
    double step_;
    std::size_t factor_;
};

}  // namespace nlsphase
