#pragma once

#include <cstddef>
#include <vector>

namespace nlsphase {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

// Cached Gauss-Legendre rule with n points.
const GaussRule& gauss_legendre(std::size_t n);

// Integral of f over [a,b] with an n-point rule on each of `cells` cells.
template <class F>
double integrate(F&& f, double a, double b, std::size_t n = 16, std::size_t cells = 1) {
    const GaussRule& g = gauss_legendre(n);
    const double hcell = (b - a) / static_cast<double>(cells);
    double s = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double lo = a + hcell * static_cast<double>(c);
        const double mid = lo + 0.5 * hcell, half = 0.5 * hcell;
        double sc = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i) sc += g.w[i] * f(mid + half * g.x[i]);
        s += sc * half;
    }
    return s;
}

}  // namespace nlsphase
