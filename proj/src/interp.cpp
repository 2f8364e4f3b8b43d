#include "nlsphase/interp.hpp"

#include <cmath>

namespace nlsphase {

std::array<double, 8> lagrange8(double t) {
    std::array<double, 8> w{};
    for (int k = 0; k < 8; ++k) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 8; ++m) {
            if (m == k) continue;
            num *= t - static_cast<double>(m - 3);
            den *= static_cast<double>(k - m);
        }
        w[static_cast<std::size_t>(k)] = num / den;
    }
    return w;
}

OversampledField::OversampledField(const Grid& grid, std::span<const cplx> u, std::size_t factor)
    : fine_(grid.oversample(u, factor)),
      step_(grid.h() / static_cast<double>(factor)),
      factor_(factor) {}

cplx OversampledField::at(long i) const {
    const long last = static_cast<long>(fine_.size()) - 1;
    const long period = 2 * last;
    i %= period;
    if (i < 0) i += period;
    if (i <= last) return fine_[static_cast<std::size_t>(i)];
    return -fine_[static_cast<std::size_t>(period - i)];
}

cplx OversampledField::operator()(double r) const {
    const double x = r / step_;
    const double fl = std::floor(x);
    const long i0 = static_cast<long>(fl);
    const auto w = lagrange8(x - fl);
    cplx s{};
    for (int k = 0; k < 8; ++k) s += w[static_cast<std::size_t>(k)] * at(i0 - 3 + k);
    return s;
}

}  // namespace nlsphase
