#include "nlsphase/simd/kernels.hpp"

namespace nlsphase::simd {
namespace {

void cmul(cplx* x, const cplx* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i].real(), b = x[i].imag();
        const double c = m[i].real(), d = m[i].imag();
        x[i] = {a * c - b * d, a * d + b * c};
    }
}

void rscale(cplx* x, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= w[i];
}

double weighted_norm2(const cplx* x, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a2 = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        s += w ? w[i] * a2 : a2;
    }
    return s;
}

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

void axpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
    }
}

void fir8_strided(cplx* y, cplx alpha, const double* taps, const cplx* src, std::size_t stride,
                  std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx* s = src + j * stride;
        double sr = 0.0, si = 0.0;
        for (int k = 0; k < 8; ++k) {
            sr += taps[k] * s[k].real();
            si += taps[k] * s[k].imag();
        }
        y[j] = {y[j].real() + ar * sr - ai * si, y[j].imag() + ar * si + ai * sr};
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", cmul, rscale, weighted_norm2, dot_conj, axpy,
                                   fir8_strided};
    return table;
}

}  // namespace nlsphase::simd
