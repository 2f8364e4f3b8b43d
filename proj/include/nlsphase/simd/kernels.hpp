#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace nlsphase::simd {

using cplx = std::complex<double>;

// Pointwise loops shared by the spectral solver, the flow quadrature and the
// norm reductions. Every entry has a scalar reference implementation.
struct KernelTable {
    std::string_view name;
    // x[i] *= m[i]
    void (*cmul)(cplx* x, const cplx* m, std::size_t n);
    // x[i] *= w[i]
    void (*rscale)(cplx* x, const double* w, std::size_t n);
    // sum_i w[i] |x[i]|^2; w == nullptr means unit weights
    double (*weighted_norm2)(const cplx* x, const double* w, std::size_t n);
    // sum_i a[i] conj(b[i])
    cplx (*dot_conj)(const cplx* a, const cplx* b, std::size_t n);
    // y[i] += alpha x[i]
    void (*axpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
    // y[j] += alpha * sum_{k<8} taps[k] src[j*stride + k], j < n
    void (*fir8_strided)(cplx* y, cplx alpha, const double* taps, const cplx* src,
                         std::size_t stride, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();
// Runtime-selected table. NLSPHASE_ISA=scalar forces the reference path.
const KernelTable& kernels();

}  // namespace nlsphase::simd
