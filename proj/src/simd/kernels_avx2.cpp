// AVX2/FMA variants. Functions carry target attributes so no other code in
// the library is compiled for AVX2.
#include "nlsphase/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define NLSPHASE_HAVE_X86 1
#endif

namespace nlsphase::simd {

#ifdef NLSPHASE_HAVE_X86
namespace {

#define AVX2_FN __attribute__((target("avx2,fma")))

// Two interleaved complex numbers per register: [re0 im0 re1 im1].
AVX2_FN inline __m256d cmul_pd(__m256d x, __m256d m) {
    const __m256d mr = _mm256_movedup_pd(m);           // [c0 c0 c1 c1]
    const __m256d mi = _mm256_permute_pd(m, 0xF);      // [d0 d0 d1 d1]
    const __m256d xs = _mm256_permute_pd(x, 0x5);      // [b0 a0 b1 a1]
    return _mm256_fmaddsub_pd(x, mr, _mm256_mul_pd(xs, mi));
}

AVX2_FN inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

AVX2_FN void cmul(cplx* x, const cplx* m, std::size_t n) {
    auto* xp = reinterpret_cast<double*>(x);
    const auto* mp = reinterpret_cast<const double*>(m);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        const __m256d mv = _mm256_loadu_pd(mp + 2 * i);
        _mm256_storeu_pd(xp + 2 * i, cmul_pd(xv, mv));
    }
    for (; i < n; ++i) {
        const double a = x[i].real(), b = x[i].imag();
        const double c = m[i].real(), d = m[i].imag();
        x[i] = {a * c - b * d, a * d + b * c};
    }
}

AVX2_FN void rscale(cplx* x, const double* w, std::size_t n) {
    auto* xp = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m128d w2 = _mm_loadu_pd(w + i);
        const __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
        _mm256_storeu_pd(xp + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(xp + 2 * i), wv));
    }
    for (; i < n; ++i) x[i] *= w[i];
}

AVX2_FN double weighted_norm2(const cplx* x, const double* w, std::size_t n) {
    const auto* xp = reinterpret_cast<const double*>(x);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    if (w) {
        for (; i + 4 <= n; i += 4) {
            const __m256d a = _mm256_loadu_pd(xp + 2 * i);
            const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4);
            const __m128d w01 = _mm_loadu_pd(w + i);
            const __m128d w23 = _mm_loadu_pd(w + i + 2);
            const __m256d wa = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w01), 0x50);
            const __m256d wb = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w23), 0x50);
            acc0 = _mm256_fmadd_pd(_mm256_mul_pd(a, a), wa, acc0);
            acc1 = _mm256_fmadd_pd(_mm256_mul_pd(b, b), wb, acc1);
        }
    } else {
        for (; i + 4 <= n; i += 4) {
            const __m256d a = _mm256_loadu_pd(xp + 2 * i);
            const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4);
            acc0 = _mm256_fmadd_pd(a, a, acc0);
            acc1 = _mm256_fmadd_pd(b, b, acc1);
        }
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double a2 = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        s += w ? w[i] * a2 : a2;
    }
    return s;
}

AVX2_FN cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
    const auto* ap = reinterpret_cast<const double*>(a);
    const auto* bp = reinterpret_cast<const double*>(b);
    // re += ar*br + ai*bi ; im += ai*br - ar*bi
    __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        acc_re = _mm256_fmadd_pd(av, bv, acc_re);                         // [ar br, ai bi]
        acc_im = _mm256_fmadd_pd(av, _mm256_permute_pd(bv, 0x5), acc_im);  // [ar bi, ai br]
    }
    alignas(32) double r[4], m[4];
    _mm256_store_pd(r, acc_re);
    _mm256_store_pd(m, acc_im);
    double re = (r[0] + r[1]) + (r[2] + r[3]);
    double im = (m[1] - m[0]) + (m[3] - m[2]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

AVX2_FN void axpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
    auto* yp = reinterpret_cast<double*>(y);
    const auto* xp = reinterpret_cast<const double*>(x);
    const __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), cmul_pd(xv, al)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

AVX2_FN void fir8_strided(cplx* y, cplx alpha, const double* taps, const cplx* src,
                          std::size_t stride, std::size_t n) {
    const __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
    __m256d t[4];
    for (int k = 0; k < 4; ++k)
        t[k] = _mm256_setr_pd(taps[2 * k], taps[2 * k], taps[2 * k + 1], taps[2 * k + 1]);
    for (std::size_t j = 0; j < n; ++j) {
        const auto* s = reinterpret_cast<const double*>(src + j * stride);
        __m256d acc = _mm256_mul_pd(t[0], _mm256_loadu_pd(s));
        acc = _mm256_fmadd_pd(t[1], _mm256_loadu_pd(s + 4), acc);
        acc = _mm256_fmadd_pd(t[2], _mm256_loadu_pd(s + 8), acc);
        acc = _mm256_fmadd_pd(t[3], _mm256_loadu_pd(s + 12), acc);
        const __m128d sum = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
        const __m128d prod = _mm256_castpd256_pd128(cmul_pd(_mm256_castpd128_pd256(sum), al));
        auto* yp = reinterpret_cast<double*>(y + j);
        _mm_storeu_pd(yp, _mm_add_pd(_mm_loadu_pd(yp), prod));
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{"avx2", cmul, rscale, weighted_norm2, dot_conj, axpy,
                                   fir8_strided};
    return ok ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace nlsphase::simd
