// AVX2 kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here runs unless CPUID reports AVX2 support.

#include "logconvex/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define LOGCONVEX_X86 1
#else
#define LOGCONVEX_X86 0
#endif

#if LOGCONVEX_X86

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace logconvex::simd::detail {

namespace avx2 {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

static double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

static double nrm2sq(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

static double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

static double max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(mask, _mm256_loadu_pd(x + i)));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    double m = _mm_cvtsd_f64(_mm_max_sd(lo, sh));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

static double weighted_abs2_sum(const double* w, const double* z, std::size_t n) {
    // z interleaved (re,im): 4 complex entries per iteration.
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d z0 = _mm256_loadu_pd(z + 2 * i);       // re0 im0 re1 im1
        __m256d z1 = _mm256_loadu_pd(z + 2 * i + 4);   // re2 im2 re3 im3
        __m256d sq = _mm256_hadd_pd(_mm256_mul_pd(z0, z0), _mm256_mul_pd(z1, z1));
        // sq = (|z0|², |z2|², |z1|², |z3|²); permute w to match.
        __m256d wv = _mm256_permute4x64_pd(_mm256_loadu_pd(w + i), 0xD8);
        acc = _mm256_fmadd_pd(wv, sq, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double re = z[2 * i], im = z[2 * i + 1];
        s += w[i] * (re * re + im * im);
    }
    return s;
}

static double sq_norm4(const double* const* comps, int ncomp, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d q = _mm256_setzero_pd();
        for (int c = 0; c < ncomp; ++c) {
            __m256d v = _mm256_loadu_pd(comps[c] + i);
            q = _mm256_fmadd_pd(v, v, q);
        }
        acc = _mm256_fmadd_pd(q, q, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double q = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            const double v = comps[c][i];
            q += v * v;
        }
        s += q * q;
    }
    return s;
}

static void axpy(double a, const double* x, double* y, std::size_t n) {
    // unfused mul+add: bit-identical to the scalar reference per element
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(av, _mm256_loadu_pd(x + i)),
                                              _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

static void scale(double a, double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

static void mul(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

// exp on 4 lanes: range reduction x = k·ln2 + r, e^x = 2^k · P(r).
// Degree-6 minimax-style polynomial (Cephes coefficients); ~1-2 ulp,
// bounded by the kernel equivalence tests.
inline __m256d exp_pd(__m256d x) {
    const __m256d max_x = _mm256_set1_pd(708.0);
    const __m256d min_x = _mm256_set1_pd(-708.0);
    x = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    // e^r = 1 + 2r·P(r²)/(Q(r²) − r·P(r²))  — Cephes rational form.
    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

    __m256d r2 = _mm256_mul_pd(r, r);
    __m256d p = _mm256_fmadd_pd(_mm256_fmadd_pd(p0, r2, p1), r2, p2);
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_fmadd_pd(q0, r2, q1), r2, q2), r2, q3);
    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // scale by 2^k through the exponent bits
    __m128i ki = _mm256_cvtpd_epi32(k);
    __m256i ki64 = _mm256_cvtepi32_epi64(ki);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

static void vexp(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = std::exp(x[i]);
}

static void exp_scale(double s, const double* w, const double* y, double* out,
                      std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = exp_pd(_mm256_mul_pd(sv, _mm256_loadu_pd(w + i)));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(e, _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = std::exp(s * w[i]) * y[i];
}

}  // namespace avx2

const KernelTable* avx2_table() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const KernelTable t = {
        avx2::dot,  avx2::nrm2sq, avx2::sum, avx2::max_abs,
        avx2::weighted_abs2_sum, avx2::sq_norm4,
        avx2::axpy, avx2::scale,  avx2::mul, avx2::vexp,
        avx2::exp_scale,
    };
    return &t;
}

}  // namespace logconvex::simd::detail

#else  // !LOGCONVEX_X86

namespace logconvex::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace logconvex::simd::detail

#endif
