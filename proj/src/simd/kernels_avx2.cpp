#include "driftwatch/simd.hpp"

#if DRIFTWATCH_X86_64

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace driftwatch::simd::avx2 {

bool supported() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
}

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_pd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_pd(m, _mm_unpackhi_pd(m, m)));
}

// exp(x) for 4 lanes, Cephes-style: x = n*ln2 + r with |r| <= ln2/2, e^r as a
// Pade rational in r^2, reconstruction via exponent-bit scaling. Accuracy is
// within a couple of ulps of std::exp. Inputs below the underflow threshold
// return 0 (no subnormal results); inputs above the overflow threshold return
// +inf.
inline __m256d exp4(__m256d x) {
    const __m256d kHi = _mm256_set1_pd(709.436);   // below log(DBL_MAX), n <= 1023
    const __m256d kLo = _mm256_set1_pd(-708.396);  // above log(DBL_MIN)
    const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000005e0);
    const __m256d kOne = _mm256_set1_pd(1.0);
    const __m256d kHalf = _mm256_set1_pd(0.5);

    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, kLo), kHi);

    // n = floor(x * log2(e) + 1/2), exact integer in double
    const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(xc, kLog2e, kHalf));

    // r = x - n*ln2, split ln2 for extra precision
    __m256d r = _mm256_fnmadd_pd(n, kC1, xc);
    r = _mm256_fnmadd_pd(n, kC2, r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d px = _mm256_fmadd_pd(kP0, rr, kP1);
    px = _mm256_fmadd_pd(px, rr, kP2);
    px = _mm256_mul_pd(px, r);

    __m256d qx = _mm256_fmadd_pd(kQ0, rr, kQ1);
    qx = _mm256_fmadd_pd(qx, rr, kQ2);
    qx = _mm256_fmadd_pd(qx, rr, kQ3);

    // e^r = 1 + 2 px / (qx - px)
    const __m256d er = _mm256_fmadd_pd(
        _mm256_set1_pd(2.0), _mm256_div_pd(px, _mm256_sub_pd(qx, px)), kOne);

    // scale by 2^n through the exponent field; |n| <= 1023 after clamping
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    __m256d res = _mm256_mul_pd(er, _mm256_castsi256_pd(bits));

    const __m256d underflow = _mm256_cmp_pd(x, kLo, _CMP_LT_OQ);
    res = _mm256_andnot_pd(underflow, res);
    const __m256d overflow = _mm256_cmp_pd(x, kHi, _CMP_GT_OQ);
    res = _mm256_blendv_pd(res, _mm256_set1_pd(std::numeric_limits<double>::infinity()), overflow);
    return res;
}

}  // namespace

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double max_value(const double* x, std::size_t n) {
    if (n < 4) return scalar::max_value(x, n);
    __m256d m = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
    double r = hmax(m);
    for (; i < n; ++i) r = x[i] > r ? x[i] : r;
    return r;
}

void axpy(double* acc, double a, const double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(acc + i));
        _mm256_storeu_pd(acc + i, r);
    }
    for (; i < n; ++i) acc[i] += a * x[i];
}

void exp_apply(double* out, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
    if (i < n) {
        double tail_in[4] = {0, 0, 0, 0};
        double tail_out[4];
        for (std::size_t j = i; j < n; ++j) tail_in[j - i] = x[j];
        _mm256_storeu_pd(tail_out, exp4(_mm256_loadu_pd(tail_in)));
        for (std::size_t j = i; j < n; ++j) out[j] = tail_out[j - i];
    }
}

void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(center);
    const __m256d sv = _mm256_set1_pd(inv_scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), cv), sv);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(acc + i)));
    }
    for (; i < n; ++i) {
        const double d = (x[i] - center) * inv_scale;
        acc[i] += d * d;
    }
}

void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n) {
    faces[0] = 0.0;
    faces[n] = 0.0;
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d idx = _mm256_set1_pd(inv_dx);
    std::size_t i = 1;
    for (; i + 4 <= n; i += 4) {
        const __m256d pl = _mm256_loadu_pd(p + i - 1);
        const __m256d pr = _mm256_loadu_pd(p + i);
        const __m256d al = _mm256_loadu_pd(drift + i - 1);
        const __m256d ar = _mm256_loadu_pd(drift + i);
        const __m256d dl = _mm256_loadu_pd(diffusion + i - 1);
        const __m256d dr = _mm256_loadu_pd(diffusion + i);
        const __m256d advect = _mm256_mul_pd(
            half, _mm256_fmadd_pd(al, pl, _mm256_mul_pd(ar, pr)));
        const __m256d diffuse = _mm256_mul_pd(
            idx, _mm256_fmsub_pd(dr, pr, _mm256_mul_pd(dl, pl)));
        _mm256_storeu_pd(faces + i, _mm256_sub_pd(advect, diffuse));
    }
    for (; i < n; ++i) {
        const double advect = 0.5 * (drift[i - 1] * p[i - 1] + drift[i] * p[i]);
        const double diffuse = (diffusion[i] * p[i] - diffusion[i - 1] * p[i - 1]) * inv_dx;
        faces[i] = advect - diffuse;
    }
}

void flux_update(double* p, const double* faces, double coef, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d df = _mm256_sub_pd(_mm256_loadu_pd(faces + i + 1), _mm256_loadu_pd(faces + i));
        _mm256_storeu_pd(p + i, _mm256_fnmadd_pd(cv, df, _mm256_loadu_pd(p + i)));
    }
    for (; i < n; ++i) p[i] -= coef * (faces[i + 1] - faces[i]);
}

}  // namespace driftwatch::simd::avx2

#endif  // DRIFTWATCH_X86_64
