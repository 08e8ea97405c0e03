// AVX2 kernels. Compiled with -mavx2 (no FMA) so products and sums round
// exactly like the scalar reference.

#include "kernels/kernel_table.hpp"

#include <immintrin.h>

namespace searchnet::kernels::detail {
namespace {

// Low 64 bits of a 64x64 product; AVX2 only has 32x32->64.
inline __m256i mullo64(__m256i a, __m256i b) {
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i a_hi_b = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
    const __m256i a_b_hi = _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32));
    const __m256i cross = _mm256_slli_epi64(_mm256_add_epi64(a_hi_b, a_b_hi), 32);
    return _mm256_add_epi64(lo, cross);
}

inline __m256i fmix64(__m256i h) {
    h = _mm256_xor_si256(h, _mm256_srli_epi64(h, 33));
    h = mullo64(h, _mm256_set1_epi64x(static_cast<long long>(kFmixC1)));
    h = _mm256_xor_si256(h, _mm256_srli_epi64(h, 33));
    h = mullo64(h, _mm256_set1_epi64x(static_cast<long long>(kFmixC2)));
    return _mm256_xor_si256(h, _mm256_srli_epi64(h, 33));
}

inline __m256d unit_from_ids(__m256i key, const uint32_t* ids) {
    const __m256i id = _mm256_cvtepu32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(ids)));
    const __m256i h = fmix64(_mm256_add_epi64(key, mullo64(id, _mm256_set1_epi64x(static_cast<long long>(kHashGolden)))));
    const __m256i mant = _mm256_or_si256(_mm256_srli_epi64(h, 12),
                                         _mm256_set1_epi64x(static_cast<long long>(kUnitExponent)));
    return _mm256_sub_pd(_mm256_castsi256_pd(mant), _mm256_set1_pd(1.0));
}

inline double unit_scalar(uint64_t key, uint32_t id) {
    uint64_t h = key + static_cast<uint64_t>(id) * kHashGolden;
    h ^= h >> 33;
    h *= kFmixC1;
    h ^= h >> 33;
    h *= kFmixC2;
    h ^= h >> 33;
    const uint64_t mant = (h >> 12) | kUnitExponent;
    double d;
    __builtin_memcpy(&d, &mant, sizeof d);
    return d - 1.0;
}

void bernoulli_mask_avx2(uint64_t key, const uint32_t* ids, size_t n, double p, uint8_t* out) {
    const __m256i k = _mm256_set1_epi64x(static_cast<long long>(key));
    const __m256d threshold = _mm256_set1_pd(p);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const int bits = _mm256_movemask_pd(_mm256_cmp_pd(unit_from_ids(k, ids + i), threshold, _CMP_LT_OQ));
        out[i] = static_cast<uint8_t>(bits & 1);
        out[i + 1] = static_cast<uint8_t>((bits >> 1) & 1);
        out[i + 2] = static_cast<uint8_t>((bits >> 2) & 1);
        out[i + 3] = static_cast<uint8_t>((bits >> 3) & 1);
    }
    for (; i < n; ++i) out[i] = unit_scalar(key, ids[i]) < p ? 1 : 0;
}

void uniforms_avx2(uint64_t key, const uint32_t* ids, size_t n, double* out) {
    const __m256i k = _mm256_set1_epi64x(static_cast<long long>(key));
    size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, unit_from_ids(k, ids + i));
    for (; i < n; ++i) out[i] = unit_scalar(key, ids[i]);
}

inline double combine(const double lane[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double lane[4];
    _mm256_storeu_pd(lane, acc);
    for (; i < n; ++i) lane[i & 3] += a[i] * b[i];
    return combine(lane);
}

void moments_avx2(const double* x, const double* y, size_t n, double* out) {
    __m256d sx = _mm256_setzero_pd(), sy = sx, sxx = sx, sxy = sx, syy = sx;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        sx = _mm256_add_pd(sx, vx);
        sy = _mm256_add_pd(sy, vy);
        sxx = _mm256_add_pd(sxx, _mm256_mul_pd(vx, vx));
        sxy = _mm256_add_pd(sxy, _mm256_mul_pd(vx, vy));
        syy = _mm256_add_pd(syy, _mm256_mul_pd(vy, vy));
    }
    double lx[4], ly[4], lxx[4], lxy[4], lyy[4];
    _mm256_storeu_pd(lx, sx);
    _mm256_storeu_pd(ly, sy);
    _mm256_storeu_pd(lxx, sxx);
    _mm256_storeu_pd(lxy, sxy);
    _mm256_storeu_pd(lyy, syy);
    for (; i < n; ++i) {
        const size_t l = i & 3;
        lx[l] += x[i];
        ly[l] += y[i];
        lxx[l] += x[i] * x[i];
        lxy[l] += x[i] * y[i];
        lyy[l] += y[i] * y[i];
    }
    out[0] = combine(lx);
    out[1] = combine(ly);
    out[2] = combine(lxx);
    out[3] = combine(lxy);
    out[4] = combine(lyy);
}

void accumulate_avx2(const double* x, size_t n, double* sum, double* sum_sq) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(sum + i, _mm256_add_pd(_mm256_loadu_pd(sum + i), v));
        _mm256_storeu_pd(sum_sq + i, _mm256_add_pd(_mm256_loadu_pd(sum_sq + i), _mm256_mul_pd(v, v)));
    }
    for (; i < n; ++i) {
        sum[i] += x[i];
        sum_sq[i] += x[i] * x[i];
    }
}

}  // namespace

const KernelTable avx2_table = {
    bernoulli_mask_avx2, uniforms_avx2, dot_avx2, moments_avx2, accumulate_avx2,
};

}  // namespace searchnet::kernels::detail
