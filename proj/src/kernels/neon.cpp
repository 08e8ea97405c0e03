// NEON kernels (AArch64). Two 64-bit lanes per vector; reductions keep the
// 4-lane striped order by running two accumulators.

#include "kernels/kernel_table.hpp"

#include <arm_neon.h>

namespace searchnet::kernels::detail {
namespace {

inline uint64x2_t mullo64(uint64x2_t a, uint64x2_t b) {
    const uint32x2_t a_lo = vmovn_u64(a);
    const uint32x2_t a_hi = vshrn_n_u64(a, 32);
    const uint32x2_t b_lo = vmovn_u64(b);
    const uint32x2_t b_hi = vshrn_n_u64(b, 32);
    uint64x2_t cross = vmull_u32(a_hi, b_lo);
    cross = vmlal_u32(cross, a_lo, b_hi);
    return vaddq_u64(vmull_u32(a_lo, b_lo), vshlq_n_u64(cross, 32));
}

inline uint64x2_t fmix64(uint64x2_t h) {
    h = veorq_u64(h, vshrq_n_u64(h, 33));
    h = mullo64(h, vdupq_n_u64(kFmixC1));
    h = veorq_u64(h, vshrq_n_u64(h, 33));
    h = mullo64(h, vdupq_n_u64(kFmixC2));
    return veorq_u64(h, vshrq_n_u64(h, 33));
}

inline float64x2_t unit_from_ids(uint64x2_t key, const uint32_t* ids) {
    const uint64x2_t id = vmovl_u32(vld1_u32(ids));
    const uint64x2_t h = fmix64(vaddq_u64(key, mullo64(id, vdupq_n_u64(kHashGolden))));
    const uint64x2_t mant = vorrq_u64(vshrq_n_u64(h, 12), vdupq_n_u64(kUnitExponent));
    return vsubq_f64(vreinterpretq_f64_u64(mant), vdupq_n_f64(1.0));
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

void bernoulli_mask_neon(uint64_t key, const uint32_t* ids, size_t n, double p, uint8_t* out) {
    const uint64x2_t k = vdupq_n_u64(key);
    const float64x2_t threshold = vdupq_n_f64(p);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const uint64x2_t lt = vcltq_f64(unit_from_ids(k, ids + i), threshold);
        out[i] = static_cast<uint8_t>(vgetq_lane_u64(lt, 0) & 1);
        out[i + 1] = static_cast<uint8_t>(vgetq_lane_u64(lt, 1) & 1);
    }
    for (; i < n; ++i) out[i] = unit_scalar(key, ids[i]) < p ? 1 : 0;
}

void uniforms_neon(uint64_t key, const uint32_t* ids, size_t n, double* out) {
    const uint64x2_t k = vdupq_n_u64(key);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, unit_from_ids(k, ids + i));
    for (; i < n; ++i) out[i] = unit_scalar(key, ids[i]);
}

inline double combine(const double lane[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

// Lanes {0,1} live in `lo`, lanes {2,3} in `hi`.
struct Striped {
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);

    void store(double lane[4]) const {
        vst1q_f64(lane, lo);
        vst1q_f64(lane + 2, hi);
    }
};

double dot_neon(const double* a, const double* b, size_t n) {
    Striped acc;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc.lo = vaddq_f64(acc.lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc.hi = vaddq_f64(acc.hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double lane[4];
    acc.store(lane);
    for (; i < n; ++i) lane[i & 3] += a[i] * b[i];
    return combine(lane);
}

void moments_neon(const double* x, const double* y, size_t n, double* out) {
    Striped sx, sy, sxx, sxy, syy;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (size_t half = 0; half < 2; ++half) {
            const float64x2_t vx = vld1q_f64(x + i + 2 * half);
            const float64x2_t vy = vld1q_f64(y + i + 2 * half);
            float64x2_t& ax = half ? sx.hi : sx.lo;
            float64x2_t& ay = half ? sy.hi : sy.lo;
            float64x2_t& axx = half ? sxx.hi : sxx.lo;
            float64x2_t& axy = half ? sxy.hi : sxy.lo;
            float64x2_t& ayy = half ? syy.hi : syy.lo;
            ax = vaddq_f64(ax, vx);
            ay = vaddq_f64(ay, vy);
            axx = vaddq_f64(axx, vmulq_f64(vx, vx));
            axy = vaddq_f64(axy, vmulq_f64(vx, vy));
            ayy = vaddq_f64(ayy, vmulq_f64(vy, vy));
        }
    }
    double lx[4], ly[4], lxx[4], lxy[4], lyy[4];
    sx.store(lx);
    sy.store(ly);
    sxx.store(lxx);
    sxy.store(lxy);
    syy.store(lyy);
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

void accumulate_neon(const double* x, size_t n, double* sum, double* sum_sq) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(x + i);
        vst1q_f64(sum + i, vaddq_f64(vld1q_f64(sum + i), v));
        vst1q_f64(sum_sq + i, vaddq_f64(vld1q_f64(sum_sq + i), vmulq_f64(v, v)));
    }
    for (; i < n; ++i) {
        sum[i] += x[i];
        sum_sq[i] += x[i] * x[i];
    }
}

}  // namespace

const KernelTable neon_table = {
    bernoulli_mask_neon, uniforms_neon, dot_neon, moments_neon, accumulate_neon,
};

}  // namespace searchnet::kernels::detail
