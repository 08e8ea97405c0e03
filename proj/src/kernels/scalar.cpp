// Scalar reference kernels. The SIMD variants are tested for bit equality
// against these.

#include "kernels/kernel_table.hpp"

#include "searchnet/rng.hpp"

namespace searchnet::kernels::detail {
namespace {

void bernoulli_mask_scalar(uint64_t key, const uint32_t* ids, size_t n, double p, uint8_t* out) {
    for (size_t i = 0; i < n; ++i) out[i] = counter_uniform(key, ids[i]) < p ? 1 : 0;
}

void uniforms_scalar(uint64_t key, const uint32_t* ids, size_t n, double* out) {
    for (size_t i = 0; i < n; ++i) out[i] = counter_uniform(key, ids[i]);
}

inline double combine(const double lane[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

double dot_scalar(const double* a, const double* b, size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (size_t i = 0; i < n; ++i) lane[i & 3] += a[i] * b[i];
    return combine(lane);
}

void moments_scalar(const double* x, const double* y, size_t n, double* out) {
    double sx[4] = {}, sy[4] = {}, sxx[4] = {}, sxy[4] = {}, syy[4] = {};
    for (size_t i = 0; i < n; ++i) {
        const size_t l = i & 3;
        sx[l] += x[i];
        sy[l] += y[i];
        sxx[l] += x[i] * x[i];
        sxy[l] += x[i] * y[i];
        syy[l] += y[i] * y[i];
    }
    out[0] = combine(sx);
    out[1] = combine(sy);
    out[2] = combine(sxx);
    out[3] = combine(sxy);
    out[4] = combine(syy);
}

void accumulate_scalar(const double* x, size_t n, double* sum, double* sum_sq) {
    for (size_t i = 0; i < n; ++i) {
        sum[i] += x[i];
        sum_sq[i] += x[i] * x[i];
    }
}

}  // namespace

const KernelTable scalar_table = {
    bernoulli_mask_scalar, uniforms_scalar, dot_scalar, moments_scalar, accumulate_scalar,
};

}  // namespace searchnet::kernels::detail
