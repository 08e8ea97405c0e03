#pragma once

// Raw-pointer kernel signatures shared by every ISA translation unit.
// Kept free of C++ library headers so each variant can be compiled in
// isolation (the NEON unit is syntax-checked on x86 hosts).

#include <stddef.h>
#include <stdint.h>

namespace searchnet::kernels::detail {

struct KernelTable {
    void (*bernoulli_mask)(uint64_t key, const uint32_t* ids, size_t n, double p, uint8_t* out);
    void (*uniforms)(uint64_t key, const uint32_t* ids, size_t n, double* out);
    double (*dot)(const double* a, const double* b, size_t n);
    // out = {sum_x, sum_y, sum_xx, sum_xy, sum_yy}
    void (*moments)(const double* x, const double* y, size_t n, double* out);
    void (*accumulate)(const double* x, size_t n, double* sum, double* sum_sq);
};

extern const KernelTable scalar_table;
#if defined(SEARCHNET_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(SEARCHNET_HAVE_NEON)
extern const KernelTable neon_table;
#endif

inline constexpr uint64_t kHashGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr uint64_t kFmixC1 = 0xFF51AFD7ED558CCDULL;
inline constexpr uint64_t kFmixC2 = 0xC4CEB9FE1A85EC53ULL;
inline constexpr uint64_t kUnitExponent = 0x3FF0000000000000ULL;

}  // namespace searchnet::kernels::detail
