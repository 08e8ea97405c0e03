#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants
// (AVX2 on x86-64, NEON on AArch64) chosen at runtime.
//
// Every variant is bit-identical to the scalar reference: draws are integer
// hashes, and floating reductions use a fixed 4-lane striped order
// (element i accumulates into lane i % 4, lanes combine as (l0+l1)+(l2+l3)).
// Output therefore never depends on which variant ran.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace searchnet::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

/// Variants usable on this machine, scalar first.
std::vector<Isa> available_isas();

/// Variant currently used by the public entry points.
Isa active_isa() noexcept;

/// Pin a variant (tests and benchmarks). Throws ParameterError if the CPU or
/// build does not support it.
void force_isa(Isa isa);

/// Restore automatic selection.
void reset_isa() noexcept;

/// out[i] = counter_uniform(key, ids[i]) < p
void bernoulli_mask(std::uint64_t key, std::span<const std::uint32_t> ids, double p,
                    std::span<std::uint8_t> out);

/// out[i] = counter_uniform(key, ids[i])
void uniforms(std::uint64_t key, std::span<const std::uint32_t> ids, std::span<double> out);

/// Striped-order dot product.
double dot(std::span<const double> a, std::span<const double> b);

struct Moments {
    double sum_x = 0.0;
    double sum_y = 0.0;
    double sum_xx = 0.0;
    double sum_xy = 0.0;
    double sum_yy = 0.0;
    std::size_t n = 0;
};

/// Sums needed for a least-squares line through (x[i], y[i]).
Moments regression_moments(std::span<const double> x, std::span<const double> y);

/// Column-wise sum[i] += x[i], sum_sq[i] += x[i] * x[i].
void accumulate_columns(std::span<const double> x, std::span<double> sum,
                        std::span<double> sum_sq);

}  // namespace searchnet::kernels
