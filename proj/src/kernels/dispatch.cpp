#include "searchnet/kernels.hpp"

#include <atomic>

#include "kernels/kernel_table.hpp"
#include "searchnet/error.hpp"

namespace searchnet::kernels {
namespace {

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(SEARCHNET_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(SEARCHNET_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const detail::KernelTable& table_for(Isa isa) noexcept {
    switch (isa) {
#if defined(SEARCHNET_HAVE_AVX2)
    case Isa::Avx2:
        return detail::avx2_table;
#endif
#if defined(SEARCHNET_HAVE_NEON)
    case Isa::Neon:
        return detail::neon_table;
#endif
    default:
        return detail::scalar_table;
    }
}

Isa best_isa() noexcept {
    if (cpu_supports(Isa::Avx2)) return Isa::Avx2;
    if (cpu_supports(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

std::atomic<Isa> g_active{best_isa()};

const detail::KernelTable& active() noexcept { return table_for(g_active.load(std::memory_order_relaxed)); }

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ParameterError(std::string(what) + ": span sizes differ");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
        if (cpu_supports(isa)) out.push_back(isa);
    return out;
}

Isa active_isa() noexcept { return g_active.load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (!cpu_supports(isa)) throw ParameterError("kernel variant not available: " + std::string(isa_name(isa)));
    g_active.store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { g_active.store(best_isa(), std::memory_order_relaxed); }

void bernoulli_mask(std::uint64_t key, std::span<const std::uint32_t> ids, double p,
                    std::span<std::uint8_t> out) {
    require_same_size(ids.size(), out.size(), "bernoulli_mask");
    active().bernoulli_mask(key, ids.data(), ids.size(), p, out.data());
}

void uniforms(std::uint64_t key, std::span<const std::uint32_t> ids, std::span<double> out) {
    require_same_size(ids.size(), out.size(), "uniforms");
    active().uniforms(key, ids.data(), ids.size(), out.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    return active().dot(a.data(), b.data(), a.size());
}

Moments regression_moments(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "regression_moments");
    double out[5];
    active().moments(x.data(), y.data(), x.size(), out);
    return Moments{out[0], out[1], out[2], out[3], out[4], x.size()};
}

void accumulate_columns(std::span<const double> x, std::span<double> sum, std::span<double> sum_sq) {
    require_same_size(x.size(), sum.size(), "accumulate_columns");
    require_same_size(x.size(), sum_sq.size(), "accumulate_columns");
    active().accumulate(x.data(), x.size(), sum.data(), sum_sq.data());
}

}  // namespace searchnet::kernels
