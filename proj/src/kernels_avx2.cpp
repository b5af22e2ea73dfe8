// AVX2 scenario kernel: eight scenarios per iteration. Philox runs on eight
// 32-bit lanes, pool lookups use 4-wide double gathers, and the product is
// accumulated in the same order as the scalar kernel so results match bit
// for bit. Built with -mavx2 and only called after a runtime CPU check.

#include <immintrin.h>

#include "evstudy/kernels.hpp"
#include "evstudy/philox.hpp"

namespace evstudy::kernels {
namespace {

constexpr std::size_t kLanes = 8;

// High 32 bits of the 32x32 -> 64 product, per lane.
inline __m256i mulhi_epu32(__m256i a, __m256i b) {
    const __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(a, b), 32);
    const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
    return _mm256_blend_epi32(even, odd, 0b10101010);
}

struct PhiloxLanes {
    __m256i w0, w1, w2, w3;
};

inline PhiloxLanes philox_lanes(__m256i c0, __m256i c1, __m256i c2, __m256i c3, PhiloxKey key) {
    using namespace philox_constants;
    const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kMul0));
    const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kMul1));
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < kRounds; ++round) {
        if (round > 0) {
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        const __m256i hi0 = mulhi_epu32(c0, m0);
        const __m256i lo0 = _mm256_mullo_epi32(c0, m0);
        const __m256i hi1 = mulhi_epu32(c2, m1);
        const __m256i lo1 = _mm256_mullo_epi32(c2, m1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi32(static_cast<int>(k0)));
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi32(static_cast<int>(k1)));
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
    }
    return {c0, c1, c2, c3};
}

inline void counters(std::uint64_t base, __m256i& lo, __m256i& hi) {
    alignas(32) std::uint32_t l[kLanes], h[kLanes];
    for (std::size_t i = 0; i < kLanes; ++i) {
        const std::uint64_t s = base + i;
        l[i] = static_cast<std::uint32_t>(s);
        h[i] = static_cast<std::uint32_t>(s >> 32);
    }
    lo = _mm256_load_si256(reinterpret_cast<const __m256i*>(l));
    hi = _mm256_load_si256(reinterpret_cast<const __m256i*>(h));
}

inline void multiply_gathered(const double* growth, __m256i index, __m256d& prod_lo, __m256d& prod_hi) {
    const __m256d g_lo = _mm256_i32gather_pd(growth, _mm256_castsi256_si128(index), 8);
    const __m256d g_hi = _mm256_i32gather_pd(growth, _mm256_extracti128_si256(index, 1), 8);
    prod_lo = _mm256_mul_pd(prod_lo, g_lo);
    prod_hi = _mm256_mul_pd(prod_hi, g_hi);
}

}  // namespace

void fill_cars_avx2(const ScenarioKernelArgs& args, std::uint64_t first, std::span<double> out) {
    const auto key = philox_key(args.key);
    const std::uint32_t k = args.draws_k;
    const double* growth = args.growth;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256i zero = _mm256_setzero_si256();

    const std::size_t full = out.size() - out.size() % kLanes;
    if (args.mode == DrawMode::iid) {
        const __m256i range = _mm256_set1_epi32(static_cast<int>(args.pool_size));
        for (std::size_t s = 0; s < full; s += kLanes) {
            __m256i lo, hi;
            counters(first + s, lo, hi);
            __m256d prod_lo = one, prod_hi = one;
            for (std::uint32_t block = 0; block * 4 < k; ++block) {
                const auto w = philox_lanes(lo, hi, _mm256_set1_epi32(static_cast<int>(block)), zero, key);
                const __m256i words[4] = {w.w0, w.w1, w.w2, w.w3};
                for (std::uint32_t j = 0; j < 4 && block * 4 + j < k; ++j)
                    multiply_gathered(growth, mulhi_epu32(words[j], range), prod_lo, prod_hi);
            }
            _mm256_storeu_pd(out.data() + s, _mm256_sub_pd(prod_lo, one));
            _mm256_storeu_pd(out.data() + s + 4, _mm256_sub_pd(prod_hi, one));
        }
    } else {
        const __m256i range = _mm256_set1_epi32(static_cast<int>(args.pool_size - k + 1));
        for (std::size_t s = 0; s < full; s += kLanes) {
            __m256i lo, hi;
            counters(first + s, lo, hi);
            const auto w = philox_lanes(lo, hi, zero, zero, key);
            const __m256i start = mulhi_epu32(w.w0, range);
            __m256d prod_lo = one, prod_hi = one;
            for (std::uint32_t j = 0; j < k; ++j)
                multiply_gathered(growth, _mm256_add_epi32(start, _mm256_set1_epi32(static_cast<int>(j))), prod_lo,
                                  prod_hi);
            _mm256_storeu_pd(out.data() + s, _mm256_sub_pd(prod_lo, one));
            _mm256_storeu_pd(out.data() + s + 4, _mm256_sub_pd(prod_hi, one));
        }
    }
    if (full < out.size()) fill_cars_scalar(args, first + full, out.subspan(full));
}

}  // namespace evstudy::kernels
