// kernels.hpp
// Scenario CAR kernels. Each kernel fills out[s] with the compounded CAR of
// scenario (first + s); all variants are required to produce bit-identical
// output, so callers can pick any of them without changing results.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace evstudy {

enum class DrawMode {
    iid,    // k pool elements uniformly with replacement
    block,  // one uniformly placed run of k consecutive pool elements
};

std::string_view to_string(DrawMode mode) noexcept;
DrawMode parse_draw_mode(std::string_view text);

namespace kernels {

enum class Isa { scalar, avx2 };

struct ScenarioKernelArgs {
    const double* growth = nullptr;  // 1 + AR for every pool element
    std::uint32_t pool_size = 0;
    std::uint32_t draws_k = 0;
    DrawMode mode = DrawMode::iid;
    std::uint64_t key = 0;
};

using FillFn = void (*)(const ScenarioKernelArgs&, std::uint64_t first, std::span<double> out);

// Reference implementation; every other kernel is tested against it.
void fill_cars_scalar(const ScenarioKernelArgs& args, std::uint64_t first, std::span<double> out);

#if defined(EVSTUDY_HAVE_AVX2)
void fill_cars_avx2(const ScenarioKernelArgs& args, std::uint64_t first, std::span<double> out);
#endif

bool isa_available(Isa isa) noexcept;
Isa best_isa() noexcept;
std::vector<Isa> available_isas();
FillFn select(Isa isa);
std::string_view isa_name(Isa isa) noexcept;
Isa parse_isa(std::string_view text);

}  // namespace kernels
}  // namespace evstudy
