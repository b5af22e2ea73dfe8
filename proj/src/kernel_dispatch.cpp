#include <stdexcept>
#include <string>

#include "evstudy/kernels.hpp"

namespace evstudy {

std::string_view to_string(DrawMode mode) noexcept { return mode == DrawMode::iid ? "iid" : "block"; }

DrawMode parse_draw_mode(std::string_view text) {
    if (text == "iid") return DrawMode::iid;
    if (text == "block") return DrawMode::block;
    throw std::invalid_argument("unknown draw mode '" + std::string(text) + "' (expected iid or block)");
}

namespace kernels {

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(EVSTUDY_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa best_isa() noexcept { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

std::vector<Isa> available_isas() {
    std::vector<Isa> out{Isa::scalar};
    if (isa_available(Isa::avx2)) out.push_back(Isa::avx2);
    return out;
}

FillFn select(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("kernel '" + std::string(isa_name(isa)) + "' not available");
#if defined(EVSTUDY_HAVE_AVX2)
    if (isa == Isa::avx2) return &fill_cars_avx2;
#endif
    return &fill_cars_scalar;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view text) {
    if (text == "scalar") return Isa::scalar;
    if (text == "avx2") return Isa::avx2;
    throw std::invalid_argument("unknown kernel '" + std::string(text) + "' (expected scalar or avx2)");
}

}  // namespace kernels
}  // namespace evstudy
