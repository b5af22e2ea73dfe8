#include "evstudy/kernels.hpp"
#include "evstudy/philox.hpp"

namespace evstudy::kernels {

void fill_cars_scalar(const ScenarioKernelArgs& args, std::uint64_t first, std::span<double> out) {
    const auto key = philox_key(args.key);
    const std::uint32_t k = args.draws_k;
    const double* growth = args.growth;

    if (args.mode == DrawMode::iid) {
        const std::uint32_t range = args.pool_size;
        for (std::size_t s = 0; s < out.size(); ++s) {
            const std::uint64_t scenario = first + s;
            const auto lo = static_cast<std::uint32_t>(scenario);
            const auto hi = static_cast<std::uint32_t>(scenario >> 32);
            double product = 1.0;
            for (std::uint32_t block = 0; block * 4 < k; ++block) {
                const auto words = philox4x32_10({lo, hi, block, 0u}, key);
                for (std::uint32_t j = 0; j < 4 && block * 4 + j < k; ++j)
                    product *= growth[bounded_index(words[j], range)];
            }
            out[s] = product - 1.0;
        }
    } else {
        const std::uint32_t range = args.pool_size - k + 1;
        for (std::size_t s = 0; s < out.size(); ++s) {
            const std::uint64_t scenario = first + s;
            const auto words = philox4x32_10(
                {static_cast<std::uint32_t>(scenario), static_cast<std::uint32_t>(scenario >> 32), 0u, 0u}, key);
            const double* run = growth + bounded_index(words[0], range);
            double product = 1.0;
            for (std::uint32_t j = 0; j < k; ++j) product *= run[j];
            out[s] = product - 1.0;
        }
    }
}

}  // namespace evstudy::kernels
