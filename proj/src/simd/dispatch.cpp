#include <cstdlib>
#include <string_view>

#include "nlsphase/simd/kernels.hpp"

namespace nlsphase::simd {

const KernelTable& kernels() {
    static const KernelTable& selected = [&]() -> const KernelTable& {
        const char* env = std::getenv("NLSPHASE_ISA");
        if (env && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return selected;
}

}  // namespace nlsphase::simd
