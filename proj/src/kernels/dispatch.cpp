#include "tomo/kernels.hpp"

#include <cstdlib>
#include <string>

namespace tomo::kernels {

#ifdef TOMO_HAVE_AVX2
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#ifdef TOMO_HAVE_AVX2
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (supported) return &avx2_table();
#endif
    return nullptr;
}

namespace {

const KernelTable& select() {
    const char* env = std::getenv("TOMO_SIMD");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace tomo::kernels
