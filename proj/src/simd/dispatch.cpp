#include <atomic>
#include <cstdlib>
#include <string_view>

#include "mixea/simd.hpp"

namespace mixea::simd {

#if defined(MIXEA_HAVE_AVX2)
const Kernels& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MIXEA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels* initial_selection() {
    const Kernels* best = avx2_kernels();
    if (best == nullptr) best = &scalar_kernels();
    if (const char* env = std::getenv("MIXEA_SIMD")) {
        const std::string_view want{env};
        if (want == "scalar") return &scalar_kernels();
    }
    return best;
}

std::atomic<const Kernels*>& selected() {
    static std::atomic<const Kernels*> current{initial_selection()};
    return current;
}

}  // namespace

const Kernels* avx2_kernels() {
#if defined(MIXEA_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    if (supported) return &avx2_kernel_table();
#endif
    return nullptr;
}

const Kernels& active() { return *selected().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

bool set_backend(Backend backend) {
    const Kernels* table = backend == Backend::scalar ? &scalar_kernels() : avx2_kernels();
    if (table == nullptr) return false;
    selected().store(table, std::memory_order_release);
    return true;
}

const char* backend_name(Backend backend) { return backend == Backend::scalar ? "scalar" : "avx2"; }

}  // namespace mixea::simd
