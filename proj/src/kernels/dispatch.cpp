// Runtime backend selection for the kernel table.

#include "brds/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "brds/common.hpp"

namespace brds::kernels {
namespace {

const KernelTable* pick_default() {
    if (const char* env = std::getenv("BRDS_KERNELS")) {
        std::string want(env);
        if (want == "scalar") return &scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
        if (want == "avx2" && cpu_has_avx2()) return &avx2_table();
#endif
        // unknown or unsupported request: fall through to autodetect
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &avx2_table();
#endif
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> s{pick_default()};
    return s;
}

} // namespace

const KernelTable& active() {
    return *slot().load(std::memory_order_relaxed);
}

void set_backend(const std::string& name) {
    if (name == "scalar") {
        slot().store(&scalar_table(), std::memory_order_relaxed);
        return;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        config_check(cpu_has_avx2(), "avx2 kernels not supported on this CPU");
        slot().store(&avx2_table(), std::memory_order_relaxed);
        return;
    }
#endif
    throw ConfigError("unknown kernel backend: " + name);
}

} // namespace brds::kernels
