// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>

#include "fcd/kernels/kernels.hpp"

namespace fcd::kernels {

#if defined(__x86_64__) || defined(__i386__)
const Kernels* avx2_table(); // avx2.cpp
#endif
#if defined(__aarch64__)
const Kernels* neon_table(); // neon.cpp
#endif

const Kernels* avx2_kernels() {
#if defined(__x86_64__) || defined(__i386__)
    static const Kernels* k = __builtin_cpu_supports("avx2") ? avx2_table() : nullptr;
    return k;
#else
    return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(__aarch64__)
    return neon_table();
#else
    return nullptr;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        if (const char* env = std::getenv("FCD_SIMD")) {
            if (std::strcmp(env, "scalar") == 0) return &scalar_kernels();
            if (std::strcmp(env, "avx2") == 0 && avx2_kernels()) return avx2_kernels();
            if (std::strcmp(env, "neon") == 0 && neon_kernels()) return neon_kernels();
            // Unknown or unavailable request falls through to auto-detection.
        }
        if (avx2_kernels()) return avx2_kernels();
        if (neon_kernels()) return neon_kernels();
        return &scalar_kernels();
    }();
    return *chosen;
}

std::vector<const Kernels*> available_kernels() {
    std::vector<const Kernels*> out{&scalar_kernels()};
    if (avx2_kernels()) out.push_back(avx2_kernels());
    if (neon_kernels()) out.push_back(neon_kernels());
    return out;
}

} // namespace fcd::kernels
