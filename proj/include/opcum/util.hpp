#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <thread>

namespace opcum {

/// Internal parallelism cap: OPCUMULANT_THREADS if set, else the hardware
/// concurrency (at least 1).
inline unsigned thread_budget() {
    if (const char* env = std::getenv("OPCUMULANT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Uniform double in [-1, 1), derived from the standardized mt19937_64
/// stream so models are bit-identical for a fixed seed on every platform.
inline double uniform_pm1(std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
    return 2.0 * u - 1.0;
}

}  // namespace opcum
