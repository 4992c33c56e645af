#include "driftwatch/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace driftwatch::simd {

namespace {

std::atomic<bool> g_force_scalar{false};

bool env_forces_scalar() {
    static const bool forced = [] {
        const char* v = std::getenv("DRIFTWATCH_SIMD");
        return v != nullptr && std::strcmp(v, "scalar") == 0;
    }();
    return forced;
}

inline bool use_avx2() {
#if DRIFTWATCH_X86_64
    if (g_force_scalar.load(std::memory_order_relaxed) || env_forces_scalar()) return false;
    return avx2::supported();
#else
    return false;
#endif
}

}  // namespace

Isa active_isa() { return use_avx2() ? Isa::Avx2 : Isa::Scalar; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Scalar: return "scalar";
    }
    return "unknown";
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

#if DRIFTWATCH_X86_64
#define DRIFTWATCH_DISPATCH(call) \
    do {                          \
        if (use_avx2()) return avx2::call; \
        return scalar::call;      \
    } while (0)
#else
#define DRIFTWATCH_DISPATCH(call) return scalar::call
#endif

double sum(const double* x, std::size_t n) { DRIFTWATCH_DISPATCH(sum(x, n)); }

double dot(const double* x, const double* y, std::size_t n) { DRIFTWATCH_DISPATCH(dot(x, y, n)); }

double max_value(const double* x, std::size_t n) { DRIFTWATCH_DISPATCH(max_value(x, n)); }

void axpy(double* acc, double a, const double* x, std::size_t n) {
    DRIFTWATCH_DISPATCH(axpy(acc, a, x, n));
}

void exp_apply(double* out, const double* x, std::size_t n) {
    DRIFTWATCH_DISPATCH(exp_apply(out, x, n));
}

void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n) {
    DRIFTWATCH_DISPATCH(accumulate_scaled_sqdiff(acc, x, center, inv_scale, n));
}

void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n) {
    DRIFTWATCH_DISPATCH(face_flux(faces, p, drift, diffusion, inv_dx, n));
}

void flux_update(double* p, const double* faces, double coef, std::size_t n) {
    DRIFTWATCH_DISPATCH(flux_update(p, faces, coef, n));
}

#undef DRIFTWATCH_DISPATCH

}  // namespace driftwatch::simd
