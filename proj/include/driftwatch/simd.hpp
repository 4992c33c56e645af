#pragma once

// Runtime-dispatched arithmetic kernels.
//
// Every kernel exists in a scalar reference form (driftwatch::simd::scalar)
// and, on x86-64, an AVX2+FMA form (driftwatch::simd::avx2). The top-level
// functions dispatch to the widest variant the running CPU supports; the
// scalar path can be forced with force_scalar() or by setting the
// environment variable DRIFTWATCH_SIMD=scalar before first use.
//
// The two paths are equivalence-tested, not bit-identical: vector variants
// reassociate reductions and use a polynomial exp, so results may differ
// from the scalar path by a few ulps. Within one process the selected path
// is fixed, so repeated runs are bit-reproducible.

#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#define DRIFTWATCH_X86_64 1
#else
#define DRIFTWATCH_X86_64 0
#endif

namespace driftwatch::simd {

enum class Isa { Scalar, Avx2 };

// ISA the dispatcher currently resolves to.
Isa active_isa();
const char* isa_name(Isa isa);

// Test/debug hook: pin all dispatched kernels to the scalar path.
void force_scalar(bool on);

namespace scalar {

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double max_value(const double* x, std::size_t n);  // n >= 1
void axpy(double* acc, double a, const double* x, std::size_t n);
void exp_apply(double* out, const double* x, std::size_t n);
// acc[i] += ((x[i] - center) * inv_scale)^2
void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n);
// Interior face currents of a 1-D drift-diffusion field, faces[0..n]:
//   faces[i] = 0.5*(a[i-1]p[i-1] + a[i]p[i]) - (D[i]p[i] - D[i-1]p[i-1]) * inv_dx
// with faces[0] = faces[n] = 0 (zero-flux boundaries).
void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n);
// p[i] -= coef * (faces[i+1] - faces[i])
void flux_update(double* p, const double* faces, double coef, std::size_t n);

}  // namespace scalar

#if DRIFTWATCH_X86_64
namespace avx2 {

// True when the running CPU supports AVX2+FMA. Calling the kernels below
// on a CPU without support is undefined.
bool supported();

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double max_value(const double* x, std::size_t n);
void axpy(double* acc, double a, const double* x, std::size_t n);
void exp_apply(double* out, const double* x, std::size_t n);
void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n);
void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n);
void flux_update(double* p, const double* faces, double coef, std::size_t n);

}  // namespace avx2
#endif

// Dispatched entry points.
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double max_value(const double* x, std::size_t n);
void axpy(double* acc, double a, const double* x, std::size_t n);
void exp_apply(double* out, const double* x, std::size_t n);
void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n);
void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n);
void flux_update(double* p, const double* faces, double coef, std::size_t n);

}  // namespace driftwatch::simd
