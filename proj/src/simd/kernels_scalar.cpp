#include "driftwatch/simd.hpp"

#include <cmath>

namespace driftwatch::simd::scalar {

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double max_value(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
}

void axpy(double* acc, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += a * x[i];
}

void exp_apply(double* out, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void accumulate_scaled_sqdiff(double* acc, const double* x, double center,
                              double inv_scale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (x[i] - center) * inv_scale;
        acc[i] += d * d;
    }
}

void face_flux(double* faces, const double* p, const double* drift,
               const double* diffusion, double inv_dx, std::size_t n) {
    faces[0] = 0.0;
    faces[n] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double advect = 0.5 * (drift[i - 1] * p[i - 1] + drift[i] * p[i]);
        const double diffuse = (diffusion[i] * p[i] - diffusion[i - 1] * p[i - 1]) * inv_dx;
        faces[i] = advect - diffuse;
    }
}

void flux_update(double* p, const double* faces, double coef, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) p[i] -= coef * (faces[i + 1] - faces[i]);
}

}  // namespace driftwatch::simd::scalar
