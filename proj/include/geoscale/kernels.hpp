#pragma once

#include <cstddef>

// Data-parallel inner loops used by the feature pipeline and the metric
// estimator. Each kernel has a scalar reference implementation plus SIMD
// variants selected once at startup (override with GEOSCALE_SIMD=scalar|avx2|neon).
// All variants are equivalence-tested against the scalar reference.

namespace geoscale::kernels {

enum class SimdLevel { scalar = 0, avx2 = 1, neon = 2 };

const char* level_name(SimdLevel level);

// Level chosen at startup from CPU capabilities (or the env override).
SimdLevel active_level();

// Re-points the dispatch table; throws Error(validation) if the level is
// not available on this machine. Intended for tests.
void set_level(SimdLevel level);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);

// Second-moment accumulation gated by an axis-aligned box, the hot loop of
// metric estimation: for every sample i with |px[i]-cx| <= rx and
// |py[i]-cy| <= ry, add vx^2, vx*vy, vy^2 into out[0..2]. out must be
// zeroed by the caller. Returns the number of samples inside the box.
std::size_t boxed_outer_accumulate_2d(const double* px, const double* py,
                                      const double* vx, const double* vy,
                                      std::size_t n, double cx, double cy,
                                      double rx, double ry, double* out);

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
std::size_t boxed_outer_accumulate_2d_scalar(const double* px,
                                             const double* py,
                                             const double* vx,
                                             const double* vy, std::size_t n,
                                             double cx, double cy, double rx,
                                             double ry, double* out);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
std::size_t boxed_outer_accumulate_2d_avx2(const double* px, const double* py,
                                           const double* vx, const double* vy,
                                           std::size_t n, double cx, double cy,
                                           double rx, double ry, double* out);
#endif

#if defined(__ARM_NEON) || defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double sum_neon(const double* a, std::size_t n);
std::size_t boxed_outer_accumulate_2d_neon(const double* px, const double* py,
                                           const double* vx, const double* vy,
                                           std::size_t n, double cx, double cy,
                                           double rx, double ry, double* out);
#endif

}  // namespace detail

}  // namespace geoscale::kernels
