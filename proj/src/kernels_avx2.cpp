// AVX2 variants of the kernels in kernels.cpp. This file is compiled with
// -mavx2 -mfma; callers reach it only through the runtime dispatch table.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "geoscale/kernels.hpp"

namespace geoscale::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) acc += a[i];
  return acc;
}

std::size_t boxed_outer_accumulate_2d_avx2(const double* px, const double* py,
                                           const double* vx, const double* vy,
                                           std::size_t n, double cx, double cy,
                                           double rx, double ry, double* out) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vrx = _mm256_set1_pd(rx);
  const __m256d vry = _mm256_set1_pd(ry);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);

  __m256d sxx = _mm256_setzero_pd();
  __m256d sxy = _mm256_setzero_pd();
  __m256d syy = _mm256_setzero_pd();
  std::size_t count = 0;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_andnot_pd(
        sign_mask, _mm256_sub_pd(_mm256_loadu_pd(px + i), vcx));
    __m256d dy = _mm256_andnot_pd(
        sign_mask, _mm256_sub_pd(_mm256_loadu_pd(py + i), vcy));
    __m256d inside = _mm256_and_pd(_mm256_cmp_pd(dx, vrx, _CMP_LE_OQ),
                                   _mm256_cmp_pd(dy, vry, _CMP_LE_OQ));
    int bits = _mm256_movemask_pd(inside);
    if (bits == 0) continue;
    count += static_cast<std::size_t>(__builtin_popcount(bits));
    __m256d wx = _mm256_and_pd(inside, _mm256_loadu_pd(vx + i));
    __m256d wy = _mm256_and_pd(inside, _mm256_loadu_pd(vy + i));
    sxx = _mm256_fmadd_pd(wx, wx, sxx);
    sxy = _mm256_fmadd_pd(wx, wy, sxy);
    syy = _mm256_fmadd_pd(wy, wy, syy);
  }
  out[0] += hsum(sxx);
  out[1] += hsum(sxy);
  out[2] += hsum(syy);
  for (; i < n; ++i) {
    if (std::abs(px[i] - cx) <= rx && std::abs(py[i] - cy) <= ry) {
      out[0] += vx[i] * vx[i];
      out[1] += vx[i] * vy[i];
      out[2] += vy[i] * vy[i];
      ++count;
    }
  }
  return count;
}

}  // namespace geoscale::kernels::detail

#endif  // x86_64
