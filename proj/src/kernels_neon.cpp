// NEON variants of the kernels in kernels.cpp (aarch64 only).

#if defined(__ARM_NEON) || defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "geoscale/kernels.hpp"

namespace geoscale::kernels::detail {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vld1q_f64(a + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

std::size_t boxed_outer_accumulate_2d_neon(const double* px, const double* py,
                                           const double* vx, const double* vy,
                                           std::size_t n, double cx, double cy,
                                           double rx, double ry, double* out) {
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  const float64x2_t vrx = vdupq_n_f64(rx);
  const float64x2_t vry = vdupq_n_f64(ry);

  float64x2_t sxx = vdupq_n_f64(0.0);
  float64x2_t sxy = vdupq_n_f64(0.0);
  float64x2_t syy = vdupq_n_f64(0.0);
  std::size_t count = 0;

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t dx = vabdq_f64(vld1q_f64(px + i), vcx);
    float64x2_t dy = vabdq_f64(vld1q_f64(py + i), vcy);
    uint64x2_t inside = vandq_u64(vcleq_f64(dx, vrx), vcleq_f64(dy, vry));
    uint64_t in0 = vgetq_lane_u64(inside, 0);
    uint64_t in1 = vgetq_lane_u64(inside, 1);
    if ((in0 | in1) == 0) continue;
    count += (in0 ? 1 : 0) + (in1 ? 1 : 0);
    float64x2_t wx = vreinterpretq_f64_u64(
        vandq_u64(inside, vreinterpretq_u64_f64(vld1q_f64(vx + i))));
    float64x2_t wy = vreinterpretq_f64_u64(
        vandq_u64(inside, vreinterpretq_u64_f64(vld1q_f64(vy + i))));
    sxx = vfmaq_f64(sxx, wx, wx);
    sxy = vfmaq_f64(sxy, wx, wy);
    syy = vfmaq_f64(syy, wy, wy);
  }
  out[0] += vaddvq_f64(sxx);
  out[1] += vaddvq_f64(sxy);
  out[2] += vaddvq_f64(syy);
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

#endif  // __ARM_NEON || __aarch64__
