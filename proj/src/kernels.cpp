#include "geoscale/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "geoscale/error.hpp"

namespace geoscale::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

std::size_t boxed_outer_accumulate_2d_scalar(const double* px,
                                             const double* py,
                                             const double* vx,
                                             const double* vy, std::size_t n,
                                             double cx, double cy, double rx,
                                             double ry, double* out) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(px[i] - cx) <= rx && std::abs(py[i] - cy) <= ry) {
      out[0] += vx[i] * vx[i];
      out[1] += vx[i] * vy[i];
      out[2] += vy[i] * vy[i];
      ++count;
    }
  }
  return count;
}

}  // namespace detail

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using SumFn = double (*)(const double*, std::size_t);
using BoxedFn = std::size_t (*)(const double*, const double*, const double*,
                                const double*, std::size_t, double, double,
                                double, double, double*);

struct Dispatch {
  SimdLevel level = SimdLevel::scalar;
  DotFn dot = detail::dot_scalar;
  SumFn sum = detail::sum_scalar;
  BoxedFn boxed = detail::boxed_outer_accumulate_2d_scalar;
};

bool level_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return true;
    case SimdLevel::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case SimdLevel::neon:
#if defined(__ARM_NEON) || defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Dispatch make_dispatch(SimdLevel level) {
  Dispatch d;
  d.level = level;
  switch (level) {
    case SimdLevel::scalar:
      break;
#if defined(__x86_64__) || defined(_M_X64)
    case SimdLevel::avx2:
      d.dot = detail::dot_avx2;
      d.sum = detail::sum_avx2;
      d.boxed = detail::boxed_outer_accumulate_2d_avx2;
      break;
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
    case SimdLevel::neon:
      d.dot = detail::dot_neon;
      d.sum = detail::sum_neon;
      d.boxed = detail::boxed_outer_accumulate_2d_neon;
      break;
#endif
    default:
      break;
  }
  return d;
}

SimdLevel detect_level() {
  if (const char* env = std::getenv("GEOSCALE_SIMD")) {
    for (SimdLevel l :
         {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon}) {
      if (std::strcmp(env, level_name(l)) == 0) {
        if (!level_available(l))
          throw Error::validation("UnsupportedSimdLevel",
                                  std::string("GEOSCALE_SIMD=") + env +
                                      " not available on this machine");
        return l;
      }
    }
    throw Error::validation("UnsupportedSimdLevel",
                            std::string("unknown GEOSCALE_SIMD value: ") + env);
  }
  if (level_available(SimdLevel::avx2)) return SimdLevel::avx2;
  if (level_available(SimdLevel::neon)) return SimdLevel::neon;
  return SimdLevel::scalar;
}

Dispatch& dispatch() {
  static Dispatch d = make_dispatch(detect_level());
  return d;
}

}  // namespace

const char* level_name(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return "scalar";
    case SimdLevel::avx2: return "avx2";
    case SimdLevel::neon: return "neon";
  }
  return "unknown";
}

SimdLevel active_level() { return dispatch().level; }

void set_level(SimdLevel level) {
  if (!level_available(level))
    throw Error::validation("UnsupportedSimdLevel",
                            std::string(level_name(level)) +
                                " not available on this machine");
  dispatch() = make_dispatch(level);
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return dispatch().sum(a, n); }

std::size_t boxed_outer_accumulate_2d(const double* px, const double* py,
                                      const double* vx, const double* vy,
                                      std::size_t n, double cx, double cy,
                                      double rx, double ry, double* out) {
  return dispatch().boxed(px, py, vx, vy, n, cx, cy, rx, ry, out);
}

}  // namespace geoscale::kernels
