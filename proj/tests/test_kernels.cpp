#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "geoscale/error.hpp"
#include "geoscale/kernels.hpp"

namespace k = geoscale::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v)
    x = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 gen(11);
  auto a = random_vec(gen, 257);
  auto b = random_vec(gen, 257);
  double expect_dot = 0.0, expect_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    expect_dot += a[i] * b[i];
    expect_sum += a[i];
  }
  CHECK(k::detail::dot_scalar(a.data(), b.data(), a.size()) ==
        doctest::Approx(expect_dot).epsilon(1e-14));
  CHECK(k::detail::sum_scalar(a.data(), a.size()) ==
        doctest::Approx(expect_sum).epsilon(1e-14));
}

TEST_CASE("simd variants agree with the scalar reference") {
  // Exercise ragged lengths around the vector width.
  std::mt19937_64 gen(42);
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 64ul, 1001ul, 4096ul}) {
    auto a = random_vec(gen, n);
    auto b = random_vec(gen, n);
    double ref_dot = k::detail::dot_scalar(a.data(), b.data(), n);
    double ref_sum = k::detail::sum_scalar(a.data(), a.size());

    double acc_ref[3] = {0, 0, 0};
    std::size_t count_ref = k::detail::boxed_outer_accumulate_2d_scalar(
        a.data(), b.data(), b.data(), a.data(), n, 0.1, -0.05, 0.4, 0.6,
        acc_ref);

#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      CHECK(close(k::detail::dot_avx2(a.data(), b.data(), n), ref_dot, 1e-13));
      CHECK(close(k::detail::sum_avx2(a.data(), n), ref_sum, 1e-13));
      double acc[3] = {0, 0, 0};
      std::size_t count = k::detail::boxed_outer_accumulate_2d_avx2(
          a.data(), b.data(), b.data(), a.data(), n, 0.1, -0.05, 0.4, 0.6,
          acc);
      CHECK(count == count_ref);
      for (int i = 0; i < 3; ++i) CHECK(close(acc[i], acc_ref[i], 1e-12));
    }
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
    {
      CHECK(close(k::detail::dot_neon(a.data(), b.data(), n), ref_dot, 1e-13));
      CHECK(close(k::detail::sum_neon(a.data(), n), ref_sum, 1e-13));
      double acc[3] = {0, 0, 0};
      std::size_t count = k::detail::boxed_outer_accumulate_2d_neon(
          a.data(), b.data(), b.data(), a.data(), n, 0.1, -0.05, 0.4, 0.6,
          acc);
      CHECK(count == count_ref);
      for (int i = 0; i < 3; ++i) CHECK(close(acc[i], acc_ref[i], 1e-12));
    }
#endif
  }
}

TEST_CASE("boxed accumulate counts exactly the in-box samples") {
  std::mt19937_64 gen(7);
  auto px = random_vec(gen, 501);
  auto py = random_vec(gen, 501);
  auto vx = random_vec(gen, 501);
  auto vy = random_vec(gen, 501);
  double acc[3] = {0, 0, 0};
  std::size_t count = k::boxed_outer_accumulate_2d(
      px.data(), py.data(), vx.data(), vy.data(), px.size(), 0.2, -0.3, 0.25,
      0.5, acc);
  std::size_t expect = 0;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < px.size(); ++i)
    if (std::abs(px[i] - 0.2) <= 0.25 && std::abs(py[i] + 0.3) <= 0.5) {
      ++expect;
      sxx += vx[i] * vx[i];
      sxy += vx[i] * vy[i];
      syy += vy[i] * vy[i];
    }
  CHECK(count == expect);
  CHECK(close(acc[0], sxx, 1e-12));
  CHECK(close(acc[1], sxy, 1e-12));
  CHECK(close(acc[2], syy, 1e-12));
}

TEST_CASE("dispatch can be forced to each available level") {
  k::SimdLevel original = k::active_level();
  std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  for (k::SimdLevel level :
       {k::SimdLevel::scalar, k::SimdLevel::avx2, k::SimdLevel::neon}) {
    bool available = true;
    try {
      k::set_level(level);
    } catch (const geoscale::Error&) {
      available = false;
    }
    if (!available) continue;
    CHECK(k::active_level() == level);
    CHECK(k::sum(a.data(), a.size()) == doctest::Approx(15.0));
  }
  k::set_level(original);
}
