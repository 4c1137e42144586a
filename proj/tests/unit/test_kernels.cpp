#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "genderalt/kernels.hpp"

using namespace genderalt::kernels;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, bool with_ties) {
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = with_ties ? static_cast<double>(rng() % 4) / 4.0 + 0.01 : u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels on small inputs") {
  const auto& k = scalar_kernels();
  const std::vector<double> row{0.2, 0.5, 0.1, 0.5};
  CHECK(k.argmax(row) == 1);
  const auto st = k.row_stats(row);
  CHECK(st.sum == doctest::Approx(1.3));
  CHECK(st.min == 0.1);
  CHECK(st.max == 0.5);
  const std::vector<std::size_t> idx{0, 1};
  CHECK(k.gather_log_sum(row, idx) == doctest::Approx(std::log(0.2) + std::log(0.5)));
  CHECK(k.argmax({}) == 0);
  const auto empty = k.row_stats({});
  CHECK(empty.sum == 0.0);
}

TEST_CASE("the active table is one of the known tables") {
  const auto& a = active();
  CHECK((&a == &scalar_kernels() || &a == avx2_kernels()));
  if (!cpu_has_avx2()) CHECK(&a == &scalar_kernels());
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const auto* simd = avx2_kernels();
  if (!simd || !cpu_has_avx2()) {
    MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = scalar_kernels();
  std::mt19937_64 rng(17);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = rng() % 67;
    const auto v = random_values(rng, n, t % 3 == 0);
    CHECK(simd->argmax(v) == ref.argmax(v));
    const auto a = simd->row_stats(v);
    const auto b = ref.row_stats(v);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
    CHECK(std::abs(a.sum - b.sum) <= 1e-12 * std::max(1.0, std::abs(b.sum)));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; n && i < rng() % 20; ++i) idx.push_back(rng() % n);
    const double ga = simd->gather_log_sum(v, idx);
    const double gb = ref.gather_log_sum(v, idx);
    CHECK(std::abs(ga - gb) <= 1e-12 * std::max(1.0, std::abs(gb)));
  }
}

TEST_CASE("argmax keeps the first maximum across vector lanes") {
  const auto* simd = avx2_kernels();
  for (std::size_t n = 1; n < 40; ++n)
    for (std::size_t hot = 0; hot < n; ++hot) {
      std::vector<double> v(n, 0.25);
      v[hot] = 0.75;
      if (hot + 1 < n) v[n - 1] = 0.75;
      CHECK(scalar_kernels().argmax(v) == hot);
      if (simd && cpu_has_avx2()) CHECK(simd->argmax(v) == hot);
    }
}
