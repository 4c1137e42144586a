// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "genderalt/kernels.hpp"

namespace genderalt::kernels {
namespace {

// Four lanes track the running max and the first index where it occurred. Strict
// greater-than keeps the earliest index per lane; the final reduction breaks value ties
// toward the smaller index, so the result equals the scalar left-to-right scan.
std::size_t argmax_avx2(std::span<const double> row) {
  const std::size_t n = row.size();
  if (n < 8) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (row[i] > row[best]) best = i;
    return best;
  }
  const double* p = row.data();
  __m256d best_v = _mm256_loadu_pd(p);
  __m256d best_i = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_i;
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    idx = _mm256_add_pd(idx, step);
    const __m256d v = _mm256_loadu_pd(p + i);
    const __m256d gt = _mm256_cmp_pd(v, best_v, _CMP_GT_OQ);
    best_v = _mm256_blendv_pd(best_v, v, gt);
    best_i = _mm256_blendv_pd(best_i, idx, gt);
  }
  alignas(32) double vals[4];
  alignas(32) double ids[4];
  _mm256_store_pd(vals, best_v);
  _mm256_store_pd(ids, best_i);
  double bv = vals[0];
  auto bi = static_cast<std::size_t>(ids[0]);
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(ids[l]);
    if (vals[l] > bv || (vals[l] == bv && li < bi)) {
      bv = vals[l];
      bi = li;
    }
  }
  for (; i < n; ++i)
    if (p[i] > bv) {
      bv = p[i];
      bi = i;
    }
  return bi;
}

RowStats row_stats_avx2(std::span<const double> row) {
  const std::size_t n = row.size();
  if (n == 0) return {};
  const double* p = row.data();
  __m256d sum = _mm256_setzero_pd();
  __m256d mn = _mm256_set1_pd(p[0]);
  __m256d mx = mn;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    sum = _mm256_add_pd(sum, v);
    mn = _mm256_min_pd(mn, v);
    mx = _mm256_max_pd(mx, v);
  }
  alignas(32) double s[4], lo[4], hi[4];
  _mm256_store_pd(s, sum);
  _mm256_store_pd(lo, mn);
  _mm256_store_pd(hi, mx);
  RowStats out{(s[0] + s[1]) + (s[2] + s[3]), lo[0], hi[0]};
  for (int l = 1; l < 4; ++l) {
    out.min = std::min(out.min, lo[l]);
    out.max = std::max(out.max, hi[l]);
  }
  for (; i < n; ++i) {
    out.sum += p[i];
    out.min = std::min(out.min, p[i]);
    out.max = std::max(out.max, p[i]);
  }
  return out;
}

// log(a) + log(b) == log(a * b); products are taken four at a time and flushed to a
// log before they can underflow.
double gather_log_sum_avx2(std::span<const double> values, std::span<const std::size_t> idx) {
  const std::size_t n = idx.size();
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i ix = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx.data() + i));
    const __m256d v = _mm256_i64gather_pd(values.data(), ix, 8);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    const double prod = (lanes[0] * lanes[1]) * (lanes[2] * lanes[3]);
    if (prod > 1e-280 && std::isfinite(prod)) {
      total += std::log(prod);
    } else {
      total += (std::log(lanes[0]) + std::log(lanes[1])) + (std::log(lanes[2]) + std::log(lanes[3]));
    }
  }
  for (; i < n; ++i) total += std::log(values[idx[i]]);
  return total;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", &argmax_avx2, &row_stats_avx2, &gather_log_sum_avx2};
  return &table;
}

}  // namespace genderalt::kernels
