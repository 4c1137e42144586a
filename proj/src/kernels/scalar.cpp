#include <algorithm>
#include <cmath>

#include "genderalt/kernels.hpp"

namespace genderalt::kernels {
namespace {

std::size_t argmax_scalar(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

RowStats row_stats_scalar(std::span<const double> row) {
  if (row.empty()) return {};
  RowStats s{0.0, row[0], row[0]};
  for (double v : row) {
    s.sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  return s;
}

double gather_log_sum_scalar(std::span<const double> values, std::span<const std::size_t> idx) {
  double total = 0.0;
  for (auto i : idx) total += std::log(values[i]);
  return total;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &argmax_scalar, &row_stats_scalar, &gather_log_sum_scalar};
  return table;
}

}  // namespace genderalt::kernels
