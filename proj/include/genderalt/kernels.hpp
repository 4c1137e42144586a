#pragma once

// Dense row kernels behind the score-matrix code. Each kernel has a scalar reference
// and an AVX2 build; the active table is picked once at startup from CPUID and can be
// overridden with GENDERALT_KERNELS=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace genderalt::kernels {

struct RowStats {
  double sum = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct KernelTable {
  std::string_view name;
  /// Index of the first maximum. Empty rows return 0.
  std::size_t (*argmax)(std::span<const double> row);
  /// Sum, min and max in one pass. Empty rows return all zeros.
  RowStats (*row_stats)(std::span<const double> row);
  /// Sum of log(values[idx[i]]). Indices must be in range.
  double (*gather_log_sum)(std::span<const double> values, std::span<const std::size_t> idx);
};

const KernelTable& scalar_kernels();
/// nullptr when the library was built without AVX2 support.
const KernelTable* avx2_kernels();
bool cpu_has_avx2();

/// Table selected at first use.
const KernelTable& active();

}  // namespace genderalt::kernels
