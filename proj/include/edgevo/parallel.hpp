#pragma once

#include <cstddef>

namespace edgevo {

/// Execution mode of the data-parallel kernels. Serial is the reference path;
/// Parallel runs the same loop body under OpenMP. Both must produce bitwise
/// identical results (kernels only parallelize over independent rows/columns
/// or reduce over fixed-size blocks combined in block order).
enum class ExecMode { Serial, Parallel };

template <typename Fn>
inline void parallel_for(int count, ExecMode mode, Fn&& body) {
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) body(i);
  } else {
    for (int i = 0; i < count; ++i) body(i);
  }
}

/// Number of fixed-size reduction blocks for `n` items.
inline int reduction_block_count(std::size_t n, std::size_t block_size) {
  return static_cast<int>((n + block_size - 1) / block_size);
}

}  // namespace edgevo
