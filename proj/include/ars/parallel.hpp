#pragma once

#include <cstddef>
#include <span>

namespace ars {

/// Worker count used by the OpenMP kernels: ARS_ENGINE_THREADS when set and
/// positive, otherwise the OpenMP default. Always at least 1.
int worker_count();

/// Forces worker_count() to exactly `threads` (may exceed the core count,
/// which tests use to exercise the merge paths); 0 restores the default.
void set_worker_cap(int threads);

/// Compensated (Neumaier) sum in the given order.
double compensated_sum(std::span<const double> values);

}  // namespace ars
