#pragma once

#include <span>
#include <vector>

#include "lsilu/symbolic.hpp"
#include "lsilu/sync_schedule.hpp"

namespace lsilu {

// Serial up-looking incomplete LU over every row in ascending order. This is
// the reference every parallel path must match bit for bit.
// Throws zero_pivot naming the first row whose final diagonal is exactly 0.
void factor_serial(IluFactors& f);

// Throws zero_pivot for the first row in `rows` (ascending) with a zero diagonal.
void check_pivots(const IluFactors& f, std::span<const Index> rows);
void check_pivots(const IluFactors& f);

// Schedule over the given levels (row ids in the factor ordering), with
// dependencies taken from the strict lower part of the factor pattern.
SyncSchedule build_factor_schedule(const IluFactors& f, std::span<const std::vector<Index>> levels, int nthreads);

// Factors every scheduled row with point-to-point synchronization and checks
// their pivots once all workers are done.
void factor_parallel_upper(IluFactors& f, const SyncSchedule& schedule, WorkerPool& pool, CompletionFlags& flags);

}  // namespace lsilu
