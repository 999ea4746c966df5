#include "lsilu/factor_upper.hpp"

#include <string>

#include "row_kernel.hpp"

namespace lsilu {

void check_pivots(const IluFactors& f, std::span<const Index> rows) {
  Index worst = -1;
  for (Index r : rows)
    if (f.diag(r) == 0.0 && (worst < 0 || r < worst)) worst = r;
  if (worst >= 0) throw_error(ErrorCode::zero_pivot, "zero pivot in row " + std::to_string(worst), worst);
}

void check_pivots(const IluFactors& f) {
  for (Index r = 0; r < f.n; ++r)
    if (f.diag(r) == 0.0) throw_error(ErrorCode::zero_pivot, "zero pivot in row " + std::to_string(r), r);
}

void factor_serial(IluFactors& f) {
  const detail::FactorView view(f);
  for (Index r = 0; r < f.n; ++r) detail::eliminate_row(view, r, 0, r);
  check_pivots(f);
}

SyncSchedule build_factor_schedule(const IluFactors& f, std::span<const std::vector<Index>> levels, int nthreads) {
  return build_sync_schedule(levels, lower_pattern(f.pattern), nthreads);
}

void factor_parallel_upper(IluFactors& f, const SyncSchedule& schedule, WorkerPool& pool, CompletionFlags& flags) {
  if (schedule.n != f.n) throw_error(ErrorCode::size_mismatch, "schedule was built for a different matrix");
  const detail::FactorView view(f);
  run_point_to_point(pool, schedule, flags, [&](Index r) { detail::eliminate_row(view, r, 0, r); });
  Index worst = -1;
  for (const auto& rows : schedule.program_order)
    for (Index r : rows)
      if (f.diag(r) == 0.0 && (worst < 0 || r < worst)) worst = r;
  if (worst >= 0) throw_error(ErrorCode::zero_pivot, "zero pivot in row " + std::to_string(worst), worst);
}

}  // namespace lsilu
