#pragma once

// Offline workload-aware scheduler. Greedy event-driven list scheduling:
// at each completion event, ready ops are ranked (neural first while large
// cell blocks are free, symbolic packed into cell columns), candidate
// placements are costed with the analytical cycle models, and the best-fit
// placement is committed. A sequential baseline schedules one op at a time
// on its best single allocation.
//
// Allocation granularity: whole cells for neural ops, whole columns of one
// cell for symbolic circular convolutions, the (serial) SIMD unit for
// element-wise ops. Splitting one convolution across cells is the mapping
// layer's job, not the scheduler's.

#include <cstdint>
#include <string>
#include <vector>

#include "cogsim/array_config.hpp"
#include "cogsim/opgraph.hpp"

namespace cogsim::sched {

enum class ResourceKind { cells, columns, simd };

struct ScheduleEntry {
    std::size_t op_index = 0;
    std::string op_id;
    ResourceKind resource = ResourceKind::cells;
    std::vector<std::uint64_t> cells;   // whole-cell allocations
    std::uint64_t cell = 0;             // column allocations: owning cell
    std::vector<std::uint64_t> columns; // column allocations: column ids
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::string scheme;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;
    std::uint64_t makespan = 0;
    std::vector<double> per_cell_busy;  // cycles weighted by columns used
    std::uint64_t max_candidates_per_step = 0;  // bounded search witness

    std::string to_json(const sim::ArrayConfig& config) const;
    std::string gantt_csv() const;  // op, cells, start, end
};

// Analytical runtime of one op on a given allocation; the cost model the
// scheduler searches over (tile grid of 3M+K-1 GEMM tiles, temporal column
// folding for convolutions, lane waves for SIMD ops).
std::uint64_t estimate_cycles(const OpNode& node, std::uint64_t alloc_units,
                              const sim::ArrayConfig& config);

Schedule greedy_schedule(const OpGraph& graph, const sim::ArrayConfig& config);
Schedule sequential_schedule(const OpGraph& graph, const sim::ArrayConfig& config);

// Checks the schedule invariants: no resource overlap, dependencies
// respected, every op scheduled exactly once, positive durations.
// An empty result means the schedule is valid.
std::vector<std::string> validate(const Schedule& schedule, const OpGraph& graph,
                                  const sim::ArrayConfig& config);

struct ScheduleStats {
    std::uint64_t makespan = 0;
    std::vector<double> cell_utilization;
    double mean_utilization = 0.0;
};

ScheduleStats stats(const Schedule& schedule, const sim::ArrayConfig& config);

}  // namespace cogsim::sched
