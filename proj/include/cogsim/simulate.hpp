#pragma once

// Workload execution engine behind the `simulate` subcommand: walks the op
// graph in topological order, runs symbolic kernels through the
// register-transfer array model under their chosen mapping, costs neural
// and SIMD ops with the analytical tile models, and accumulates a
// CycleReport with traffic and energy.

#include <ostream>
#include <string>

#include "cogsim/opgraph.hpp"
#include "cogsim/pe_array.hpp"
#include "cogsim/workload.hpp"

namespace cogsim::sim {

struct SimulateOptions {
    std::uint64_t seed = 1;
    bool trace = false;          // per-cycle CSV for small instances
    std::ostream* trace_out = nullptr;
};

CycleReport simulate_workload(const workload::WorkloadSpec& spec,
                              const ArrayConfig& config,
                              const SimulateOptions& options = {});

}  // namespace cogsim::sim
