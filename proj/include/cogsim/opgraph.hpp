#pragma once

// Operation graph fed to the scheduler: one node per op instance with
// batches expanded, convolutions already lowered to GEMM dims, and
// element-wise ops flagged for SIMD offload.

#include <cstdint>
#include <string>
#include <vector>

#include "cogsim/workload.hpp"

namespace cogsim::sched {

struct OpNode {
    std::size_t index = 0;  // position in the graph
    std::string id;         // workload id plus batch suffix
    workload::OpKind kind = workload::OpKind::gemm;
    workload::OpDims dims;
    std::vector<std::size_t> deps;
    std::uint64_t iterations = 1;
    std::uint64_t batch_tag = 0;
    bool simd_offload = false;  // elemwise / simd-special

    bool is_neural() const {
        return kind == workload::OpKind::gemm || kind == workload::OpKind::conv;
    }
    bool is_symbolic() const { return kind == workload::OpKind::circconv; }
};

struct OpGraph {
    std::vector<OpNode> nodes;

    std::size_t size() const { return nodes.size(); }
    // Node indices in a deterministic topological order (by index among ready).
    std::vector<std::size_t> topological_order() const;
};

// Expands the workload into per-batch node instances. Throws
// validation_error listing the member ops of any dependency cycle.
OpGraph build_opgraph(const workload::WorkloadSpec& spec);

}  // namespace cogsim::sched
