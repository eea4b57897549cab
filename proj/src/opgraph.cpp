#include "cogsim/opgraph.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "cogsim/common.hpp"

namespace cogsim::sched {

std::vector<std::size_t> OpGraph::topological_order() const {
    std::vector<std::size_t> indegree(nodes.size(), 0);
    std::vector<std::vector<std::size_t>> children(nodes.size());
    for (const auto& node : nodes) {
        for (std::size_t dep : node.deps) {
            children[dep].push_back(node.index);
            ++indegree[node.index];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (const auto& node : nodes) {
        if (indegree[node.index] == 0) ready.push(node.index);
    }
    std::vector<std::size_t> order;
    order.reserve(nodes.size());
    while (!ready.empty()) {
        const std::size_t i = ready.top();
        ready.pop();
        order.push_back(i);
        for (std::size_t child : children[i]) {
            if (--indegree[child] == 0) ready.push(child);
        }
    }
    return order;
}

OpGraph build_opgraph(const workload::WorkloadSpec& spec) {
    OpGraph graph;
    for (std::uint64_t batch = 0; batch < spec.batches; ++batch) {
        std::map<std::string, std::size_t> index_of;
        const std::size_t base = graph.nodes.size();
        for (const auto& task : spec.tasks) {
            for (const auto& op : task.ops) {
                OpNode node;
                node.index = graph.nodes.size();
                node.id = op.id + "@b" + std::to_string(batch);
                node.kind = op.kind;
                node.dims = op.dims;
                node.iterations = op.iterations;
                node.batch_tag = batch;
                node.simd_offload = op.kind == workload::OpKind::elemwise ||
                                    op.kind == workload::OpKind::simd_special;
                index_of[op.id] = node.index;
                graph.nodes.push_back(std::move(node));
            }
        }
        // Wire dependencies within this batch instance.
        std::size_t cursor = base;
        for (const auto& task : spec.tasks) {
            for (const auto& op : task.ops) {
                for (const auto& dep : op.deps) {
                    graph.nodes[cursor].deps.push_back(index_of.at(dep));
                }
                ++cursor;
            }
        }
    }

    // Cycle check: Kahn's algorithm; whatever cannot be ordered is a cycle.
    const std::vector<std::size_t> order = graph.topological_order();
    if (order.size() != graph.nodes.size()) {
        std::vector<bool> ordered(graph.nodes.size(), false);
        for (std::size_t i : order) ordered[i] = true;
        std::string members;
        for (const auto& node : graph.nodes) {
            if (!ordered[node.index]) {
                if (!members.empty()) members += ", ";
                members += node.id;
            }
        }
        throw validation_error("workload contains a dependency cycle involving {" +
                               members + "}");
    }
    return graph;
}

}  // namespace cogsim::sched
