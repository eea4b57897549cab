#include "cogsim/simulate.hpp"

#include <algorithm>

#include "cogsim/common.hpp"
#include "cogsim/mapping.hpp"
#include "cogsim/rng.hpp"
#include "cogsim/scheduler.hpp"

namespace cogsim::sim {

namespace {

// Input synthesis for functional execution: integer-valued int8-range data,
// exact under every precision mode.
vsa::Hypervector random_int8_vector(std::size_t dim, Xoshiro256ss& rng) {
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(255)) - 127);
    }
    return vsa::Hypervector(std::move(v), vsa::VectorTag::quantized);
}

void run_circconv_op(const sched::OpNode& node, const ArrayConfig& config,
                     Xoshiro256ss& rng, CycleReport& report,
                     const SimulateOptions& options) {
    const std::uint64_t k = node.dims.k;
    const std::uint64_t d = node.dims.d;

    const mapping::MappingDecision decision =
        mapping::choose_mapping(k, d, config.num_arrays, config.pes_per_array);

    std::vector<std::pair<vsa::Hypervector, vsa::Hypervector>> pairs;
    pairs.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) {
        pairs.emplace_back(random_int8_vector(d, rng), random_int8_vector(d, rng));
    }

    MappedConvResult mapped;
    if (options.trace && options.trace_out && k == 1 && d <= config.pes_per_array) {
        // Small single-conv instances run with the per-cycle trace attached.
        auto sink = [&](const TraceRow& row) {
            (*options.trace_out) << row.cycle << ',' << row.unit << ',' << row.pe << ','
                                 << row.stationary << ',' << row.passing << ','
                                 << row.streaming << ',' << row.psum << '\n';
        };
        ConvRunResult one = run_circconv_bs(pairs[0].first, pairs[0].second,
                                            config.pes_per_array, sink);
        mapped.outputs.push_back(std::move(one.output));
        mapped.array_cycles = one.cycles;
        mapped.macs = one.macs;
        mapped.pe_active_cycles = one.pe_active_cycles;
    } else {
        mapped = run_mapped_circconv(pairs, decision.mode, config);
    }

    // Functional check against the direct-formula reference.
    for (std::uint64_t i = 0; i < k; ++i) {
        const vsa::Hypervector expect = vsa::circ_conv(pairs[i].first, pairs[i].second);
        if (!(expect == mapped.outputs[i])) {
            throw infeasible_error("op " + node.id +
                                   ": simulated output diverged from reference");
        }
    }

    const std::uint64_t cycles = mapped.array_cycles * node.iterations;
    report.add_kernel(node.id, cycles);
    report.simd_cycles += mapped.simd_reduce_cycles * node.iterations;
    report.mac_count += mapped.macs * node.iterations;
    report.pe_active_cycles += mapped.pe_active_cycles * node.iterations;

    KernelDescriptor kernel;
    kernel.name = node.id;
    kernel.mode = decision.mode;
    kernel.k = k * node.iterations;
    kernel.d = d;
    kernel.duration_cycles = cycles;
    kernel.unique_elems = (2 * d) * k * node.iterations;  // inputs per conv
    account_memory(kernel, config, report);
    report.tensor_elems += 3 * d * k;  // inputs + output per conv
}

void run_gemm_op(const sched::OpNode& node, const ArrayConfig& config,
                 CycleReport& report) {
    const std::uint64_t cycles =
        sched::estimate_cycles(node, config.num_cells, config);
    report.add_kernel(node.id, cycles);
    const std::uint64_t macs =
        node.dims.rows * node.dims.cols * node.dims.inner * node.iterations;
    report.mac_count += macs;
    report.pe_active_cycles += macs;  // one MAC per PE-cycle at full streaming

    const std::uint64_t elem_bytes = config.element_bytes();
    const std::uint64_t weights = node.dims.rows * node.dims.inner;
    const std::uint64_t acts = node.dims.inner * node.dims.cols;
    const std::uint64_t outs = node.dims.rows * node.dims.cols;
    report.sram_a_reads += weights * node.iterations;
    report.sram_b_reads += acts * node.iterations;
    report.sram_b_writes += outs * node.iterations;
    report.dram_bytes += (weights + acts + outs) * elem_bytes;
    report.tensor_elems += weights + acts + outs;
}

void run_simd_op(const sched::OpNode& node, const ArrayConfig& config,
                 CycleReport& report) {
    const std::uint64_t cycles = sched::estimate_cycles(node, 1, config);
    report.simd_cycles += cycles;
    report.add_kernel(node.id, cycles);
    report.simd_op_count += node.dims.length * node.iterations;
    report.sram_b_reads += node.dims.length * node.iterations;
    report.sram_b_writes += node.dims.length * node.iterations;
    report.tensor_elems += node.dims.length;
}

}  // namespace

CycleReport simulate_workload(const workload::WorkloadSpec& spec,
                              const ArrayConfig& config,
                              const SimulateOptions& options) {
    config.validate();
    const sched::OpGraph graph = sched::build_opgraph(spec);

    ArrayConfig effective = config;
    effective.precision = spec.precision;

    CycleReport report;
    if (options.trace && options.trace_out) {
        (*options.trace_out) << "cycle,unit,pe,stationary,passing,streaming,psum\n";
    }
    Xoshiro256ss rng(options.seed);
    for (std::size_t idx : graph.topological_order()) {
        const sched::OpNode& node = graph.nodes[idx];
        switch (node.kind) {
            case workload::OpKind::circconv:
                run_circconv_op(node, effective, rng, report, options);
                break;
            case workload::OpKind::gemm:
            case workload::OpKind::conv:
                run_gemm_op(node, effective, report);
                break;
            case workload::OpKind::elemwise:
            case workload::OpKind::simd_special:
                run_simd_op(node, effective, report);
                break;
        }
    }
    report.storage_bytes = quant::storage_bytes(report.tensor_elems, effective.precision);
    report.storage_bytes_fp32 =
        quant::storage_bytes(report.tensor_elems, quant::QuantMode::fp32);
    finalize_report(report, effective);
    return report;
}

}  // namespace cogsim::sim
