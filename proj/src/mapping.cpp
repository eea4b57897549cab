#include "cogsim/mapping.hpp"

#include "cogsim/common.hpp"

namespace cogsim::mapping {

std::string to_string(MappingMode mode) {
    return mode == MappingMode::spatial ? "spatial" : "temporal";
}

std::uint64_t tile_latency(std::uint64_t d, std::uint64_t m) {
    if (d < 1 || m < 1) throw validation_error("tile_latency: d and M must be >= 1");
    return 3 * m + d - 1;
}

std::uint64_t latency_spatial(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                              std::uint64_t m) {
    return k * ceil_div(d, n * m) * tile_latency(d, m);
}

std::uint64_t latency_temporal(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                               std::uint64_t m) {
    return ceil_div(k, n) * ceil_div(d, m) * tile_latency(d, m);
}

std::uint64_t mem_reads(MappingMode mode, std::uint64_t d, std::uint64_t n,
                        std::uint64_t m) {
    return mode == MappingMode::spatial ? 2 * d : (d + m) * n;
}

MappingDecision choose_mapping(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                               std::uint64_t m, std::uint64_t bandwidth_limit) {
    if (k < 1 || d < 1 || n < 1 || m < 1) {
        throw validation_error("choose_mapping: all parameters must be >= 1");
    }
    const std::uint64_t c_s = latency_spatial(k, d, n, m);
    const std::uint64_t c_t = latency_temporal(k, d, n, m);
    const std::uint64_t b_s = mem_reads(MappingMode::spatial, d, n, m);
    const std::uint64_t b_t = mem_reads(MappingMode::temporal, d, n, m);

    auto make = [&](MappingMode mode) {
        MappingDecision dec;
        dec.mode = mode;
        if (mode == MappingMode::spatial) {
            dec.latency_cycles = c_s;
            dec.mem_reads_per_t = b_s;
            dec.folds = ceil_div(d, n * m);
            dec.parallel_convs = 1;
        } else {
            dec.latency_cycles = c_t;
            dec.mem_reads_per_t = b_t;
            dec.folds = ceil_div(d, m);
            dec.parallel_convs = std::min(k, n);
        }
        return dec;
    };

    MappingMode winner;
    if (c_s != c_t) {
        winner = c_s < c_t ? MappingMode::spatial : MappingMode::temporal;
    } else {
        winner = b_s <= b_t ? MappingMode::spatial : MappingMode::temporal;
    }
    if (bandwidth_limit == 0) return make(winner);

    const MappingMode other =
        winner == MappingMode::spatial ? MappingMode::temporal : MappingMode::spatial;
    if (mem_reads(winner, d, n, m) <= bandwidth_limit) return make(winner);
    if (mem_reads(other, d, n, m) <= bandwidth_limit) return make(other);
    MappingDecision dec = make(winner);
    dec.bandwidth_warning = true;
    return dec;
}

double roofline_ai(RooflineKind kind, std::uint64_t d) {
    if (d < 1) throw validation_error("roofline_ai: d must be >= 1");
    const double dd = static_cast<double>(d);
    const double flops = dd * (2.0 * dd - 1.0);
    if (kind == RooflineKind::bs_dataflow) {
        return flops / (3.0 * dd);
    }
    return flops / (dd * dd + 2.0 * dd);
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::scale_up_gemm: return "scale-up-gemm";
        case Scheme::scale_out_gemm: return "scale-out-gemm";
        case Scheme::scale_up_conv: return "scale-up-conv";
        case Scheme::scale_out_conv: return "scale-out-conv";
        case Scheme::scale_out_gemm_conv: return "scale-out-gemm-conv";
    }
    return "?";
}

Scheme choose_scale(const OpDescriptor& op, std::uint64_t n, std::uint64_t m,
                    std::uint64_t cell_rows, std::uint64_t cell_cols) {
    if (op.mixed_ready_set) return Scheme::scale_out_gemm_conv;
    if (op.is_circconv) {
        return op.d > m ? Scheme::scale_up_conv : Scheme::scale_out_conv;
    }
    const std::uint64_t total = n * m;
    if (op.rows >= total && op.cols >= total && op.inner >= total) {
        return Scheme::scale_up_gemm;
    }
    (void)cell_rows;
    (void)cell_cols;
    return Scheme::scale_out_gemm;
}

}  // namespace cogsim::mapping
