#include "cogsim/pe_array.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cogsim/common.hpp"

namespace cogsim::sim {

namespace {

// Injection sequence for the circular wrap: b[0..d-1], b[0..d-2], zeros after.
double inject_stream(std::span<const double> stream, std::uint64_t j) {
    const std::uint64_t d = stream.size();
    if (j >= 2 * d - 1) return 0.0;
    return stream[j % d];
}

}  // namespace

ConvRunResult run_bs_tile(std::span<const double> stationary_slice,
                          std::span<const double> stream,
                          std::uint64_t column_len, const TraceSink& trace,
                          const std::string& unit_name) {
    const std::uint64_t m = column_len;
    const std::uint64_t d = stream.size();
    const std::uint64_t s = stationary_slice.size();
    if (m < 1 || d < 1) throw validation_error("run_bs_tile: empty column or stream");
    if (s > m) {
        throw validation_error("run_bs_tile: stationary slice longer than column");
    }
    if (s > d) {
        throw validation_error("run_bs_tile: stationary slice longer than stream");
    }

    std::vector<double> stationary(m, 0.0);
    std::uint64_t cycle = 0;

    // Load mode: the stationary slice shifts down the column for M cycles and
    // settles in the bottom s PEs.
    if (trace) {
        for (std::uint64_t c = 0; c < m; ++c) {
            for (std::uint64_t p = m; p-- > 1;) stationary[p] = stationary[p - 1];
            stationary[0] = c < s ? stationary_slice[s - 1 - c] : 0.0;
            ++cycle;
            for (std::uint64_t p = 0; p < m; ++p) {
                trace({cycle, unit_name, p, stationary[p], 0.0, 0.0, 0.0});
            }
        }
    } else {
        for (std::uint64_t p = 0; p < s; ++p) {
            stationary[m - s + p] = stationary_slice[p];
        }
        cycle += m;
    }

    // Streaming mode. Values advance one PE per two cycles via the passing
    // register; partial sums ripple down one PE per cycle.
    std::vector<double> passing(m, 0.0), streaming(m, 0.0), psum(m, 0.0);
    std::vector<double> old_streaming(m, 0.0), old_psum(m, 0.0);

    ConvRunResult result;
    result.output.elems.assign(d, 0.0);
    result.output_cycles.assign(d, 0);

    const std::uint64_t first_out = 2 * m - 1;
    const std::uint64_t last_out = 2 * m + d - 2;
    for (std::uint64_t t = 0; t <= last_out; ++t) {
        old_streaming = streaming;
        old_psum = psum;
        for (std::uint64_t p = 0; p < m; ++p) {
            streaming[p] = passing[p];
            passing[p] = p == 0 ? inject_stream(stream, t) : old_streaming[p - 1];
            psum[p] = (p == 0 ? 0.0 : old_psum[p - 1]) + stationary[p] * streaming[p];
        }
        ++cycle;
        if (trace) {
            for (std::uint64_t p = 0; p < m; ++p) {
                trace({cycle, unit_name, p, stationary[p], passing[p], streaming[p],
                       psum[p]});
            }
        }
        if (t >= first_out) {
            const std::uint64_t n = (t - 2 * m + s) % d;
            result.output[n] = psum[m - 1];
            result.output_cycles[n] = t;
        }
    }

    result.cycles = cycle;  // == 3M + d - 1, derived by the walk above
    result.macs = s * d;
    result.pe_active_cycles = s * (2 * m + d - 1);
    return result;
}

ConvRunResult run_circconv_bs(const vsa::Hypervector& a, const vsa::Hypervector& b,
                              std::uint64_t column_len, const TraceSink& trace) {
    if (a.dim() != b.dim()) {
        throw validation_error("run_circconv_bs: dimension mismatch");
    }
    if (a.dim() > column_len) {
        throw validation_error(
            "run_circconv_bs: d > M; fold through the mapping layer first");
    }
    return run_bs_tile(a.elems, b.elems, column_len, trace);
}

ConvRunResult run_circcorr_bs(const vsa::Hypervector& a, const vsa::Hypervector& b,
                              std::uint64_t column_len, const TraceSink& trace) {
    return run_circconv_bs(vsa::reverse_circular(a), b, column_len, trace);
}

CwpRunResult run_cell_circconv_cwp(
    const std::vector<std::pair<vsa::Hypervector, vsa::Hypervector>>& pairs,
    std::uint64_t cell_rows, std::uint64_t cell_cols) {
    if (pairs.empty()) throw validation_error("run_cell_circconv_cwp: no inputs");
    if (pairs.size() > cell_cols) {
        throw validation_error("run_cell_circconv_cwp: more convolutions than columns");
    }
    CwpRunResult result;
    for (const auto& [a, b] : pairs) {
        ConvRunResult one = run_circconv_bs(a, b, cell_rows);
        if (result.cycles != 0 && one.cycles != result.cycles) {
            throw validation_error("run_cell_circconv_cwp: columns must agree on d");
        }
        result.cycles = one.cycles;
        result.macs += one.macs;
        result.pe_active_cycles += one.pe_active_cycles;
        result.outputs.push_back(std::move(one.output));
    }
    return result;
}

GemmRunResult run_gemm(const std::vector<double>& w, std::uint64_t m,
                       const std::vector<double>& x, std::uint64_t k,
                       const TraceSink& trace) {
    if (w.size() != m * m) throw validation_error("run_gemm: w must be MxM");
    if (x.size() != m * k) throw validation_error("run_gemm: x must be MxK");

    GemmRunResult result;
    result.rows = m;
    result.cols = k;
    result.output.assign(m * k, 0.0);

    std::uint64_t cycle = m;  // load mode: weights shift into place

    // PE(r,c) holds w[c][r] so each array column accumulates one output row.
    std::vector<double> in(m * m, 0.0), psum(m * m, 0.0);
    std::vector<double> old_in(m * m, 0.0), old_psum(m * m, 0.0);
    auto at = [m](std::uint64_t r, std::uint64_t c) { return r * m + c; };

    const std::uint64_t stream_cycles = 2 * m + k - 2;
    for (std::uint64_t t = 0; t < stream_cycles; ++t) {
        old_in = in;
        old_psum = psum;
        for (std::uint64_t r = 0; r < m; ++r) {
            for (std::uint64_t c = 0; c < m; ++c) {
                double incoming;
                if (c == 0) {
                    // Row-skewed injection: x[r][t - r].
                    incoming = (t >= r && t - r < k)
                                   ? x[r * k + (t - r)]
                                   : 0.0;
                } else {
                    incoming = old_in[at(r, c - 1)];
                }
                in[at(r, c)] = incoming;
                psum[at(r, c)] = (r == 0 ? 0.0 : old_psum[at(r - 1, c)]) +
                                 w[c * m + r] * in[at(r, c)];
            }
        }
        ++cycle;
        if (trace) {
            for (std::uint64_t r = 0; r < m; ++r) {
                for (std::uint64_t c = 0; c < m; ++c) {
                    trace({cycle, "gemm", at(r, c), w[c * m + r], 0.0, in[at(r, c)],
                           psum[at(r, c)]});
                }
            }
        }
        // Bottom row drains one skewed output diagonal per cycle.
        for (std::uint64_t c = 0; c < m; ++c) {
            if (t + 1 >= m + c) {
                const std::uint64_t kk = t + 1 - m - c;
                if (kk < k) result.output[c * k + kk] = psum[at(m - 1, c)];
            }
        }
    }
    ++cycle;  // final output block commits through the writeback register

    result.cycles = cycle;  // == 3M + K - 1
    result.macs = m * m * k;
    result.pe_active_cycles = m * m * stream_cycles;
    return result;
}

GemvBaselineResult run_gemv_baseline_circconv(const vsa::Hypervector& a,
                                              const vsa::Hypervector& b,
                                              std::uint64_t cell_dim) {
    if (a.dim() != b.dim()) {
        throw validation_error("run_gemv_baseline_circconv: dimension mismatch");
    }
    const std::uint64_t d = a.dim();
    const std::uint64_t m = cell_dim;
    if (d < 1 || m < 1) throw validation_error("run_gemv_baseline_circconv: empty input");

    GemvBaselineResult result;
    result.footprint_elems = d * d;
    result.output.elems.assign(d, 0.0);

    // Materialized circulant: circ[n][j] = a[(n - j) mod d]; C = circ * b.
    // One systolic cell walks ceil(d/M)^2 tiles sequentially, 3M cycles each.
    const std::uint64_t tiles_per_dim = mapping::ceil_div(d, m);
    for (std::uint64_t rt = 0; rt < tiles_per_dim; ++rt) {
        for (std::uint64_t ct = 0; ct < tiles_per_dim; ++ct) {
            const std::uint64_t n_lo = rt * m, n_hi = std::min(d, n_lo + m);
            const std::uint64_t j_lo = ct * m, j_hi = std::min(d, j_lo + m);
            for (std::uint64_t n = n_lo; n < n_hi; ++n) {
                double acc = result.output[n];
                for (std::uint64_t j = j_lo; j < j_hi; ++j) {
                    acc += a[(n + d - j) % d] * b[j];
                }
                result.output[n] = acc;
            }
            result.cycles += 3 * m;
        }
    }
    result.macs = d * d;
    return result;
}

SimdOpKind parse_simd_op(const std::string& name) {
    if (name == "sum") return SimdOpKind::sum;
    if (name == "mult" || name == "mul") return SimdOpKind::mult;
    if (name == "div") return SimdOpKind::div;
    if (name == "exp") return SimdOpKind::exp;
    if (name == "log") return SimdOpKind::log;
    if (name == "tanh") return SimdOpKind::tanh;
    if (name == "norm") return SimdOpKind::norm;
    if (name == "softmax") return SimdOpKind::softmax;
    if (name == "elem_add" || name == "add") return SimdOpKind::elem_add;
    if (name == "elem_mul") return SimdOpKind::elem_mul;
    throw validation_error("unknown SIMD op kind: " + name);
}

std::uint64_t simd_exec(SimdOpKind kind, std::uint64_t length, std::uint64_t lanes) {
    if (length < 1) throw validation_error("simd_exec: length must be >= 1");
    if (lanes < 1) throw validation_error("simd_exec: lanes must be >= 1");
    std::uint64_t latency = 1;
    switch (kind) {
        case SimdOpKind::sum:
        case SimdOpKind::mult:
        case SimdOpKind::elem_add:
        case SimdOpKind::elem_mul:
            latency = 1;
            break;
        case SimdOpKind::div:
        case SimdOpKind::exp:
        case SimdOpKind::log:
        case SimdOpKind::tanh:
            latency = 4;
            break;
        case SimdOpKind::norm:
        case SimdOpKind::softmax:
            latency = 2;  // two passes over the data
            break;
    }
    return mapping::ceil_div(length, lanes) * latency;
}

void CycleReport::add_kernel(const std::string& name, std::uint64_t cycles) {
    per_kernel_cycles[name] += cycles;
    total_cycles += cycles;
}

std::string CycleReport::to_json() const {
    std::ostringstream os;
    os << "{";
    os << "\"total_cycles\":" << total_cycles;
    os << ",\"simd_cycles\":" << simd_cycles;
    os << ",\"per_kernel_cycles\":{";
    bool first = true;
    for (const auto& [name, cycles] : per_kernel_cycles) {
        if (!first) os << ',';
        first = false;
        os << '"' << name << "\":" << cycles;
    }
    os << "},\"sram_a_reads\":" << sram_a_reads
       << ",\"sram_a_writes\":" << sram_a_writes
       << ",\"sram_b_reads\":" << sram_b_reads
       << ",\"sram_b_writes\":" << sram_b_writes
       << ",\"dram_bytes\":" << dram_bytes
       << ",\"stall_cycles\":" << stall_cycles
       << ",\"mac_count\":" << mac_count
       << ",\"simd_op_count\":" << simd_op_count
       << ",\"pe_active_cycles\":" << pe_active_cycles
       << ",\"utilization\":" << utilization
       << ",\"energy_joules\":" << energy_joules
       << ",\"tensor_elems\":" << tensor_elems
       << ",\"storage_bytes\":" << storage_bytes
       << ",\"storage_bytes_fp32\":" << storage_bytes_fp32 << "}";
    return os.str();
}

void account_memory(const KernelDescriptor& kernel, const ArrayConfig& config,
                    CycleReport& report) {
    const std::uint64_t elem_bytes = config.element_bytes();
    const std::uint64_t n = config.num_arrays;
    const std::uint64_t m = config.pes_per_array;
    const std::uint64_t d = kernel.d;

    // Capacity: double-buffered stationary tiles live in SRAM A, the
    // circularly extended stream and outputs in SRAM B.
    const std::uint64_t stationary_bytes = 2 * n * m * elem_bytes;
    if (stationary_bytes > config.sram_a_bytes) {
        throw capacity_error("kernel " + kernel.name + ": stationary tile set (" +
                             std::to_string(stationary_bytes) +
                             " B double-buffered) exceeds SRAM A (" +
                             std::to_string(config.sram_a_bytes) + " B)");
    }
    const std::uint64_t stream_bytes = 2 * (2 * d - 1 + d) * elem_bytes;
    if (stream_bytes > config.sram_b_bytes) {
        throw capacity_error("kernel " + kernel.name + ": stream+output buffers (" +
                             std::to_string(stream_bytes) +
                             " B double-buffered) exceed SRAM B (" +
                             std::to_string(config.sram_b_bytes) + " B)");
    }

    const std::uint64_t t = mapping::tile_latency(d, m);
    const std::uint64_t periods = mapping::ceil_div(kernel.duration_cycles, t);
    if (kernel.mode == mapping::MappingMode::spatial) {
        report.sram_a_reads += d * periods;  // stationary vector
        report.sram_b_reads += d * periods;  // broadcast stream
    } else {
        report.sram_a_reads += m * n * periods;
        report.sram_b_reads += d * n * periods;
    }
    report.sram_b_writes += d * kernel.k;  // one output vector per convolution
    report.dram_bytes += kernel.unique_elems * elem_bytes;

    // Idealized double buffering: the next tile loads during the current
    // tile's T cycles; only the shortfall stalls.
    const std::uint64_t load_bytes =
        mapping::mem_reads(kernel.mode, d, n, m) * elem_bytes;
    const std::uint64_t load_cycles =
        mapping::ceil_div(load_bytes, config.dram_bandwidth_bytes_per_cycle);
    if (load_cycles > t) report.stall_cycles += (load_cycles - t) * periods;
}

double energy_estimate(const CycleReport& report, const EnergyCoeffs& coeffs) {
    const double pj =
        static_cast<double>(report.mac_count) * coeffs.mac_pj +
        static_cast<double>(report.sram_a_reads + report.sram_a_writes) *
            coeffs.sram_a_access_pj +
        static_cast<double>(report.sram_b_reads + report.sram_b_writes) *
            coeffs.sram_b_access_pj +
        static_cast<double>(report.dram_bytes) * coeffs.dram_byte_pj +
        static_cast<double>(report.simd_op_count) * coeffs.simd_op_pj;
    return pj * 1e-12;
}

void finalize_report(CycleReport& report, const ArrayConfig& config) {
    if (report.total_cycles > 0) {
        report.utilization =
            static_cast<double>(report.pe_active_cycles) /
            (static_cast<double>(report.total_cycles) *
             static_cast<double>(config.total_pes()));
    }
    report.energy_joules = energy_estimate(report, config.energy);
}

MappedConvResult run_mapped_circconv(
    const std::vector<std::pair<vsa::Hypervector, vsa::Hypervector>>& conv_pairs,
    mapping::MappingMode mode, const ArrayConfig& config) {
    if (conv_pairs.empty()) {
        throw validation_error("run_mapped_circconv: no convolutions");
    }
    const std::uint64_t n = config.num_arrays;
    const std::uint64_t m = config.pes_per_array;
    const std::uint64_t k = conv_pairs.size();
    const std::uint64_t d = conv_pairs.front().first.dim();
    for (const auto& [a, b] : conv_pairs) {
        if (a.dim() != d || b.dim() != d) {
            throw validation_error("run_mapped_circconv: mixed dimensions");
        }
    }

    MappedConvResult result;
    result.outputs.assign(k, vsa::Hypervector(std::vector<double>(d, 0.0)));
    const std::uint64_t reduce_cycles_per_fold =
        mapping::ceil_div(d, config.simd_lanes);

    // Accumulate one tile's rotated partial into a convolution's output.
    auto accumulate = [&](std::size_t conv, const ConvRunResult& tile,
                          std::uint64_t elem_offset) {
        auto& out = result.outputs[conv];
        for (std::uint64_t u = 0; u < d; ++u) {
            out[(u + elem_offset) % d] += tile.output[u];
        }
        result.macs += tile.macs;
        result.pe_active_cycles += tile.pe_active_cycles;
    };

    if (mode == mapping::MappingMode::temporal) {
        // Up to N convolutions in parallel, each folded over time on its array.
        const std::uint64_t folds = mapping::ceil_div(d, m);
        const std::uint64_t rounds = mapping::ceil_div(k, n);
        for (std::uint64_t round = 0; round < rounds; ++round) {
            const std::uint64_t lo = round * n;
            const std::uint64_t hi = std::min<std::uint64_t>(k, lo + n);
            for (std::uint64_t fold = 0; fold < folds; ++fold) {
                std::uint64_t fold_cycles = 0;
                for (std::uint64_t conv = lo; conv < hi; ++conv) {
                    const auto& [a, b] = conv_pairs[conv];
                    const std::uint64_t slice_lo = fold * m;
                    const std::uint64_t slice_hi = std::min<std::uint64_t>(d, slice_lo + m);
                    std::span<const double> slice(a.elems.data() + slice_lo,
                                                  slice_hi - slice_lo);
                    ConvRunResult tile = run_bs_tile(slice, b.elems, m);
                    if (fold_cycles != 0 && tile.cycles != fold_cycles) {
                        throw infeasible_error("temporal folds diverged in cycles");
                    }
                    fold_cycles = tile.cycles;
                    accumulate(conv, tile, slice_lo);
                    if (fold > 0) result.simd_reduce_cycles += reduce_cycles_per_fold;
                }
                result.array_cycles += fold_cycles;
            }
        }
    } else {
        // One convolution at a time, its stationary vector split across the
        // N arrays; ceil(d / (N*M)) sequential passes.
        const std::uint64_t pass_span = n * m;
        const std::uint64_t passes = mapping::ceil_div(d, pass_span);
        for (std::uint64_t conv = 0; conv < k; ++conv) {
            const auto& [a, b] = conv_pairs[conv];
            std::uint64_t tiles_done = 0;
            for (std::uint64_t pass = 0; pass < passes; ++pass) {
                std::uint64_t pass_cycles = 0;
                for (std::uint64_t array = 0; array < n; ++array) {
                    const std::uint64_t slice_lo = pass * pass_span + array * m;
                    if (slice_lo >= d) break;
                    const std::uint64_t slice_hi = std::min<std::uint64_t>(d, slice_lo + m);
                    std::span<const double> slice(a.elems.data() + slice_lo,
                                                  slice_hi - slice_lo);
                    ConvRunResult tile = run_bs_tile(slice, b.elems, m);
                    if (pass_cycles != 0 && tile.cycles != pass_cycles) {
                        throw infeasible_error("spatial folds diverged in cycles");
                    }
                    pass_cycles = tile.cycles;
                    accumulate(conv, tile, slice_lo);
                    ++tiles_done;
                }
                result.array_cycles += pass_cycles;
            }
            if (tiles_done > 1) {
                result.simd_reduce_cycles += (tiles_done - 1) * reduce_cycles_per_fold;
            }
        }
    }
    return result;
}

}  // namespace cogsim::sim
