#pragma once

// Register-transfer model of the reconfigurable nsPE array. Each PE carries
// four registers (stationary, passing, streaming, partial sum) and runs in
// one of three modes (load, gemm, circconv).
//
// Bubble-streaming circular convolution on a column of M PEs: the streamed
// vector advances one PE per two cycles through the passing register, the
// stationary slice sits in the bottom PEs, and partial sums ripple down one
// PE per cycle. End-to-end tile latency is 3M + d - 1 cycles (4d - 1 when
// M = d), derived by the simulation itself, never assumed.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogsim/array_config.hpp"
#include "cogsim/mapping.hpp"
#include "cogsim/vsa.hpp"

namespace cogsim::sim {

enum class PeMode { load, gemm, circconv };

struct PEState {
    double stationary = 0.0;
    double passing = 0.0;
    double streaming = 0.0;
    double psum = 0.0;  // held in a >= 32-bit accumulator (double here)
    PeMode mode = PeMode::load;
};

// Optional per-cycle trace row; wired to a CSV sink for small instances.
struct TraceRow {
    std::uint64_t cycle = 0;
    std::string unit;
    std::uint64_t pe = 0;
    double stationary = 0.0;
    double passing = 0.0;
    double streaming = 0.0;
    double psum = 0.0;
};
using TraceSink = std::function<void(const TraceRow&)>;

struct CycleReport {
    std::uint64_t total_cycles = 0;
    std::map<std::string, std::uint64_t> per_kernel_cycles;
    std::uint64_t simd_cycles = 0;
    std::uint64_t sram_a_reads = 0;
    std::uint64_t sram_a_writes = 0;
    std::uint64_t sram_b_reads = 0;
    std::uint64_t sram_b_writes = 0;
    std::uint64_t dram_bytes = 0;
    std::uint64_t stall_cycles = 0;
    std::uint64_t mac_count = 0;
    std::uint64_t simd_op_count = 0;
    std::uint64_t pe_active_cycles = 0;
    double utilization = 0.0;  // pe_active / (total_cycles * PEs)
    double energy_joules = 0.0;
    // Tensor-set storage accounting, reported for footprint comparisons:
    // bytes at the active precision and what the same tensors take in fp32.
    std::uint64_t tensor_elems = 0;
    std::uint64_t storage_bytes = 0;
    std::uint64_t storage_bytes_fp32 = 0;

    void add_kernel(const std::string& name, std::uint64_t cycles);
    std::string to_json() const;
};

struct ConvRunResult {
    vsa::Hypervector output;
    std::uint64_t cycles = 0;
    std::uint64_t macs = 0;
    std::uint64_t pe_active_cycles = 0;
    // Stream-phase cycle (0-based) at which each output element appeared.
    std::vector<std::uint64_t> output_cycles;
};

// One bubble-streaming tile: stationary slice (length s <= column_len, with
// s <= d) against the circularly extended stream b[0..d-1], b[0..d-2].
// Output n of the tile is sum_k slice[k] * stream[(n - k) mod d].
ConvRunResult run_bs_tile(std::span<const double> stationary_slice,
                          std::span<const double> stream,
                          std::uint64_t column_len,
                          const TraceSink& trace = nullptr,
                          const std::string& unit_name = "col0");

// Full circular convolution on one column of M PEs; requires d <= M.
ConvRunResult run_circconv_bs(const vsa::Hypervector& a, const vsa::Hypervector& b,
                              std::uint64_t column_len,
                              const TraceSink& trace = nullptr);

// Circular correlation via reversing the stationary vector.
ConvRunResult run_circcorr_bs(const vsa::Hypervector& a, const vsa::Hypervector& b,
                              std::uint64_t column_len,
                              const TraceSink& trace = nullptr);

// Column-wise parallelism: up to cell_cols independent convolutions on one
// cell, one per column, finishing together.
struct CwpRunResult {
    std::vector<vsa::Hypervector> outputs;
    std::uint64_t cycles = 0;
    std::uint64_t macs = 0;
    std::uint64_t pe_active_cycles = 0;
};
CwpRunResult run_cell_circconv_cwp(
    const std::vector<std::pair<vsa::Hypervector, vsa::Hypervector>>& pairs,
    std::uint64_t cell_rows, std::uint64_t cell_cols);

struct GemmRunResult {
    std::vector<double> output;  // rows x cols, row-major
    std::uint64_t rows = 0, cols = 0;
    std::uint64_t cycles = 0;
    std::uint64_t macs = 0;
    std::uint64_t pe_active_cycles = 0;
};

// Weight-stationary systolic GEMM of w (MxM) by x (MxK) on an MxM cell:
// M load + skewed fill/drain + final writeback = 3M + K - 1 cycles.
GemmRunResult run_gemm(const std::vector<double>& w, std::uint64_t m,
                       const std::vector<double>& x, std::uint64_t k,
                       const TraceSink& trace = nullptr);

struct GemvBaselineResult {
    vsa::Hypervector output;
    std::uint64_t cycles = 0;
    std::uint64_t footprint_elems = 0;  // d^2 circulant matrix
    std::uint64_t macs = 0;
};

// TPU-like baseline: materializes the d x d circulant of a and runs it as
// tiled GEMV on one cell, sequentially (no column-wise parallelism version
// exists for GEMV on a systolic cell). ceil(d/M)^2 tiles of 3M cycles each.
GemvBaselineResult run_gemv_baseline_circconv(const vsa::Hypervector& a,
                                              const vsa::Hypervector& b,
                                              std::uint64_t cell_dim);

// Streamed data footprint of one bubble-streaming convolution: the three
// length-d vectors (stationary, stream, output).
inline std::uint64_t bs_streamed_footprint_elems(std::uint64_t d) { return 3 * d; }

enum class SimdOpKind { sum, mult, div, exp, log, tanh, norm, softmax, elem_add, elem_mul };

SimdOpKind parse_simd_op(const std::string& name);

// cycles = ceil(L / lanes) * latency(kind); latencies default to 1 for
// add/mul/sum, 4 for div/exp/log/tanh, 2 passes for norm/softmax.
std::uint64_t simd_exec(SimdOpKind kind, std::uint64_t length, std::uint64_t lanes);

struct KernelDescriptor {
    std::string name;
    mapping::MappingMode mode = mapping::MappingMode::temporal;
    std::uint64_t k = 1;  // convolutions
    std::uint64_t d = 1;
    std::uint64_t duration_cycles = 0;  // total cycles the kernel occupies
    std::uint64_t unique_elems = 0;     // compulsory DRAM traffic, elements
};

// SRAM/DRAM traffic for one mapped kernel: B_S = 2d or B_T = (d+M)*N reads
// per T cycles, stationary loads to SRAM A, stream reads from SRAM B.
// Double buffering hides tile loads unless the DRAM bandwidth cannot fill a
// tile within T cycles, in which case the shortfall is charged as stalls.
// Throws capacity_error naming the offending buffer when a tile cannot fit.
void account_memory(const KernelDescriptor& kernel, const ArrayConfig& config,
                    CycleReport& report);

double energy_estimate(const CycleReport& report, const EnergyCoeffs& coeffs);

// Finalize utilization and energy against a config.
void finalize_report(CycleReport& report, const ArrayConfig& config);

struct MappedConvResult {
    std::vector<vsa::Hypervector> outputs;  // one per convolution
    std::uint64_t array_cycles = 0;         // matches C_S / C_T exactly
    std::uint64_t simd_reduce_cycles = 0;   // cross-fold partial-sum adds
    std::uint64_t macs = 0;
    std::uint64_t pe_active_cycles = 0;
};

// Executes k circular convolutions under the chosen mapping by running
// every fold tile through the register-transfer model. Spatial mapping
// splits one convolution's stationary vector across arrays working in
// lockstep; temporal mapping runs up to N convolutions in parallel, each
// folded over time. Cross-fold partials are combined by the SIMD unit.
MappedConvResult run_mapped_circconv(
    const std::vector<std::pair<vsa::Hypervector, vsa::Hypervector>>& conv_pairs,
    mapping::MappingMode mode, const ArrayConfig& config);

}  // namespace cogsim::sim
