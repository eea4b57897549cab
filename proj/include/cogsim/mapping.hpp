#pragma once

// Analytical spatial/temporal mapping models for the bubble-streaming
// array, the adaptive mapping chooser, scale-up/scale-out scheme selection
// and the roofline arithmetic-intensity expressions.
//
// Symbols: N arrays of M PEs each; k circular convolutions of dimension d;
// one tile takes T = 3M + d - 1 cycles.
//   spatial   C_S = k * ceil(d / (N*M)) * T,  B_S = 2d reads per T
//   temporal  C_T = ceil(k/N) * ceil(d/M) * T, B_T = (d+M)*N reads per T

#include <cstdint>
#include <string>

namespace cogsim::mapping {

enum class MappingMode { spatial, temporal };

std::string to_string(MappingMode mode);

struct MappingDecision {
    MappingMode mode = MappingMode::spatial;
    std::uint64_t latency_cycles = 0;    // C_S or C_T
    std::uint64_t mem_reads_per_t = 0;   // B_S or B_T
    std::uint64_t folds = 0;             // sequential fold steps per conv
    std::uint64_t parallel_convs = 1;    // convs in flight per round
    bool bandwidth_warning = false;      // neither mode fits the budget
};

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return (a + b - 1) / b;
}

// T = 3M + d - 1: M cycles loading the stationary vector, 2M for the
// streamed vector to reach the final PE, d-1 for the remaining outputs.
std::uint64_t tile_latency(std::uint64_t d, std::uint64_t m);

std::uint64_t latency_spatial(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                              std::uint64_t m);
std::uint64_t latency_temporal(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                               std::uint64_t m);

std::uint64_t mem_reads(MappingMode mode, std::uint64_t d, std::uint64_t n,
                        std::uint64_t m);

// Lower latency wins; ties break toward fewer memory reads per T. If the
// winner needs more bandwidth than `bandwidth_limit` reads per T, the other
// mode is used when it fits; otherwise the winner keeps a warning flag.
// bandwidth_limit == 0 means unconstrained.
MappingDecision choose_mapping(std::uint64_t k, std::uint64_t d, std::uint64_t n,
                               std::uint64_t m, std::uint64_t bandwidth_limit = 0);

enum class RooflineKind { bs_dataflow, gemv_gpu };

// FLOPs per element transferred for a d-dimensional circular convolution:
//   bs_dataflow: d*(2d-1) / (3d)      = (2d-1)/3
//   gemv_gpu:    d*(2d-1) / (d^2+2d)  = (2d-1)/(d+2)
double roofline_ai(RooflineKind kind, std::uint64_t d);

enum class Scheme {
    scale_up_gemm,
    scale_out_gemm,
    scale_up_conv,
    scale_out_conv,
    scale_out_gemm_conv,
};

std::string to_string(Scheme scheme);

struct OpDescriptor {
    bool is_circconv = false;
    bool mixed_ready_set = false;  // both neural and symbolic ops ready
    std::uint64_t d = 0;           // circconv dimension
    std::uint64_t rows = 0, cols = 0, inner = 0;  // gemm dims
};

// Circular convolutions: d > M composes cells into scale-up arrays; d <= M
// scales out over cells and columns. GEMMs scale out unless every dim
// covers the whole array. A mixed ready set partitions cells between both.
Scheme choose_scale(const OpDescriptor& op, std::uint64_t n, std::uint64_t m,
                    std::uint64_t cell_rows, std::uint64_t cell_cols);

}  // namespace cogsim::mapping
