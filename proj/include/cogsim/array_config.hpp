#pragma once

// Hardware shape of the modeled accelerator. The default profile is 16
// cells of 32x32 reconfigurable PEs composing N=32 logical arrays of M=512
// PEs, a 512-lane SIMD unit, and double-buffered SRAMs of 256 kB (A, shared
// weights) and 4 MB (B, distributed streams).

#include <cstdint>
#include <string>

#include "cogsim/precision.hpp"

namespace cogsim::sim {

// Per-event energy coefficients in picojoules. Synthetic defaults in the
// range of published 28nm-class figures; override via the config file.
struct EnergyCoeffs {
    double mac_pj = 0.5;
    double sram_a_access_pj = 6.0;
    double sram_b_access_pj = 12.0;
    double dram_byte_pj = 120.0;
    double simd_op_pj = 0.8;
};

struct ArrayConfig {
    std::uint64_t num_arrays = 32;      // N
    std::uint64_t pes_per_array = 512;  // M
    std::uint64_t num_cells = 16;
    std::uint64_t cell_rows = 32;
    std::uint64_t cell_cols = 32;
    std::uint64_t simd_lanes = 512;
    std::uint64_t sram_a_bytes = 262144;
    std::uint64_t sram_b_bytes = 4194304;
    std::uint64_t dram_bandwidth_bytes_per_cycle = 64;
    quant::QuantMode precision = quant::QuantMode::int8_symmetric;
    EnergyCoeffs energy;

    std::uint64_t total_pes() const { return num_cells * cell_rows * cell_cols; }
    std::uint64_t element_bytes() const {
        return precision == quant::QuantMode::fp32 ? 4 : 1;
    }

    // N * M must cover exactly the PEs of the physical cells.
    void validate() const;

    static ArrayConfig cogsys_default() { return ArrayConfig{}; }
    static ArrayConfig load_json_file(const std::string& path);
    std::string to_json() const;
};

}  // namespace cogsim::sim
