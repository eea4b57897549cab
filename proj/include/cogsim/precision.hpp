#pragma once

// 8-bit quantization paths for vectors and matrices: symmetric per-tensor
// int8 (no zero-point) and an emulated fp8 e4m3 format with saturation.
// Bipolar +/-1 data is exactly representable in both modes, so quantized
// runs of the factorizer reproduce the fp32 reference bit for bit.

#include <cstdint>
#include <string>
#include <vector>

#include "cogsim/vsa.hpp"

namespace cogsim::quant {

enum class QuantMode { fp32, fp8_e4m3, int8_symmetric };

QuantMode parse_quant_mode(const std::string& name);
std::string to_string(QuantMode mode);

struct QuantScheme {
    QuantMode mode = QuantMode::fp32;
    double scale = 1.0;  // int8 only, per-tensor, > 0
};

// Quantized tensor with its stored 8-bit codes. For fp32 the codes vector
// stays empty and values round-trip through float.
struct QuantizedVector {
    QuantScheme scheme;
    std::vector<std::int8_t> int_codes;   // int8_symmetric
    std::vector<std::uint8_t> fp8_codes;  // fp8_e4m3
    std::vector<float> fp32_values;       // fp32
    std::size_t dim = 0;
};

// fp8 e4m3: 1 sign, 4 exponent (bias 7), 3 mantissa bits. Saturating: values
// beyond +/-448 clamp to the max finite; the all-ones NaN slot is never
// produced. Round to nearest, ties to even mantissa.
std::uint8_t fp8_e4m3_encode(double x);
double fp8_e4m3_decode(std::uint8_t code);
double fp8_e4m3_round(double x);

QuantizedVector quantize(const vsa::Hypervector& v, const QuantScheme& scheme);
vsa::Hypervector dequantize(const QuantizedVector& q);

// quantize followed by dequantize; the values the simulator computes on.
vsa::Hypervector quant_roundtrip(const vsa::Hypervector& v, const QuantScheme& scheme);

struct QuantError {
    double max_abs = 0.0;
    double rms = 0.0;
    double cosine = 0.0;
};

QuantError quant_error(const vsa::Hypervector& original,
                       const vsa::Hypervector& roundtripped);

// Stored bytes for a tensor of num_elems under the given mode (8-bit modes
// store one byte per element; fp32 stores four).
std::uint64_t storage_bytes(std::uint64_t num_elems, QuantMode mode);

}  // namespace cogsim::quant
