#include "cogsim/precision.hpp"

#include <algorithm>
#include <cmath>

#include "cogsim/common.hpp"

namespace cogsim::quant {

namespace {

constexpr double kFp8Max = 448.0;   // 2^8 * 1.75, largest finite e4m3
constexpr int kFp8MinExp = -6;      // smallest normal exponent
constexpr int kFp8MaxExp = 8;
constexpr double kFp8SubnormalStep = 0x1.0p-9;  // 2^-6 / 8

// Round to nearest integer, ties to even. std::nearbyint honors the default
// FE_TONEAREST mode, which is exactly that.
double round_even(double x) { return std::nearbyint(x); }

void require_finite(const vsa::Hypervector& v) {
    for (double x : v.elems) {
        if (!std::isfinite(x)) {
            throw validation_error("quantize: non-finite input element");
        }
    }
}

}  // namespace

QuantMode parse_quant_mode(const std::string& name) {
    if (name == "fp32") return QuantMode::fp32;
    if (name == "fp8" || name == "fp8_e4m3") return QuantMode::fp8_e4m3;
    if (name == "int8" || name == "int8_symmetric") return QuantMode::int8_symmetric;
    throw validation_error("unknown precision mode: " + name);
}

std::string to_string(QuantMode mode) {
    switch (mode) {
        case QuantMode::fp32: return "fp32";
        case QuantMode::fp8_e4m3: return "fp8_e4m3";
        case QuantMode::int8_symmetric: return "int8_symmetric";
    }
    return "?";
}

std::uint8_t fp8_e4m3_encode(double x) {
    if (x == 0.0 || std::isnan(x)) return 0;
    const std::uint8_t sign = x < 0.0 ? 0x80 : 0x00;
    double a = std::fabs(x);
    if (a >= kFp8Max) return sign | 0x7e;  // saturate at e=15, m=6
    int exp = 0;
    if (a < std::ldexp(1.0, kFp8MinExp)) {
        // Subnormal range: value = m * 2^-9.
        const double m = round_even(a / kFp8SubnormalStep);
        if (m == 0.0) return sign;  // underflow to zero
        if (m < 8.0) {
            return sign | static_cast<std::uint8_t>(m);
        }
        exp = kFp8MinExp;  // rounded up into the smallest normal
        return sign | 0x08;
    }
    const double frac = std::frexp(a, &exp);  // a = frac * 2^exp, frac in [0.5, 1)
    exp -= 1;                                 // a = (2*frac) * 2^exp, 2*frac in [1, 2)
    double m = round_even((2.0 * frac - 1.0) * 8.0);
    if (m == 8.0) {
        m = 0.0;
        exp += 1;
    }
    if (exp > kFp8MaxExp || (exp == kFp8MaxExp && m > 6.0)) {
        return sign | 0x7e;
    }
    const std::uint8_t ebits = static_cast<std::uint8_t>(exp + 7);
    return sign | static_cast<std::uint8_t>(ebits << 3) | static_cast<std::uint8_t>(m);
}

double fp8_e4m3_decode(std::uint8_t code) {
    const double sign = (code & 0x80) ? -1.0 : 1.0;
    const int ebits = (code >> 3) & 0x0f;
    const int m = code & 0x07;
    if (ebits == 0) {
        return sign * static_cast<double>(m) * kFp8SubnormalStep;
    }
    return sign * std::ldexp(1.0 + static_cast<double>(m) / 8.0, ebits - 7);
}

double fp8_e4m3_round(double x) { return fp8_e4m3_decode(fp8_e4m3_encode(x)); }

QuantizedVector quantize(const vsa::Hypervector& v, const QuantScheme& scheme) {
    require_finite(v);
    QuantizedVector q;
    q.scheme = scheme;
    q.dim = v.dim();
    switch (scheme.mode) {
        case QuantMode::fp32:
            q.fp32_values.reserve(v.dim());
            for (double x : v.elems) q.fp32_values.push_back(static_cast<float>(x));
            break;
        case QuantMode::int8_symmetric: {
            if (!(scheme.scale > 0.0)) {
                throw validation_error("quantize: int8 scale must be > 0");
            }
            q.int_codes.reserve(v.dim());
            for (double x : v.elems) {
                double c = round_even(x / scheme.scale);
                c = std::clamp(c, -127.0, 127.0);
                q.int_codes.push_back(static_cast<std::int8_t>(c));
            }
            break;
        }
        case QuantMode::fp8_e4m3:
            q.fp8_codes.reserve(v.dim());
            for (double x : v.elems) q.fp8_codes.push_back(fp8_e4m3_encode(x));
            break;
    }
    return q;
}

vsa::Hypervector dequantize(const QuantizedVector& q) {
    std::vector<double> out;
    out.reserve(q.dim);
    switch (q.scheme.mode) {
        case QuantMode::fp32:
            for (float x : q.fp32_values) out.push_back(static_cast<double>(x));
            break;
        case QuantMode::int8_symmetric:
            for (std::int8_t c : q.int_codes) {
                out.push_back(static_cast<double>(c) * q.scheme.scale);
            }
            break;
        case QuantMode::fp8_e4m3:
            for (std::uint8_t c : q.fp8_codes) out.push_back(fp8_e4m3_decode(c));
            break;
    }
    return vsa::Hypervector(std::move(out), vsa::VectorTag::quantized);
}

vsa::Hypervector quant_roundtrip(const vsa::Hypervector& v, const QuantScheme& scheme) {
    return dequantize(quantize(v, scheme));
}

QuantError quant_error(const vsa::Hypervector& original,
                       const vsa::Hypervector& roundtripped) {
    if (original.dim() != roundtripped.dim()) {
        throw validation_error("quant_error: dimension mismatch");
    }
    QuantError e;
    double sq = 0.0;
    for (std::size_t i = 0; i < original.dim(); ++i) {
        const double diff = original[i] - roundtripped[i];
        e.max_abs = std::max(e.max_abs, std::fabs(diff));
        sq += diff * diff;
    }
    e.rms = original.dim() ? std::sqrt(sq / static_cast<double>(original.dim())) : 0.0;
    e.cosine = vsa::cosine(original, roundtripped);
    return e;
}

std::uint64_t storage_bytes(std::uint64_t num_elems, QuantMode mode) {
    return mode == QuantMode::fp32 ? num_elems * 4 : num_elems;
}

}  // namespace cogsim::quant
