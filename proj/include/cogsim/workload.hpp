#pragma once

// Declarative workload documents: a JSON format with a strict parser
// (unknown fields rejected), an emitter, and built-in synthetic generators
// shaped like the three reference workloads. Convolutions arrive
// pre-lowered to GEMM dims so the parser stays minimal.

#include <cstdint>
#include <string>
#include <vector>

#include "cogsim/precision.hpp"

namespace cogsim::workload {

enum class OpKind { gemm, conv, circconv, elemwise, simd_special };

OpKind parse_op_kind(const std::string& name);
std::string to_string(OpKind kind);

enum class BindingModel { circular, elementwise };

struct OpDims {
    // gemm / conv (lowered): rows x cols x inner
    std::uint64_t rows = 0, cols = 0, inner = 0;
    // circconv: k convolutions of dimension d
    std::uint64_t k = 0, d = 0;
    // elemwise / simd_special: vector length and unit op
    std::uint64_t length = 0;
    std::string op_kind;  // SIMD op name, e.g. "softmax"
};

struct OpSpec {
    std::string id;
    OpKind kind = OpKind::gemm;
    OpDims dims;
    std::vector<std::string> deps;
    std::uint64_t iterations = 1;
};

struct TaskSpec {
    std::vector<OpSpec> ops;
};

struct WorkloadSpec {
    std::string name;
    BindingModel binding_model = BindingModel::circular;
    quant::QuantMode precision = quant::QuantMode::int8_symmetric;
    std::uint64_t batches = 1;
    std::vector<TaskSpec> tasks;
};

// Parses and validates a workload document. Errors carry the offending
// field or token. Round-trip guarantee: parse(emit(spec)) == spec.
WorkloadSpec parse_workload(const std::string& json_text);
WorkloadSpec load_workload_file(const std::string& path);
std::string emit_workload(const WorkloadSpec& spec);

bool operator==(const OpDims& a, const OpDims& b);
bool operator==(const OpSpec& a, const OpSpec& b);
bool operator==(const TaskSpec& a, const TaskSpec& b);
bool operator==(const WorkloadSpec& a, const WorkloadSpec& b);

// Built-in generators. `scale` replicates isomorphic tasks; it multiplies
// op counts, never dimensions. Symbolic blocks default to k=210/d=1024
// (nvsa_like), k=2575/d=1024 (lvrf_like) and d=64 (mimonet_like); both
// knobs are overridable.
struct BuiltinOverrides {
    std::uint64_t k = 0;        // 0 keeps the builtin default
    std::uint64_t d = 0;
    std::uint64_t batches = 0;
};
WorkloadSpec generate_builtin(const std::string& name, std::uint64_t scale = 1,
                              const BuiltinOverrides& overrides = {});

}  // namespace cogsim::workload
