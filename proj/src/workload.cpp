#include "cogsim/workload.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cogsim/common.hpp"

namespace cogsim::workload {

using nlohmann::json;

OpKind parse_op_kind(const std::string& name) {
    if (name == "gemm") return OpKind::gemm;
    if (name == "conv") return OpKind::conv;
    if (name == "circconv") return OpKind::circconv;
    if (name == "elemwise") return OpKind::elemwise;
    if (name == "simd-special") return OpKind::simd_special;
    throw validation_error("unknown op kind: " + name);
}

std::string to_string(OpKind kind) {
    switch (kind) {
        case OpKind::gemm: return "gemm";
        case OpKind::conv: return "conv";
        case OpKind::circconv: return "circconv";
        case OpKind::elemwise: return "elemwise";
        case OpKind::simd_special: return "simd-special";
    }
    return "?";
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw validation_error(where + ": unknown field \"" + it.key() + "\"");
        }
    }
}

std::uint64_t positive_field(const json& obj, const char* key,
                             const std::string& where) {
    if (!obj.contains(key)) {
        throw validation_error(where + ": missing field \"" + key + "\"");
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw validation_error(where + ": field \"" + key +
                               "\" must be a positive integer");
    }
    return v.get<std::uint64_t>();
}

OpDims parse_dims(const json& jd, OpKind kind, const std::string& where) {
    OpDims dims;
    switch (kind) {
        case OpKind::gemm:
        case OpKind::conv:
            reject_unknown(jd, {"rows", "cols", "inner"}, where);
            dims.rows = positive_field(jd, "rows", where);
            dims.cols = positive_field(jd, "cols", where);
            dims.inner = positive_field(jd, "inner", where);
            break;
        case OpKind::circconv:
            reject_unknown(jd, {"k", "d"}, where);
            dims.k = positive_field(jd, "k", where);
            dims.d = positive_field(jd, "d", where);
            break;
        case OpKind::elemwise:
        case OpKind::simd_special:
            reject_unknown(jd, {"length", "op_kind"}, where);
            dims.length = positive_field(jd, "length", where);
            if (jd.contains("op_kind")) {
                dims.op_kind = jd.at("op_kind").get<std::string>();
            } else {
                dims.op_kind = "elem_add";
            }
            break;
    }
    return dims;
}

json dims_to_json(const OpSpec& op) {
    json jd;
    switch (op.kind) {
        case OpKind::gemm:
        case OpKind::conv:
            jd["rows"] = op.dims.rows;
            jd["cols"] = op.dims.cols;
            jd["inner"] = op.dims.inner;
            break;
        case OpKind::circconv:
            jd["k"] = op.dims.k;
            jd["d"] = op.dims.d;
            break;
        case OpKind::elemwise:
        case OpKind::simd_special:
            jd["length"] = op.dims.length;
            jd["op_kind"] = op.dims.op_kind;
            break;
    }
    return jd;
}

}  // namespace

WorkloadSpec parse_workload(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("workload: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw validation_error("workload: document must be an object");
    reject_unknown(j, {"name", "binding_model", "precision", "batches", "tasks"},
                   "workload");

    WorkloadSpec spec;
    if (!j.contains("name") || !j.at("name").is_string()) {
        throw validation_error("workload: missing string field \"name\"");
    }
    spec.name = j.at("name").get<std::string>();

    if (j.contains("binding_model")) {
        const std::string bm = j.at("binding_model").get<std::string>();
        if (bm == "circular") {
            spec.binding_model = BindingModel::circular;
        } else if (bm == "elementwise") {
            spec.binding_model = BindingModel::elementwise;
        } else {
            throw validation_error("workload: binding_model must be \"circular\" or "
                                   "\"elementwise\", got \"" + bm + "\"");
        }
    }
    if (j.contains("precision")) {
        spec.precision = quant::parse_quant_mode(j.at("precision").get<std::string>());
    }
    if (j.contains("batches")) {
        spec.batches = positive_field(j, "batches", "workload");
    }
    if (!j.contains("tasks") || !j.at("tasks").is_array()) {
        throw validation_error("workload: missing array field \"tasks\"");
    }

    std::set<std::string> all_ids;
    for (std::size_t ti = 0; ti < j.at("tasks").size(); ++ti) {
        const json& jt = j.at("tasks")[ti];
        const std::string twhere = "tasks[" + std::to_string(ti) + "]";
        reject_unknown(jt, {"ops"}, twhere);
        if (!jt.contains("ops") || !jt.at("ops").is_array()) {
            throw validation_error(twhere + ": missing array field \"ops\"");
        }
        TaskSpec task;
        for (std::size_t oi = 0; oi < jt.at("ops").size(); ++oi) {
            const json& jo = jt.at("ops")[oi];
            const std::string owhere = twhere + ".ops[" + std::to_string(oi) + "]";
            reject_unknown(jo, {"id", "kind", "dims", "deps", "iterations"}, owhere);
            OpSpec op;
            if (!jo.contains("id") || !jo.at("id").is_string()) {
                throw validation_error(owhere + ": missing string field \"id\"");
            }
            op.id = jo.at("id").get<std::string>();
            if (!all_ids.insert(op.id).second) {
                throw validation_error(owhere + ": duplicate op id \"" + op.id + "\"");
            }
            if (!jo.contains("kind")) {
                throw validation_error(owhere + ": missing field \"kind\"");
            }
            op.kind = parse_op_kind(jo.at("kind").get<std::string>());
            if (!jo.contains("dims") || !jo.at("dims").is_object()) {
                throw validation_error(owhere + ": missing object field \"dims\"");
            }
            op.dims = parse_dims(jo.at("dims"), op.kind, owhere + ".dims");
            if (jo.contains("deps")) {
                for (const auto& dep : jo.at("deps")) {
                    op.deps.push_back(dep.get<std::string>());
                }
            }
            if (jo.contains("iterations")) {
                op.iterations = positive_field(jo, "iterations", owhere);
            }
            task.ops.push_back(std::move(op));
        }
        spec.tasks.push_back(std::move(task));
    }

    // Every dependency must name a declared op.
    for (const auto& task : spec.tasks) {
        for (const auto& op : task.ops) {
            for (const auto& dep : op.deps) {
                if (!all_ids.count(dep)) {
                    throw validation_error("op \"" + op.id +
                                           "\": unresolved dependency \"" + dep + "\"");
                }
            }
        }
    }

    if (spec.binding_model == BindingModel::elementwise) {
        for (const auto& task : spec.tasks) {
            for (const auto& op : task.ops) {
                if (op.kind == OpKind::circconv) {
                    throw validation_error(
                        "op \"" + op.id +
                        "\": circconv ops require binding_model \"circular\"");
                }
            }
        }
    }
    return spec;
}

WorkloadSpec load_workload_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("workload file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_workload(buf.str());
}

std::string emit_workload(const WorkloadSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["binding_model"] =
        spec.binding_model == BindingModel::circular ? "circular" : "elementwise";
    j["precision"] = quant::to_string(spec.precision);
    j["batches"] = spec.batches;
    j["tasks"] = json::array();
    for (const auto& task : spec.tasks) {
        json jt;
        jt["ops"] = json::array();
        for (const auto& op : task.ops) {
            json jo;
            jo["id"] = op.id;
            jo["kind"] = to_string(op.kind);
            jo["dims"] = dims_to_json(op);
            jo["deps"] = op.deps;
            jo["iterations"] = op.iterations;
            jt["ops"].push_back(jo);
        }
        j["tasks"].push_back(jt);
    }
    return j.dump(2);
}

bool operator==(const OpDims& a, const OpDims& b) {
    return a.rows == b.rows && a.cols == b.cols && a.inner == b.inner && a.k == b.k &&
           a.d == b.d && a.length == b.length && a.op_kind == b.op_kind;
}
bool operator==(const OpSpec& a, const OpSpec& b) {
    return a.id == b.id && a.kind == b.kind && a.dims == b.dims && a.deps == b.deps &&
           a.iterations == b.iterations;
}
bool operator==(const TaskSpec& a, const TaskSpec& b) { return a.ops == b.ops; }
bool operator==(const WorkloadSpec& a, const WorkloadSpec& b) {
    return a.name == b.name && a.binding_model == b.binding_model &&
           a.precision == b.precision && a.batches == b.batches && a.tasks == b.tasks;
}

namespace {

// Shapes are synthetic stand-ins with representative CNN / transformer
// proportions; only the symbolic (k, d) pairs are load-bearing.
TaskSpec nvsa_like_task(const std::string& prefix, std::uint64_t k, std::uint64_t d) {
    TaskSpec task;
    auto gemm = [&](const std::string& id, std::uint64_t r, std::uint64_t c,
                    std::uint64_t inner, std::vector<std::string> deps) {
        OpSpec op;
        op.id = prefix + id;
        op.kind = OpKind::gemm;
        op.dims.rows = r;
        op.dims.cols = c;
        op.dims.inner = inner;
        op.deps = std::move(deps);
        task.ops.push_back(op);
    };
    auto elem = [&](const std::string& id, OpKind kind, std::uint64_t len,
                    const std::string& unit, std::vector<std::string> deps) {
        OpSpec op;
        op.id = prefix + id;
        op.kind = kind;
        op.dims.length = len;
        op.dims.op_kind = unit;
        op.deps = std::move(deps);
        task.ops.push_back(op);
    };

    // Perception front-end: conv-lowered GEMM chain.
    gemm("conv1", 1024, 64, 147, {});
    elem("relu1", OpKind::elemwise, 1024 * 64, "elem_add", {prefix + "conv1"});
    gemm("conv2", 256, 128, 576, {prefix + "relu1"});
    elem("relu2", OpKind::elemwise, 256 * 128, "elem_add", {prefix + "conv2"});
    gemm("conv3", 64, 256, 1152, {prefix + "relu2"});
    gemm("fc", 64, 512, 256 * 4, {prefix + "conv3"});

    // Symbolic back-end: binding/unbinding block plus rule scoring.
    OpSpec conv;
    conv.id = prefix + "bind";
    conv.kind = OpKind::circconv;
    conv.dims.k = k;
    conv.dims.d = d;
    conv.deps = {prefix + "fc"};
    task.ops.push_back(conv);
    elem("norm", OpKind::simd_special, d, "norm", {prefix + "bind"});
    gemm("score", 32, 64, d, {prefix + "norm"});
    elem("softmax", OpKind::simd_special, 64, "softmax", {prefix + "score"});
    return task;
}

TaskSpec mimonet_like_task(const std::string& prefix, std::uint64_t k, std::uint64_t d) {
    TaskSpec task;
    auto push = [&](OpSpec op) { task.ops.push_back(std::move(op)); };
    auto gemm = [&](const std::string& id, std::uint64_t r, std::uint64_t c,
                    std::uint64_t inner, std::vector<std::string> deps) {
        OpSpec op;
        op.id = prefix + id;
        op.kind = OpKind::gemm;
        op.dims.rows = r;
        op.dims.cols = c;
        op.dims.inner = inner;
        op.deps = std::move(deps);
        push(op);
    };

    // Transformer-ish block with superposed inputs bound at d=64.
    OpSpec bind_in;
    bind_in.id = prefix + "bind_in";
    bind_in.kind = OpKind::circconv;
    bind_in.dims.k = k;
    bind_in.dims.d = d;
    push(bind_in);
    gemm("qkv", 192, 192, 64, {prefix + "bind_in"});
    OpSpec softmax;
    softmax.id = prefix + "attn_softmax";
    softmax.kind = OpKind::simd_special;
    softmax.dims.length = 192 * 64;
    softmax.dims.op_kind = "softmax";
    softmax.deps = {prefix + "qkv"};
    push(softmax);
    gemm("proj", 192, 64, 192, {prefix + "attn_softmax"});
    gemm("mlp", 192, 256, 64, {prefix + "proj"});
    OpSpec unbind;
    unbind.id = prefix + "unbind";
    unbind.kind = OpKind::circconv;
    unbind.dims.k = k;
    unbind.dims.d = d;
    unbind.deps = {prefix + "mlp"};
    push(unbind);
    return task;
}

}  // namespace

WorkloadSpec generate_builtin(const std::string& name, std::uint64_t scale,
                              const BuiltinOverrides& overrides) {
    if (scale < 1) throw validation_error("generate_builtin: scale must be >= 1");
    WorkloadSpec spec;
    spec.name = name;
    spec.binding_model = BindingModel::circular;
    spec.precision = quant::QuantMode::int8_symmetric;
    spec.batches = overrides.batches ? overrides.batches : 1;

    std::uint64_t k = 0, d = 0;
    if (name == "nvsa_like") {
        k = overrides.k ? overrides.k : 210;
        d = overrides.d ? overrides.d : 1024;
    } else if (name == "lvrf_like") {
        k = overrides.k ? overrides.k : 2575;
        d = overrides.d ? overrides.d : 1024;
    } else if (name == "mimonet_like") {
        k = overrides.k ? overrides.k : 8;
        d = overrides.d ? overrides.d : 64;
    } else {
        throw validation_error("unknown builtin workload: " + name);
    }

    for (std::uint64_t t = 0; t < scale; ++t) {
        const std::string prefix = "t" + std::to_string(t) + ".";
        if (name == "mimonet_like") {
            spec.tasks.push_back(mimonet_like_task(prefix, k, d));
        } else {
            spec.tasks.push_back(nvsa_like_task(prefix, k, d));
        }
    }
    return spec;
}

}  // namespace cogsim::workload
