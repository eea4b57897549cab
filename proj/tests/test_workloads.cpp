#include <doctest.h>

#include "cogsim/common.hpp"
#include "cogsim/opgraph.hpp"
#include "cogsim/workload.hpp"

using namespace cogsim;
using workload::WorkloadSpec;

namespace {

const char* kMinimalDoc = R"({
  "name": "mini",
  "binding_model": "circular",
  "precision": "int8",
  "batches": 1,
  "tasks": [
    {"ops": [
      {"id": "g0", "kind": "gemm", "dims": {"rows": 8, "cols": 8, "inner": 8},
       "deps": [], "iterations": 1}
    ]}
  ]
})";

}  // namespace

TEST_CASE("minimal document parses to one task with one op") {
    const WorkloadSpec spec = workload::parse_workload(kMinimalDoc);
    CHECK(spec.name == "mini");
    REQUIRE(spec.tasks.size() == 1);
    REQUIRE(spec.tasks[0].ops.size() == 1);
    CHECK(spec.tasks[0].ops[0].kind == workload::OpKind::gemm);
    CHECK(spec.tasks[0].ops[0].dims.rows == 8);
}

TEST_CASE("negative or missing dims are rejected naming the field") {
    const std::string bad = R"({"name":"x","tasks":[{"ops":[
        {"id":"c0","kind":"circconv","dims":{"k":4,"d":-3}}]}]})";
    try {
        workload::parse_workload(bad);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("\"d\"") != std::string::npos);
    }
}

TEST_CASE("unknown fields and kinds are rejected") {
    CHECK_THROWS_AS(workload::parse_workload(R"({"name":"x","tasks":[],"zap":1})"),
                    validation_error);
    CHECK_THROWS_AS(workload::parse_workload(
                        R"({"name":"x","tasks":[{"ops":[
                            {"id":"a","kind":"fft","dims":{}}]}]})"),
                    validation_error);
    CHECK_THROWS_AS(workload::parse_workload("{nope"), validation_error);
}

TEST_CASE("unresolved and duplicate ids are rejected") {
    CHECK_THROWS_AS(workload::parse_workload(
                        R"({"name":"x","tasks":[{"ops":[
                            {"id":"a","kind":"gemm",
                             "dims":{"rows":1,"cols":1,"inner":1},"deps":["ghost"]}]}]})"),
                    validation_error);
    CHECK_THROWS_AS(workload::parse_workload(
                        R"({"name":"x","tasks":[{"ops":[
                            {"id":"a","kind":"gemm","dims":{"rows":1,"cols":1,"inner":1}},
                            {"id":"a","kind":"gemm","dims":{"rows":1,"cols":1,"inner":1}}]}]})"),
                    validation_error);
}

TEST_CASE("elementwise binding model cannot carry circconv ops") {
    CHECK_THROWS_AS(workload::parse_workload(
                        R"({"name":"x","binding_model":"elementwise","tasks":[{"ops":[
                            {"id":"c","kind":"circconv","dims":{"k":1,"d":8}}]}]})"),
                    validation_error);
}

TEST_CASE("emit then parse round-trips to an identical spec") {
    for (const char* name : {"nvsa_like", "lvrf_like", "mimonet_like"}) {
        const WorkloadSpec spec = workload::generate_builtin(name, 2);
        const WorkloadSpec back = workload::parse_workload(workload::emit_workload(spec));
        CHECK(back == spec);
    }
    const WorkloadSpec mini = workload::parse_workload(kMinimalDoc);
    CHECK(workload::parse_workload(workload::emit_workload(mini)) == mini);
}

TEST_CASE("builtin symbolic blocks carry the documented shapes") {
    const WorkloadSpec nvsa = workload::generate_builtin("nvsa_like", 1);
    bool found = false;
    for (const auto& op : nvsa.tasks[0].ops) {
        if (op.kind == workload::OpKind::circconv) {
            CHECK(op.dims.k == 210);
            CHECK(op.dims.d == 1024);
            found = true;
        }
    }
    CHECK(found);

    const WorkloadSpec lvrf = workload::generate_builtin("lvrf_like", 1);
    for (const auto& op : lvrf.tasks[0].ops) {
        if (op.kind == workload::OpKind::circconv) CHECK(op.dims.k == 2575);
    }

    const WorkloadSpec mimo = workload::generate_builtin("mimonet_like", 1);
    for (const auto& op : mimo.tasks[0].ops) {
        if (op.kind == workload::OpKind::circconv) CHECK(op.dims.d == 64);
    }

    CHECK_THROWS_AS(workload::generate_builtin("prae_like"), validation_error);
}

TEST_CASE("scale replicates isomorphic tasks without touching dims") {
    const WorkloadSpec one = workload::generate_builtin("nvsa_like", 1);
    const WorkloadSpec three = workload::generate_builtin("nvsa_like", 3);
    REQUIRE(three.tasks.size() == 3);
    for (const auto& task : three.tasks) {
        REQUIRE(task.ops.size() == one.tasks[0].ops.size());
        for (std::size_t i = 0; i < task.ops.size(); ++i) {
            CHECK(task.ops[i].kind == one.tasks[0].ops[i].kind);
            CHECK(task.ops[i].dims == one.tasks[0].ops[i].dims);
        }
    }
}

TEST_CASE("empty workload builds an empty graph") {
    const WorkloadSpec spec = workload::parse_workload(R"({"name":"empty","tasks":[]})");
    const sched::OpGraph graph = sched::build_opgraph(spec);
    CHECK(graph.size() == 0);
}

TEST_CASE("three-task builtin yields isomorphic subgraphs with no cross-task edges") {
    const WorkloadSpec spec = workload::generate_builtin("nvsa_like", 3);
    const sched::OpGraph graph = sched::build_opgraph(spec);
    const std::size_t per_task = spec.tasks[0].ops.size();
    REQUIRE(graph.size() == 3 * per_task);
    for (const auto& node : graph.nodes) {
        const std::size_t task_of = node.index / per_task;
        for (std::size_t dep : node.deps) {
            CHECK(dep / per_task == task_of);
        }
        bool has_neural_to_symbolic = false;
        if (node.is_symbolic()) {
            for (std::size_t dep : node.deps) {
                if (graph.nodes[dep].is_neural()) has_neural_to_symbolic = true;
            }
            CHECK(has_neural_to_symbolic);
        }
    }
}

TEST_CASE("dependency cycles are reported with their members") {
    const std::string cyclic = R"({"name":"x","tasks":[{"ops":[
        {"id":"a","kind":"gemm","dims":{"rows":1,"cols":1,"inner":1},"deps":["b"]},
        {"id":"b","kind":"gemm","dims":{"rows":1,"cols":1,"inner":1},"deps":["a"]}]}]})";
    const WorkloadSpec spec = workload::parse_workload(cyclic);
    try {
        sched::build_opgraph(spec);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        const std::string what = e.what();
        CHECK(what.find("a@b0") != std::string::npos);
        CHECK(what.find("b@b0") != std::string::npos);
    }
}

TEST_CASE("batches expand into independent instances") {
    WorkloadSpec spec = workload::parse_workload(kMinimalDoc);
    spec.batches = 3;
    const sched::OpGraph graph = sched::build_opgraph(spec);
    REQUIRE(graph.size() == 3);
    CHECK(graph.nodes[0].batch_tag == 0);
    CHECK(graph.nodes[2].batch_tag == 2);
    CHECK(graph.nodes[0].id == "g0@b0");
}

TEST_CASE("builtin graphs are acyclic") {
    for (const char* name : {"nvsa_like", "lvrf_like", "mimonet_like"}) {
        workload::BuiltinOverrides ov;
        ov.batches = 2;
        const WorkloadSpec spec = workload::generate_builtin(name, 2, ov);
        const sched::OpGraph graph = sched::build_opgraph(spec);
        CHECK(graph.topological_order().size() == graph.size());
    }
}
