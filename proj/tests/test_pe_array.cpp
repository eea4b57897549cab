#include <doctest.h>

#include <sstream>

#include "cogsim/common.hpp"
#include "cogsim/pe_array.hpp"
#include "cogsim/rng.hpp"

using namespace cogsim;
using sim::ArrayConfig;
using vsa::Hypervector;

namespace {

Hypervector random_int8(std::size_t dim, Xoshiro256ss& rng) {
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(255)) - 127);
    }
    return Hypervector(std::move(v));
}

}  // namespace

TEST_CASE("bubble streaming reproduces the direct formula and its cycle count") {
    Xoshiro256ss rng(2);
    const Hypervector a(std::vector<double>{1, 2, 3});
    const Hypervector b(std::vector<double>{4, 5, 6});
    const auto run = sim::run_circconv_bs(a, b, 3);
    CHECK(run.output == vsa::circ_conv(a, b));
    CHECK(run.cycles == 11);  // 4d-1 at d=3

    const auto wide = sim::run_circconv_bs(random_int8(2, rng), random_int8(2, rng), 8);
    CHECK(wide.cycles == 25);  // 3M+d-1 at d=2, M=8
}

TEST_CASE("oracle equivalence across shapes for int8 data") {
    Xoshiro256ss rng(3);
    for (std::size_t d : {3, 8, 32}) {
        for (int t = 0; t < 100; ++t) {
            const Hypervector a = random_int8(d, rng);
            const Hypervector b = random_int8(d, rng);
            const auto run = sim::run_circconv_bs(a, b, d);
            REQUIRE(run.output == vsa::circ_conv(a, b));
            REQUIRE(run.cycles == 4 * d - 1);
        }
    }
}

TEST_CASE("one output per cycle after the first") {
    Xoshiro256ss rng(5);
    const std::size_t d = 16, m = 24;
    const auto run = sim::run_circconv_bs(random_int8(d, rng), random_int8(d, rng), m);
    std::vector<std::uint64_t> cycles = run.output_cycles;
    std::sort(cycles.begin(), cycles.end());
    CHECK(cycles.front() == 2 * m - 1);
    for (std::size_t i = 1; i < cycles.size(); ++i) {
        CHECK(cycles[i] == cycles[i - 1] + 1);
    }
}

TEST_CASE("circular correlation via reversed stationary vector") {
    Xoshiro256ss rng(7);
    for (std::size_t d : {3, 8, 64}) {
        for (int t = 0; t < 25; ++t) {
            const Hypervector a = random_int8(d, rng);
            const Hypervector b = random_int8(d, rng);
            const auto run = sim::run_circcorr_bs(a, b, d);
            REQUIRE(run.output == vsa::circ_corr(a, b));
            REQUIRE(run.cycles == 4 * d - 1);
        }
    }
}

TEST_CASE("d greater than the column is rejected") {
    Xoshiro256ss rng(9);
    CHECK_THROWS_AS(sim::run_circconv_bs(random_int8(16, rng), random_int8(16, rng), 8),
                    validation_error);
}

TEST_CASE("column-wise parallelism finishes k convs in one conv's cycles") {
    Xoshiro256ss rng(11);
    const std::size_t d = 24, rows = 32, cols = 32;
    std::vector<std::pair<Hypervector, Hypervector>> pairs;
    for (int i = 0; i < 8; ++i) {
        pairs.emplace_back(random_int8(d, rng), random_int8(d, rng));
    }
    const auto single = sim::run_circconv_bs(pairs[0].first, pairs[0].second, rows);
    const auto cwp = sim::run_cell_circconv_cwp(pairs, rows, cols);
    CHECK(cwp.cycles == single.cycles);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        REQUIRE(cwp.outputs[i] == vsa::circ_conv(pairs[i].first, pairs[i].second));
    }

    // The GEMV baseline has no column-wise parallelism: k convolutions cost
    // k times one convolution.
    std::uint64_t baseline_total = 0;
    for (const auto& [a, b] : pairs) {
        baseline_total += sim::run_gemv_baseline_circconv(a, b, rows).cycles;
    }
    const auto baseline_one = sim::run_gemv_baseline_circconv(pairs[0].first,
                                                              pairs[0].second, rows);
    CHECK(baseline_total == pairs.size() * baseline_one.cycles);
    CHECK_THROWS_AS(
        sim::run_cell_circconv_cwp(
            std::vector<std::pair<Hypervector, Hypervector>>(33, pairs[0]), rows, cols),
        validation_error);
}

TEST_CASE("gemm: identity weights pass inputs through in 3M+K-1 cycles") {
    const std::uint64_t m = 2, k = 1;
    const std::vector<double> w{1, 0, 0, 1};
    const std::vector<double> x{5, -3};
    const auto run = sim::run_gemm(w, m, x, k);
    CHECK(run.cycles == 6);
    CHECK(run.output == x);
}

TEST_CASE("gemm matches the triple-loop oracle") {
    Xoshiro256ss rng(13);
    for (const auto& [m, k] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {4, 8}, {8, 3}, {16, 16}}) {
        std::vector<double> w(m * m), x(m * k);
        for (auto& v : w) {
            v = static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(255)) - 127);
        }
        for (auto& v : x) {
            v = static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(255)) - 127);
        }
        const auto run = sim::run_gemm(w, m, x, k);
        REQUIRE(run.cycles == 3 * m + k - 1);
        std::vector<double> expect(m * k, 0.0);
        for (std::uint64_t r = 0; r < m; ++r) {
            for (std::uint64_t c = 0; c < k; ++c) {
                double acc = 0.0;
                for (std::uint64_t i = 0; i < m; ++i) acc += w[r * m + i] * x[i * k + c];
                expect[r * k + c] = acc;
            }
        }
        REQUIRE(run.output == expect);
    }
}

TEST_CASE("gemm cycle formula at M=32 K=32") {
    std::vector<double> w(32 * 32, 1.0), x(32 * 32, 1.0);
    const auto run = sim::run_gemm(w, 32, x, 32);
    CHECK(run.cycles == 127);
}

TEST_CASE("gemv baseline: footprint d^2, cycles ceil(d/M)^2 * 3M, exact output") {
    Xoshiro256ss rng(17);
    const Hypervector a = random_int8(32, rng);
    const Hypervector b = random_int8(32, rng);
    const auto run = sim::run_gemv_baseline_circconv(a, b, 32);
    CHECK(run.footprint_elems == 1024);
    CHECK(run.cycles == 96);
    CHECK(run.output == vsa::circ_conv(a, b));
    CHECK(sim::bs_streamed_footprint_elems(32) == 96);

    const Hypervector a2 = random_int8(1024, rng);
    const Hypervector b2 = random_int8(1024, rng);
    const auto big = sim::run_gemv_baseline_circconv(a2, b2, 32);
    CHECK(big.cycles == 32ull * 32ull * 96ull);
    CHECK(big.output == vsa::circ_conv(a2, b2));
}

TEST_CASE("gemv baseline oracle equivalence on random pairs") {
    Xoshiro256ss rng(19);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 2 + rng.uniform_index(80);
        const Hypervector a = random_int8(d, rng);
        const Hypervector b = random_int8(d, rng);
        REQUIRE(sim::run_gemv_baseline_circconv(a, b, 16).output ==
                vsa::circ_conv(a, b));
    }
}

TEST_CASE("simd latency table") {
    CHECK(sim::simd_exec(sim::SimdOpKind::elem_add, 512, 512) == 1);
    CHECK(sim::simd_exec(sim::SimdOpKind::tanh, 1024, 512) == 8);
    CHECK(sim::simd_exec(sim::SimdOpKind::exp, 1, 512) == 4);
    CHECK(sim::simd_exec(sim::SimdOpKind::softmax, 512, 512) == 2);
    CHECK(sim::simd_exec(sim::SimdOpKind::norm, 1, 16) == 2);
    CHECK_THROWS_AS(sim::simd_exec(sim::SimdOpKind::sum, 0, 512), validation_error);
    CHECK_THROWS_AS(sim::parse_simd_op("nope"), validation_error);
}

TEST_CASE("memory accounting per mapping mode") {
    ArrayConfig cfg;
    sim::CycleReport report;

    sim::KernelDescriptor spatial;
    spatial.name = "conv_spatial";
    spatial.mode = mapping::MappingMode::spatial;
    spatial.k = 1;
    spatial.d = 1024;
    spatial.duration_cycles = mapping::tile_latency(1024, cfg.pes_per_array);
    spatial.unique_elems = 2048;
    sim::account_memory(spatial, cfg, report);
    CHECK(report.sram_a_reads + report.sram_b_reads == 2048);  // 2d per T

    sim::CycleReport report2;
    sim::KernelDescriptor temporal = spatial;
    temporal.name = "conv_temporal";
    temporal.mode = mapping::MappingMode::temporal;
    sim::account_memory(temporal, cfg, report2);
    CHECK(report2.sram_a_reads + report2.sram_b_reads == 49152);  // (d+M)*N per T
}

TEST_CASE("capacity errors name the offending buffer") {
    ArrayConfig cfg;
    cfg.sram_b_bytes = 1024;
    sim::CycleReport report;
    sim::KernelDescriptor kernel;
    kernel.name = "huge";
    kernel.mode = mapping::MappingMode::spatial;
    kernel.d = 100000;
    kernel.duration_cycles = 1;
    try {
        sim::account_memory(kernel, cfg, report);
        FAIL("expected capacity_error");
    } catch (const capacity_error& e) {
        CHECK(std::string(e.what()).find("SRAM B") != std::string::npos);
    }
}

TEST_CASE("stalls appear only when DRAM cannot fill a tile within T") {
    ArrayConfig cfg;
    cfg.dram_bandwidth_bytes_per_cycle = 1;
    sim::CycleReport report;
    sim::KernelDescriptor kernel;
    kernel.name = "starved";
    kernel.mode = mapping::MappingMode::temporal;
    kernel.k = 1;
    kernel.d = 1024;
    kernel.duration_cycles = mapping::tile_latency(1024, cfg.pes_per_array);
    sim::account_memory(kernel, cfg, report);
    CHECK(report.stall_cycles > 0);

    sim::CycleReport fast;
    cfg.dram_bandwidth_bytes_per_cycle = 1 << 20;
    sim::account_memory(kernel, cfg, fast);
    CHECK(fast.stall_cycles == 0);
}

TEST_CASE("energy estimate is linear in the counters") {
    sim::EnergyCoeffs coeffs;
    sim::CycleReport report;
    CHECK(sim::energy_estimate(report, coeffs) == 0.0);

    report.mac_count = 1;
    sim::EnergyCoeffs unit;
    unit.mac_pj = 1.0;
    unit.sram_a_access_pj = 0.0;
    unit.sram_b_access_pj = 0.0;
    unit.dram_byte_pj = 0.0;
    unit.simd_op_pj = 0.0;
    CHECK(sim::energy_estimate(report, unit) == doctest::Approx(1e-12));

    sim::CycleReport doubled;
    doubled.mac_count = 2;
    doubled.sram_a_reads = 10;
    doubled.dram_bytes = 6;
    sim::CycleReport base;
    base.mac_count = 1;
    base.sram_a_reads = 5;
    base.dram_bytes = 3;
    CHECK(sim::energy_estimate(doubled, coeffs) ==
          doctest::Approx(2.0 * sim::energy_estimate(base, coeffs)));
}

TEST_CASE("mapped execution matches the analytic latency formulas exactly") {
    Xoshiro256ss rng(23);
    ArrayConfig cfg;
    cfg.num_cells = 1;
    cfg.cell_rows = 8;
    cfg.cell_cols = 8;
    cfg.num_arrays = 4;
    cfg.pes_per_array = 16;

    for (std::uint64_t k : {1, 5}) {
        for (std::uint64_t d : {8, 48}) {
            std::vector<std::pair<Hypervector, Hypervector>> pairs;
            for (std::uint64_t i = 0; i < k; ++i) {
                pairs.emplace_back(random_int8(d, rng), random_int8(d, rng));
            }
            for (auto mode : {mapping::MappingMode::spatial, mapping::MappingMode::temporal}) {
                const auto run = sim::run_mapped_circconv(pairs, mode, cfg);
                const std::uint64_t expect =
                    mode == mapping::MappingMode::spatial
                        ? mapping::latency_spatial(k, d, cfg.num_arrays, cfg.pes_per_array)
                        : mapping::latency_temporal(k, d, cfg.num_arrays, cfg.pes_per_array);
                REQUIRE(run.array_cycles == expect);
                for (std::uint64_t i = 0; i < k; ++i) {
                    REQUIRE(run.outputs[i] == vsa::circ_conv(pairs[i].first, pairs[i].second));
                }
            }
        }
    }
}

TEST_CASE("trace sink receives register state rows") {
    Xoshiro256ss rng(29);
    std::vector<sim::TraceRow> rows;
    const auto sink = [&](const sim::TraceRow& row) { rows.push_back(row); };
    const Hypervector a = random_int8(3, rng);
    const Hypervector b = random_int8(3, rng);
    const auto run = sim::run_circconv_bs(a, b, 3, sink);
    CHECK(run.cycles == 11);
    CHECK(rows.size() == 3 * 11);  // M rows per cycle
    CHECK(rows.back().cycle == 11);
}

TEST_CASE("conservation: pe_active never exceeds cycles times PEs") {
    Xoshiro256ss rng(31);
    for (std::uint64_t m : {4, 16}) {
        for (std::uint64_t d : {3, 9}) {
            if (d > m) continue;
            const auto run =
                sim::run_circconv_bs(random_int8(d, rng), random_int8(d, rng), m);
            CHECK(run.pe_active_cycles <= run.cycles * m);
        }
    }
}
