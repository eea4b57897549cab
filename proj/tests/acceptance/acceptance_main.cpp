// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cogsim/factorizer.hpp"
#include "cogsim/mapping.hpp"
#include "cogsim/pe_array.hpp"
#include "cogsim/rng.hpp"
#include "cogsim/scheduler.hpp"
#include "cogsim/vsa.hpp"
#include "cogsim/workload.hpp"

using namespace cogsim;
using sim::ArrayConfig;
using vsa::Hypervector;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

Hypervector random_int8(std::size_t dim, Xoshiro256ss& rng) {
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = static_cast<double>(static_cast<std::int64_t>(rng.uniform_index(255)) - 127);
    }
    return Hypervector(std::move(v));
}

// --- 1. Cycle-formula exactness -------------------------------------------

bool criterion_cycle_formulas(std::string& detail) {
    Xoshiro256ss rng(1001);
    std::ostringstream os;
    bool ok = true;
    for (std::uint64_t d : {3, 8, 64, 512}) {
        const auto run = sim::run_circconv_bs(random_int8(d, rng), random_int8(d, rng), d);
        const bool hit = run.cycles == 4 * d - 1;
        ok = ok && hit;
        os << "d=M=" << d << ":" << run.cycles << (hit ? "==" : "!=") << 4 * d - 1 << " ";
    }
    for (const auto& [d, m] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
             {2, 8}, {32, 512}, {500, 512}}) {
        const auto run = sim::run_circconv_bs(random_int8(d, rng), random_int8(d, rng), m);
        const bool hit = run.cycles == 3 * m + d - 1;
        ok = ok && hit;
        os << "(d=" << d << ",M=" << m << "):" << run.cycles << (hit ? "==" : "!=")
           << 3 * m + d - 1 << " ";
    }
    detail = os.str();
    return ok;
}

// --- 2. Oracle equivalence -------------------------------------------------

bool criterion_oracle_equivalence(std::string& detail) {
    Xoshiro256ss rng(2002);
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> shapes{
        {3, 3}, {8, 8}, {64, 64}, {512, 512}, {2, 8}, {32, 512}, {500, 512}};
    std::uint64_t checked = 0;
    for (const auto& [d, m] : shapes) {
        for (int t = 0; t < 100; ++t) {
            const Hypervector a = random_int8(d, rng);
            const Hypervector b = random_int8(d, rng);
            const Hypervector conv_ref = vsa::circ_conv(a, b);
            if (!(sim::run_circconv_bs(a, b, m).output == conv_ref)) {
                detail = "BS mismatch at d=" + std::to_string(d);
                return false;
            }
            if (!(sim::run_gemv_baseline_circconv(a, b, 32).output == conv_ref)) {
                detail = "GEMV baseline mismatch at d=" + std::to_string(d);
                return false;
            }
            if (!(sim::run_circcorr_bs(a, b, m).output == vsa::circ_corr(a, b))) {
                detail = "corr-via-reversal mismatch at d=" + std::to_string(d);
                return false;
            }
            checked += 3;
        }
    }
    detail = std::to_string(checked) + " simulated outputs bit-exact vs direct formula";
    return true;
}

// --- 3. Footprint ratio ----------------------------------------------------

bool criterion_footprint(std::string& detail) {
    Xoshiro256ss rng(3003);
    std::ostringstream os;
    bool ok = true;
    for (std::uint64_t d : {32, 1024}) {
        const Hypervector a = random_int8(d, rng);
        const Hypervector b = random_int8(d, rng);
        const auto run = sim::run_gemv_baseline_circconv(a, b, 32);
        const std::uint64_t bs = sim::bs_streamed_footprint_elems(d);
        const bool hit = run.footprint_elems == d * d && bs == 3 * d &&
                         run.footprint_elems / d == bs / 3;
        ok = ok && hit;
        os << "d=" << d << ": gemv=" << run.footprint_elems << " bs=" << bs
           << " ratio=" << run.footprint_elems / bs << "x(=d/3) ";
    }
    detail = os.str();
    return ok;
}

// --- 4. Mapping reproduction ------------------------------------------------

ArrayConfig grid_config(std::uint64_t n, std::uint64_t m) {
    ArrayConfig cfg;
    cfg.num_arrays = n;
    cfg.pes_per_array = m;
    cfg.num_cells = 1;
    cfg.cell_rows = n;
    cfg.cell_cols = m;
    return cfg;
}

bool criterion_mapping(std::string& detail) {
    const auto dec = mapping::choose_mapping(210, 1024, 32, 512);
    if (dec.mode != mapping::MappingMode::temporal || dec.parallel_convs != 32) {
        detail = "chooser did not pick temporal/32-parallel";
        return false;
    }

    Xoshiro256ss rng(4004);
    std::uint64_t points = 0;
    for (std::uint64_t d : {32, 512, 1024}) {
        for (std::uint64_t m : {32, 512}) {
            for (std::uint64_t n : {1, 4, 32}) {
                for (std::uint64_t k : {1, 8, 210}) {
                    std::vector<std::pair<Hypervector, Hypervector>> pairs;
                    pairs.reserve(k);
                    for (std::uint64_t i = 0; i < k; ++i) {
                        pairs.emplace_back(random_int8(d, rng), random_int8(d, rng));
                    }
                    const ArrayConfig cfg = grid_config(n, m);
                    for (auto mode : {mapping::MappingMode::spatial,
                                      mapping::MappingMode::temporal}) {
                        const auto run = sim::run_mapped_circconv(pairs, mode, cfg);
                        const std::uint64_t expect =
                            mode == mapping::MappingMode::spatial
                                ? mapping::latency_spatial(k, d, n, m)
                                : mapping::latency_temporal(k, d, n, m);
                        if (run.array_cycles != expect) {
                            detail = "cycle mismatch at (k=" + std::to_string(k) +
                                     ",d=" + std::to_string(d) + ",N=" + std::to_string(n) +
                                     ",M=" + std::to_string(m) + "," +
                                     mapping::to_string(mode) + "): simulated " +
                                     std::to_string(run.array_cycles) + " vs analytic " +
                                     std::to_string(expect);
                            return false;
                        }
                        if (!(run.outputs[0] ==
                              vsa::circ_conv(pairs[0].first, pairs[0].second))) {
                            detail = "functional mismatch on the mapped grid";
                            return false;
                        }
                        ++points;
                    }
                }
            }
        }
    }
    detail = "temporal/32-parallel reproduced; simulated == analytic on " +
             std::to_string(points) + " grid points";
    return true;
}

// --- 5. Factorizer quality ---------------------------------------------------

bool criterion_factorizer(std::string& detail) {
    // Accuracy: F=3, Mc=8, d=1024, clean queries, 200 trials.
    Xoshiro256ss cb_rng(derive_seed(15, 0x0c0de));
    std::vector<vsa::Codebook> cbs;
    for (int f = 0; f < 3; ++f) {
        cbs.push_back(vsa::Codebook::random(f + 1, 8, 1024, cb_rng));
    }
    factorizer::FactorizerParams params;
    params.max_iters = 200;
    const auto report = factorizer::accuracy_eval(cbs, 200, 0.0, params, 15);
    std::uint64_t max_iters_seen = 0;
    for (const auto& r : report.records) {
        max_iters_seen = std::max(max_iters_seen, r.iterations);
    }

    // Stochasticity: paired comparison at the near-capacity point where the
    // deterministic resonator traps in period-2 limit cycles (see the
    // project notes); calibrated noise at scale 2.
    factorizer::FactorizerParams noisy;
    noisy.auto_calibrate = true;
    noisy.noise_scale = 2.0;
    const auto cmp = factorizer::compare_noise_iterations(2, 32, 64, 150, 0.0, noisy, 1);

    std::ostringstream os;
    os << "accuracy=" << report.accuracy << " (>=0.95), iters<=" << max_iters_seen
       << "; noise pairs: mean " << cmp.mean_iters_noisy << " vs " << cmp.mean_iters_clean
       << ", wins " << cmp.wins_noisy << "/" << cmp.wins_noisy + cmp.wins_clean
       << ", sign-test p=" << cmp.sign_test_p;
    detail = os.str();
    return report.accuracy >= 0.95 && max_iters_seen <= 200 &&
           cmp.mean_iters_noisy < cmp.mean_iters_clean && cmp.pairs >= 100 &&
           cmp.sign_test_p < 0.05;
}

// --- 6. Quantization robustness ----------------------------------------------

bool criterion_quantization(std::string& detail) {
    Xoshiro256ss cb_rng(derive_seed(15, 0x0c0de));
    std::vector<vsa::Codebook> cbs;
    for (int f = 0; f < 3; ++f) {
        cbs.push_back(vsa::Codebook::random(f + 1, 8, 1024, cb_rng));
    }
    factorizer::FactorizerParams fp32;
    factorizer::FactorizerParams int8 = fp32;
    int8.precision = quant::QuantMode::int8_symmetric;
    const auto a = factorizer::accuracy_eval(cbs, 200, 0.0, fp32, 15);
    const auto b = factorizer::accuracy_eval(cbs, 200, 0.0, int8, 15);
    const double loss = a.accuracy - b.accuracy;

    factorizer::FactorizerParams noisy_int8;
    noisy_int8.auto_calibrate = true;
    noisy_int8.noise_scale = 2.0;
    noisy_int8.precision = quant::QuantMode::int8_symmetric;
    const auto cmp =
        factorizer::compare_noise_iterations(2, 32, 64, 150, 0.0, noisy_int8, 1);

    std::ostringstream os;
    os << "fp32=" << a.accuracy << " int8=" << b.accuracy << " loss=" << loss
       << "pt (<=0.01); int8 stochasticity p=" << cmp.sign_test_p;
    detail = os.str();
    return loss <= 0.01 && cmp.sign_test_p < 0.05 &&
           cmp.mean_iters_noisy < cmp.mean_iters_clean;
}

// --- 7. Scheduler gains --------------------------------------------------------

sched::OpGraph random_dag(Xoshiro256ss& rng) {
    sched::OpGraph graph;
    const std::size_t n = 2 + rng.uniform_index(22);
    for (std::size_t i = 0; i < n; ++i) {
        sched::OpNode node;
        node.index = i;
        node.id = "n" + std::to_string(i);
        const auto kind = rng.uniform_index(3);
        if (kind == 0) {
            node.kind = workload::OpKind::gemm;
            node.dims.rows = 32 + 32 * rng.uniform_index(8);
            node.dims.cols = 32 + 32 * rng.uniform_index(8);
            node.dims.inner = 32 + 32 * rng.uniform_index(4);
        } else if (kind == 1) {
            node.kind = workload::OpKind::circconv;
            node.dims.k = 1 + rng.uniform_index(64);
            node.dims.d = std::uint64_t(1) << (3 + rng.uniform_index(8));
        } else {
            node.kind = workload::OpKind::elemwise;
            node.dims.length = 1 + rng.uniform_index(4096);
            node.dims.op_kind = "elem_add";
            node.simd_offload = true;
        }
        node.iterations = 1 + rng.uniform_index(3);
        for (std::size_t j = 0; j < i; ++j) {
            if (rng.uniform() < 0.15) node.deps.push_back(j);
        }
        graph.nodes.push_back(std::move(node));
    }
    return graph;
}

bool criterion_scheduler(std::string& detail) {
    const ArrayConfig cfg;
    workload::BuiltinOverrides ov;
    ov.batches = 3;
    const auto spec = workload::generate_builtin("nvsa_like", 1, ov);
    const auto graph = sched::build_opgraph(spec);
    const auto greedy = sched::greedy_schedule(graph, cfg);
    const auto seq = sched::sequential_schedule(graph, cfg);
    if (!sched::validate(greedy, graph, cfg).empty()) {
        detail = "greedy schedule failed validation on nvsa_like";
        return false;
    }
    const double ratio = static_cast<double>(greedy.makespan) /
                         static_cast<double>(seq.makespan);

    Xoshiro256ss rng(7007);
    std::uint64_t violations = 0, dominance_breaks = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto g = random_dag(rng);
        const auto s = sched::greedy_schedule(g, cfg);
        violations += sched::validate(s, g, cfg).size();
        const auto base = sched::sequential_schedule(g, cfg);
        if (s.makespan > base.makespan) ++dominance_breaks;
    }

    std::ostringstream os;
    os << "nvsa_like x3: greedy " << greedy.makespan << " vs sequential " << seq.makespan
       << " (ratio " << ratio << " <= 0.85); 1000 random DAGs: " << violations
       << " violations, " << dominance_breaks << " dominance breaks";
    detail = os.str();
    return ratio <= 0.85 && violations == 0 && dominance_breaks == 0;
}

// --- 8. Roofline and BS-vs-GEMV speedup ------------------------------------------

bool criterion_roofline(std::string& detail) {
    const double ai_bs = mapping::roofline_ai(mapping::RooflineKind::bs_dataflow, 1024);
    const double ai_gemv = mapping::roofline_ai(mapping::RooflineKind::gemv_gpu, 1024);
    const double want_bs = (2.0 * 1024.0 - 1.0) / 3.0;
    const double want_gemv = (2.0 * 1024.0 - 1.0) / 1026.0;
    const bool ai_ok = std::fabs(ai_bs - want_bs) / want_bs < 5e-7 &&
                       std::fabs(ai_gemv - want_gemv) / want_gemv < 5e-7;

    // BS on the default chip vs a TPU-like array with the same PE count
    // (128x128), which runs the k GEMVs sequentially.
    Xoshiro256ss rng(8008);
    const ArrayConfig cfg;
    const std::uint64_t d = 1024;
    const std::uint64_t baseline_dim = 128;  // 128*128 == cfg.total_pes()
    double prev_speedup = 0.0;
    bool monotone = true;
    std::ostringstream os;
    double max_speedup = 0.0;
    for (std::uint64_t k : {1, 4, 16, 64}) {
        std::vector<std::pair<Hypervector, Hypervector>> pairs;
        for (std::uint64_t i = 0; i < k; ++i) {
            pairs.emplace_back(random_int8(d, rng), random_int8(d, rng));
        }
        const auto dec = mapping::choose_mapping(k, d, cfg.num_arrays, cfg.pes_per_array);
        const auto run = sim::run_mapped_circconv(pairs, dec.mode, cfg);
        const std::uint64_t tiles = mapping::ceil_div(d, baseline_dim);
        const std::uint64_t baseline_cycles = k * tiles * tiles * 3 * baseline_dim;
        const double speedup = static_cast<double>(baseline_cycles) /
                               static_cast<double>(run.array_cycles);
        if (speedup < prev_speedup) monotone = false;
        prev_speedup = speedup;
        max_speedup = std::max(max_speedup, speedup);
        os << "k=" << k << ":" << speedup << "x ";
    }
    detail = "AI(1024) = " + std::to_string(ai_bs) + "/" + std::to_string(ai_gemv) +
             " exact to 6 s.f.; speedup " + os.str() + "(reported max " +
             std::to_string(max_speedup) + "x)";
    return ai_ok && monotone;
}

// --- 9. Bandwidth asymptotic -------------------------------------------------------

bool criterion_bandwidth(std::string& detail) {
    // As specified: for every grid point with d >= 10*M, the temporal/spatial
    // read ratio must sit within 5% of N/2. The exact ratio is
    // (N/2)*(1 + M/d), which is 10% off at d = 10M and 6.25% off at d = 16M,
    // so the (d=512, M=32) grid point cannot satisfy the stated band; it is
    // reported honestly below.
    std::ostringstream os;
    bool ok = true;
    for (std::uint64_t m : {32, 512}) {
        for (std::uint64_t d : {32, 512, 1024}) {
            if (d < 10 * m) continue;
            for (std::uint64_t n : {1, 4, 32}) {
                const double ratio =
                    static_cast<double>(
                        mapping::mem_reads(mapping::MappingMode::temporal, d, n, m)) /
                    static_cast<double>(
                        mapping::mem_reads(mapping::MappingMode::spatial, d, n, m));
                const double target = static_cast<double>(n) / 2.0;
                const double err = std::fabs(ratio - target) / target;
                if (err > 0.05) {
                    ok = false;
                    os << "(d=" << d << ",M=" << m << ",N=" << n << "): err "
                       << err * 100.0 << "% > 5% ";
                } else {
                    os << "(d=" << d << ",M=" << m << ",N=" << n << "): err "
                       << err * 100.0 << "% ";
                }
            }
        }
    }
    detail = os.str();
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"Cycle-formula exactness", criterion_cycle_formulas},
        {"Oracle equivalence", criterion_oracle_equivalence},
        {"Footprint ratio", criterion_footprint},
        {"Mapping reproduction", criterion_mapping},
        {"Factorizer quality", criterion_factorizer},
        {"Quantization robustness", criterion_quantization},
        {"Scheduler gains", criterion_scheduler},
        {"Roofline", criterion_roofline},
        {"Bandwidth asymptotic", criterion_bandwidth},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool pass = false;
        try {
            pass = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %zu. %s — %s\n", pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    return failures;
}
