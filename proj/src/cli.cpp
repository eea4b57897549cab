#include "cogsim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cogsim/common.hpp"
#include "cogsim/factorizer.hpp"
#include "cogsim/mapping.hpp"
#include "cogsim/scheduler.hpp"
#include "cogsim/simulate.hpp"
#include "cogsim/workload.hpp"

namespace cogsim::cli {

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COGSIM_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 1;
}

void write_output(const std::string& text, const std::string& out_path,
                  std::ostream& out) {
    if (out_path.empty()) {
        out << text << '\n';
    } else {
        std::ofstream f(out_path);
        if (!f) throw validation_error("cannot open output path: " + out_path);
        f << text << '\n';
    }
}

sim::ArrayConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return sim::ArrayConfig::cogsys_default();
    return sim::ArrayConfig::load_json_file(path);
}

workload::WorkloadSpec load_workload_arg(const std::string& path) {
    // Builtin names resolve without a file: nvsa_like[:scale] etc.
    if (path.rfind("builtin:", 0) == 0) {
        std::string rest = path.substr(8);
        std::uint64_t scale = 1;
        const auto colon = rest.find(':');
        if (colon != std::string::npos) {
            scale = std::strtoull(rest.substr(colon + 1).c_str(), nullptr, 10);
            rest = rest.substr(0, colon);
        }
        return workload::generate_builtin(rest, scale);
    }
    return workload::load_workload_file(path);
}

json mapping_decision_json(const mapping::MappingDecision& dec, std::uint64_t d) {
    json j;
    j["mode"] = mapping::to_string(dec.mode);
    j["latency_cycles"] = dec.latency_cycles;
    j["mem_reads_per_t"] = dec.mem_reads_per_t;
    j["folds"] = dec.folds;
    j["parallel_convs"] = dec.parallel_convs;
    j["bandwidth_warning"] = dec.bandwidth_warning;
    j["ai_bs"] = mapping::roofline_ai(mapping::RooflineKind::bs_dataflow, d);
    j["ai_gemv"] = mapping::roofline_ai(mapping::RooflineKind::gemv_gpu, d);
    return j;
}

int cmd_factorize(std::uint64_t factors, std::uint64_t codes, std::uint64_t dim,
                  std::uint64_t trials, double flip, double noise,
                  const std::string& precision, std::uint64_t max_iters,
                  std::uint64_t seed, unsigned jobs, const std::string& csv_path,
                  const std::string& out_path, std::ostream& out) {
    Xoshiro256ss cb_rng(derive_seed(seed, 0x0c0de));
    std::vector<vsa::Codebook> codebooks;
    codebooks.reserve(factors);
    for (std::uint64_t f = 0; f < factors; ++f) {
        codebooks.push_back(
            vsa::Codebook::random(static_cast<int>(f) + 1, codes, dim, cb_rng));
    }

    factorizer::FactorizerParams params;
    params.max_iters = max_iters;
    params.precision = quant::parse_quant_mode(precision);
    if (noise > 0.0) {
        params.auto_calibrate = true;
        params.noise_scale = noise;
    }

    const factorizer::AccuracyReport report =
        factorizer::accuracy_eval(codebooks, trials, flip, params, seed, jobs);
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw validation_error("cannot open CSV path: " + csv_path);
        f << report.to_csv();
    }
    write_output(report.to_json(), out_path, out);
    return 0;
}

int cmd_roofline(const std::string& range, const std::string& out_path,
                 std::ostream& out) {
    std::uint64_t lo = 0, hi = 0, step = 0;
    {
        std::istringstream is(range);
        char c1 = 0, c2 = 0;
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
            step == 0 || lo == 0 || hi < lo) {
            throw validation_error("roofline: bad --d-range \"" + range +
                                   "\" (expected a:b:step)");
        }
    }
    std::ostringstream os;
    os << "d,ai_bs,ai_gemv\n";
    for (std::uint64_t d = lo; d <= hi; d += step) {
        os << d << ',' << std::setprecision(10)
           << mapping::roofline_ai(mapping::RooflineKind::bs_dataflow, d) << ','
           << mapping::roofline_ai(mapping::RooflineKind::gemv_gpu, d) << '\n';
    }
    std::string text = os.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    write_output(text, out_path, out);
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path,
               std::ostream& out) {
    json merged;
    merged["reports"] = json::object();
    for (const auto& path : inputs) {
        std::ifstream f(path);
        if (!f) throw validation_error("report: input not found: " + path);
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw validation_error("report: " + path + ": " + e.what());
        }
        merged["reports"][path] = j;
    }
    write_output(merged.dump(2), out_path, out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cogsim: reconfigurable neuro/symbolic array simulator"};
    app.require_subcommand(1);

    // factorize
    auto* fact = app.add_subcommand("factorize", "run factorizer accuracy trials");
    std::uint64_t factors = 3, codes = 8, dim = 1024, trials = 100;
    double flip = 0.0, noise = 0.0;
    std::string precision = "fp32";
    std::uint64_t max_iters = 200;
    std::uint64_t seed = default_seed();
    unsigned jobs = 1;
    std::string csv_path, out_path;
    fact->add_option("--factors", factors, "number of factors F")->check(CLI::PositiveNumber);
    fact->add_option("--codes", codes, "codevectors per factor Mc")->check(CLI::PositiveNumber);
    fact->add_option("--dim", dim, "hypervector dimension d")->check(CLI::PositiveNumber);
    fact->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    fact->add_option("--flip", flip, "query sign-flip fraction [0, 0.5)");
    fact->add_option("--noise", noise,
                     "stochasticity scale; 0 disables, 1 uses calibrated defaults");
    fact->add_option("--precision", precision, "fp32|fp8|int8");
    fact->add_option("--max-iters", max_iters, "iteration cap per trial");
    fact->add_option("--seed", seed, "base RNG seed");
    fact->add_option("--jobs", jobs, "worker threads for trials");
    fact->add_option("--csv", csv_path, "write per-trial CSV here");
    fact->add_option("--out", out_path, "write JSON summary here (default stdout)");

    // simulate
    auto* simc = app.add_subcommand("simulate", "cycle-level workload simulation");
    std::string workload_path, config_path, trace_path, sim_out, sim_precision;
    std::uint64_t sim_seed = default_seed();
    simc->add_option("--workload", workload_path,
                     "workload JSON file or builtin:<name>[:scale]")->required();
    simc->add_option("--config", config_path, "hardware config JSON");
    simc->add_option("--precision", sim_precision,
                     "override workload precision: fp32|fp8|int8");
    simc->add_option("--trace", trace_path, "per-cycle CSV trace (small instances)");
    simc->add_option("--seed", sim_seed, "input synthesis seed");
    simc->add_option("--out", sim_out, "write CycleReport JSON here");

    // map
    auto* mapc = app.add_subcommand("map", "spatial/temporal mapping decision");
    std::uint64_t mk = 1, md = 1024, mn = 32, mm = 512, mbw = 0;
    std::string map_out;
    mapc->add_option("--k", mk, "number of convolutions")->required();
    mapc->add_option("--d", md, "vector dimension")->required();
    mapc->add_option("--N", mn, "number of arrays")->required();
    mapc->add_option("--M", mm, "PEs per array")->required();
    mapc->add_option("--bandwidth", mbw, "memory reads per T budget (0 = unlimited)");
    mapc->add_option("--out", map_out, "write decision JSON here");

    // schedule
    auto* schc = app.add_subcommand("schedule", "greedy workload schedule");
    std::string sch_workload, sch_config, sch_out, sch_gantt, baseline;
    schc->add_option("--workload", sch_workload,
                     "workload JSON file or builtin:<name>[:scale]")->required();
    schc->add_option("--config", sch_config, "hardware config JSON");
    schc->add_option("--baseline", baseline, "also run a baseline: sequential");
    schc->add_option("--gantt", sch_gantt, "write Gantt CSV here");
    schc->add_option("--out", sch_out, "write schedule JSON here");

    // roofline
    auto* roof = app.add_subcommand("roofline", "arithmetic intensity sweep");
    std::string d_range = "64:4096:64", roof_out;
    roof->add_option("--d-range", d_range, "a:b:step inclusive sweep");
    roof->add_option("--out", roof_out, "write CSV here");

    // report
    auto* rep = app.add_subcommand("report", "merge JSON outputs");
    std::vector<std::string> report_inputs;
    std::string report_out;
    rep->add_option("inputs", report_inputs, "JSON files to merge")->required();
    rep->add_option("--out", report_out, "write merged JSON here");

    try {
        std::vector<std::string> argv_rev(args.rbegin(), args.rend());
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (app.got_subcommand(fact)) {
            return cmd_factorize(factors, codes, dim, trials, flip, noise, precision,
                                 max_iters, seed, jobs, csv_path, out_path, out);
        }
        if (app.got_subcommand(simc)) {
            workload::WorkloadSpec spec = load_workload_arg(workload_path);
            if (!sim_precision.empty()) {
                spec.precision = quant::parse_quant_mode(sim_precision);
            }
            const sim::ArrayConfig config = load_config_or_default(config_path);
            sim::SimulateOptions options;
            options.seed = sim_seed;
            std::ofstream trace_file;
            if (!trace_path.empty()) {
                trace_file.open(trace_path);
                if (!trace_file) {
                    throw validation_error("cannot open trace path: " + trace_path);
                }
                options.trace = true;
                options.trace_out = &trace_file;
            }
            const sim::CycleReport report = sim::simulate_workload(spec, config, options);
            write_output(report.to_json(), sim_out, out);
            return 0;
        }
        if (app.got_subcommand(mapc)) {
            const mapping::MappingDecision dec = mapping::choose_mapping(mk, md, mn, mm, mbw);
            write_output(mapping_decision_json(dec, md).dump(2), map_out, out);
            return 0;
        }
        if (app.got_subcommand(schc)) {
            if (!baseline.empty() && baseline != "sequential") {
                throw validation_error("schedule: unknown baseline \"" + baseline + "\"");
            }
            const workload::WorkloadSpec spec = load_workload_arg(sch_workload);
            const sim::ArrayConfig config = load_config_or_default(sch_config);
            const sched::OpGraph graph = sched::build_opgraph(spec);
            const sched::Schedule schedule = sched::greedy_schedule(graph, config);
            const auto violations = sched::validate(schedule, graph, config);
            if (!violations.empty()) {
                throw infeasible_error("schedule failed validation: " + violations.front());
            }
            json j = json::parse(schedule.to_json(config));
            if (baseline == "sequential") {
                const sched::Schedule seq = sched::sequential_schedule(graph, config);
                j["baseline_sequential_makespan"] = seq.makespan;
                j["speedup_vs_sequential"] =
                    schedule.makespan
                        ? static_cast<double>(seq.makespan) /
                              static_cast<double>(schedule.makespan)
                        : 1.0;
            }
            if (!sch_gantt.empty()) {
                std::ofstream f(sch_gantt);
                if (!f) throw validation_error("cannot open gantt path: " + sch_gantt);
                f << schedule.gantt_csv();
            }
            write_output(j.dump(2), sch_out, out);
            return 0;
        }
        if (app.got_subcommand(roof)) {
            return cmd_roofline(d_range, roof_out, out);
        }
        if (app.got_subcommand(rep)) {
            return cmd_report(report_inputs, report_out, out);
        }
    } catch (const capacity_error& e) {
        err << "capacity error: " << e.what() << '\n';
        return 2;
    } catch (const infeasible_error& e) {
        err << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace cogsim::cli
