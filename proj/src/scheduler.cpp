#include "cogsim/scheduler.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cogsim/common.hpp"
#include "cogsim/mapping.hpp"
#include "cogsim/pe_array.hpp"

namespace cogsim::sched {

namespace {

std::uint64_t gemm_tiles(const workload::OpDims& dims, const sim::ArrayConfig& cfg) {
    return mapping::ceil_div(dims.rows, cfg.cell_rows) *
           mapping::ceil_div(dims.cols, cfg.cell_cols) *
           mapping::ceil_div(dims.inner, cfg.cell_rows);
}

std::uint64_t gemm_tile_latency(const sim::ArrayConfig& cfg) {
    return 3 * cfg.cell_rows + cfg.cell_cols - 1;
}

// Stream + output buffers of one convolution tile must fit SRAM B.
void check_conv_feasible(const OpNode& node, const sim::ArrayConfig& cfg) {
    const std::uint64_t bytes = 2 * (3 * node.dims.d - 1) * cfg.element_bytes();
    if (bytes > cfg.sram_b_bytes) {
        throw infeasible_error("op " + node.id + ": d=" +
                               std::to_string(node.dims.d) +
                               " stream buffers need " + std::to_string(bytes) +
                               " B, exceeding SRAM B (" +
                               std::to_string(cfg.sram_b_bytes) + " B)");
    }
}

}  // namespace

std::uint64_t estimate_cycles(const OpNode& node, std::uint64_t alloc_units,
                              const sim::ArrayConfig& config) {
    std::uint64_t per_iter = 0;
    switch (node.kind) {
        case workload::OpKind::gemm:
        case workload::OpKind::conv: {
            const std::uint64_t tiles = gemm_tiles(node.dims, config);
            per_iter = mapping::ceil_div(tiles, alloc_units) * gemm_tile_latency(config);
            break;
        }
        case workload::OpKind::circconv:
            per_iter = mapping::latency_temporal(node.dims.k, node.dims.d, alloc_units,
                                                 config.cell_rows);
            break;
        case workload::OpKind::elemwise:
        case workload::OpKind::simd_special:
            per_iter = sim::simd_exec(sim::parse_simd_op(node.dims.op_kind.empty()
                                                             ? "elem_add"
                                                             : node.dims.op_kind),
                                      node.dims.length, config.simd_lanes);
            break;
    }
    return per_iter * node.iterations;
}

namespace {

// Mutable resource state during scheduling: per-column and SIMD-unit
// occupancy horizons.
struct ResourceState {
    std::uint64_t num_cells = 0;
    std::uint64_t cell_cols = 0;
    std::vector<std::uint64_t> column_free_at;  // cell * cell_cols + col
    std::uint64_t simd_free_at = 0;

    explicit ResourceState(const sim::ArrayConfig& cfg)
        : num_cells(cfg.num_cells), cell_cols(cfg.cell_cols),
          column_free_at(cfg.num_cells * cfg.cell_cols, 0) {}

    std::uint64_t free_cols_in_cell(std::uint64_t cell, std::uint64_t t) const {
        std::uint64_t count = 0;
        for (std::uint64_t c = 0; c < cell_cols; ++c) {
            if (column_free_at[cell * cell_cols + c] <= t) ++count;
        }
        return count;
    }

    bool cell_fully_free(std::uint64_t cell, std::uint64_t t) const {
        return free_cols_in_cell(cell, t) == cell_cols;
    }

    std::uint64_t count_free_cells(std::uint64_t t) const {
        std::uint64_t count = 0;
        for (std::uint64_t cell = 0; cell < num_cells; ++cell) {
            if (cell_fully_free(cell, t)) ++count;
        }
        return count;
    }
};

struct Candidate {
    bool valid = false;
    ResourceKind resource = ResourceKind::cells;
    std::vector<std::uint64_t> cells;
    std::uint64_t cell = 0;
    std::vector<std::uint64_t> columns;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t units = 0;

    // Earlier completion wins; ties prefer fewer resource units.
    bool better_than(const Candidate& other) const {
        if (!other.valid) return valid;
        if (!valid) return false;
        if (end != other.end) return end < other.end;
        return units < other.units;
    }
};

class GreedyScheduler {
public:
    GreedyScheduler(const OpGraph& graph, const sim::ArrayConfig& config)
        : graph_(graph), config_(config), state_(config) {}

    Schedule run() {
        for (const auto& node : graph_.nodes) {
            if (node.is_symbolic()) check_conv_feasible(node, config_);
        }
        Schedule schedule;
        schedule.per_cell_busy.assign(config_.num_cells, 0.0);

        std::vector<std::uint64_t> dep_done(graph_.size(), 0);
        std::vector<std::size_t> blockers(graph_.size(), 0);
        for (const auto& node : graph_.nodes) blockers[node.index] = node.deps.size();

        std::set<std::uint64_t> events{0};
        std::vector<bool> scheduled(graph_.size(), false);
        std::size_t remaining = graph_.size();

        while (remaining > 0) {
            if (events.empty()) {
                throw infeasible_error("scheduler stalled with ops remaining");
            }
            const std::uint64_t now = *events.begin();
            events.erase(events.begin());

            // Place as many ready ops as profitable at this instant.
            while (true) {
                std::vector<std::size_t> ready;
                for (const auto& node : graph_.nodes) {
                    if (scheduled[node.index] || blockers[node.index] > 0) continue;
                    if (dep_done[node.index] <= now) ready.push_back(node.index);
                }
                if (ready.empty()) break;
                rank_ready(ready, now);
                bool symbolic_waiting = false;
                for (std::size_t idx : ready) {
                    if (graph_.nodes[idx].is_symbolic()) symbolic_waiting = true;
                }

                bool placed_any = false;
                for (std::size_t idx : ready) {
                    std::uint64_t evaluated = 0;
                    Candidate best =
                        best_placement(graph_.nodes[idx], now, evaluated, symbolic_waiting);
                    // Waiting for a completion event may free a larger block
                    // and finish earlier. Checking the earliest event covers
                    // short waits; checking the drain point (when everything
                    // outstanding has finished and the full array is free)
                    // keeps every op's completion within the sequential
                    // baseline's budget, so greedy never loses to it.
                    bool defer = false;
                    const auto next_event = next_event_after(now, events);
                    if (best.valid && next_event) {
                        std::vector<std::uint64_t> probes{*next_event};
                        const std::uint64_t drain = *events.rbegin();
                        if (drain != *next_event) probes.push_back(drain);
                        for (std::uint64_t t : probes) {
                            Candidate later = best_placement(graph_.nodes[idx], t,
                                                             evaluated, symbolic_waiting);
                            if (later.valid && later.end < best.end) defer = true;
                        }
                    }
                    schedule.max_candidates_per_step =
                        std::max(schedule.max_candidates_per_step, evaluated);
                    if (best.valid && !defer) {
                        commit(schedule, graph_.nodes[idx], best, dep_done, blockers,
                               events);
                        scheduled[idx] = true;
                        --remaining;
                        placed_any = true;
                        break;  // re-rank with updated resources
                    }
                }
                if (!placed_any) break;
            }
        }

        schedule.makespan = 0;
        for (const auto& e : schedule.entries) {
            schedule.makespan = std::max(schedule.makespan, e.end);
        }
        accumulate_busy(schedule);
        return schedule;
    }

private:
    std::optional<std::uint64_t> next_event_after(std::uint64_t now,
                                                  const std::set<std::uint64_t>& events) {
        for (std::uint64_t e : events) {
            if (e > now) return e;
        }
        return std::nullopt;
    }

    void rank_ready(std::vector<std::size_t>& ready, std::uint64_t now) {
        const bool neural_first = state_.count_free_cells(now) >= 4;
        auto priority = [&](const OpNode& node) {
            if (node.simd_offload) return 2;
            if (node.is_neural()) return neural_first ? 0 : 1;
            return neural_first ? 1 : 0;
        };
        std::stable_sort(ready.begin(), ready.end(), [&](std::size_t a, std::size_t b) {
            const OpNode& na = graph_.nodes[a];
            const OpNode& nb = graph_.nodes[b];
            const int pa = priority(na), pb = priority(nb);
            if (pa != pb) return pa < pb;
            const std::uint64_t la = canonical_latency(na);
            const std::uint64_t lb = canonical_latency(nb);
            if (la != lb) return la > lb;
            return na.id < nb.id;
        });
    }

    std::uint64_t canonical_latency(const OpNode& node) {
        auto it = canonical_cache_.find(node.index);
        if (it != canonical_cache_.end()) return it->second;
        std::uint64_t units = 1;
        if (node.is_neural()) {
            units = config_.num_cells;
        } else if (node.is_symbolic()) {
            units = config_.cell_cols;
        }
        const std::uint64_t lat = estimate_cycles(node, units, config_);
        canonical_cache_[node.index] = lat;
        return lat;
    }

    Candidate best_placement(const OpNode& node, std::uint64_t t,
                             std::uint64_t& evaluated,
                             bool symbolic_waiting = false) {
        Candidate best;
        if (node.simd_offload) {
            if (state_.simd_free_at <= t) {
                Candidate c;
                c.valid = true;
                c.resource = ResourceKind::simd;
                c.start = t;
                c.end = t + estimate_cycles(node, 1, config_);
                c.units = 1;
                ++evaluated;
                best = c;
            }
            return best;
        }
        if (node.is_neural()) {
            std::vector<std::uint64_t> free_cells;
            for (std::uint64_t cell = 0; cell < state_.num_cells; ++cell) {
                if (state_.cell_fully_free(cell, t)) free_cells.push_back(cell);
            }
            auto best_over = [&](std::uint64_t max_count) {
                Candidate found;
                std::vector<std::uint64_t> counts;
                for (std::uint64_t count = 1; count <= max_count; count *= 2) {
                    counts.push_back(count);
                }
                if (max_count > 0 && (counts.empty() || counts.back() != max_count)) {
                    counts.push_back(max_count);
                }
                for (std::uint64_t count : counts) {
                    Candidate c;
                    c.valid = true;
                    c.resource = ResourceKind::cells;
                    c.cells.assign(free_cells.begin(), free_cells.begin() + count);
                    c.start = t;
                    c.end = t + estimate_cycles(node, count, config_);
                    c.units = count;
                    ++evaluated;
                    if (c.better_than(found)) found = c;
                }
                return found;
            };
            best = best_over(free_cells.size());
            // Mixed ready set: leave one cell's columns for waiting symbolic
            // ops (cell-wise partition). Allowed only while the capped
            // placement stays within the sequential budget consumed so far,
            // which keeps greedy's makespan at or below the baseline.
            if (symbolic_waiting && free_cells.size() >= 2) {
                Candidate capped = best_over(free_cells.size() - 1);
                if (capped.valid &&
                    capped.end <= committed_latency_sum_ + canonical_latency(node)) {
                    return capped;
                }
            }
            return best;
        }
        // Symbolic: q columns of a single cell, first cell that fits.
        for (std::uint64_t q = 1; q <= state_.cell_cols; q *= 2) {
            for (std::uint64_t cell = 0; cell < state_.num_cells; ++cell) {
                if (state_.free_cols_in_cell(cell, t) < q) continue;
                Candidate c;
                c.valid = true;
                c.resource = ResourceKind::columns;
                c.cell = cell;
                for (std::uint64_t col = 0; col < state_.cell_cols && c.columns.size() < q;
                     ++col) {
                    if (state_.column_free_at[cell * state_.cell_cols + col] <= t) {
                        c.columns.push_back(col);
                    }
                }
                c.start = t;
                c.end = t + estimate_cycles(node, q, config_);
                c.units = q;
                ++evaluated;
                if (c.better_than(best)) best = c;
                break;  // first fitting cell per q
            }
        }
        return best;
    }

    void commit(Schedule& schedule, const OpNode& node, const Candidate& cand,
                std::vector<std::uint64_t>& dep_done, std::vector<std::size_t>& blockers,
                std::set<std::uint64_t>& events) {
        committed_latency_sum_ += canonical_latency(node);
        ScheduleEntry entry;
        entry.op_index = node.index;
        entry.op_id = node.id;
        entry.resource = cand.resource;
        entry.cells = cand.cells;
        entry.cell = cand.cell;
        entry.columns = cand.columns;
        entry.start = cand.start;
        entry.end = cand.end;
        entry.scheme = scheme_name(node, cand);
        schedule.entries.push_back(entry);

        if (cand.resource == ResourceKind::cells) {
            for (std::uint64_t cell : cand.cells) {
                for (std::uint64_t col = 0; col < state_.cell_cols; ++col) {
                    state_.column_free_at[cell * state_.cell_cols + col] = cand.end;
                }
            }
        } else if (cand.resource == ResourceKind::columns) {
            for (std::uint64_t col : cand.columns) {
                state_.column_free_at[cand.cell * state_.cell_cols + col] = cand.end;
            }
        } else {
            state_.simd_free_at = cand.end;
        }
        events.insert(cand.end);

        for (const auto& other : graph_.nodes) {
            for (std::size_t dep : other.deps) {
                if (dep == node.index) {
                    --blockers[other.index];
                    dep_done[other.index] = std::max(dep_done[other.index], cand.end);
                }
            }
        }
    }

    std::string scheme_name(const OpNode& node, const Candidate& cand) const {
        if (node.simd_offload) return "simd";
        mapping::OpDescriptor desc;
        desc.is_circconv = node.is_symbolic();
        desc.d = node.dims.d;
        desc.rows = node.dims.rows;
        desc.cols = node.dims.cols;
        desc.inner = node.dims.inner;
        const mapping::Scheme scheme =
            mapping::choose_scale(desc, config_.num_arrays, config_.pes_per_array,
                                  config_.cell_rows, config_.cell_cols);
        (void)cand;
        return mapping::to_string(scheme);
    }

    void accumulate_busy(Schedule& schedule) const {
        for (const auto& e : schedule.entries) {
            const double duration = static_cast<double>(e.end - e.start);
            if (e.resource == ResourceKind::cells) {
                for (std::uint64_t cell : e.cells) {
                    schedule.per_cell_busy[cell] += duration;
                }
            } else if (e.resource == ResourceKind::columns) {
                schedule.per_cell_busy[e.cell] +=
                    duration * static_cast<double>(e.columns.size()) /
                    static_cast<double>(config_.cell_cols);
            }
        }
    }

    const OpGraph& graph_;
    const sim::ArrayConfig& config_;
    ResourceState state_;
    std::map<std::size_t, std::uint64_t> canonical_cache_;
    std::uint64_t committed_latency_sum_ = 0;
};

}  // namespace

Schedule greedy_schedule(const OpGraph& graph, const sim::ArrayConfig& config) {
    config.validate();
    GreedyScheduler scheduler(graph, config);
    return scheduler.run();
}

Schedule sequential_schedule(const OpGraph& graph, const sim::ArrayConfig& config) {
    config.validate();
    for (const auto& node : graph.nodes) {
        if (node.is_symbolic()) check_conv_feasible(node, config);
    }
    Schedule schedule;
    schedule.per_cell_busy.assign(config.num_cells, 0.0);
    std::uint64_t clock = 0;
    for (std::size_t idx : graph.topological_order()) {
        const OpNode& node = graph.nodes[idx];
        ScheduleEntry entry;
        entry.op_index = node.index;
        entry.op_id = node.id;
        entry.start = clock;
        if (node.simd_offload) {
            entry.resource = ResourceKind::simd;
            entry.end = clock + estimate_cycles(node, 1, config);
            entry.scheme = "simd";
        } else if (node.is_neural()) {
            entry.resource = ResourceKind::cells;
            for (std::uint64_t cell = 0; cell < config.num_cells; ++cell) {
                entry.cells.push_back(cell);
            }
            entry.end = clock + estimate_cycles(node, config.num_cells, config);
            entry.scheme = "scale-out-gemm";
            for (std::uint64_t cell = 0; cell < config.num_cells; ++cell) {
                schedule.per_cell_busy[cell] += static_cast<double>(entry.end - entry.start);
            }
        } else {
            entry.resource = ResourceKind::columns;
            entry.cell = 0;
            for (std::uint64_t col = 0; col < config.cell_cols; ++col) {
                entry.columns.push_back(col);
            }
            entry.end = clock + estimate_cycles(node, config.cell_cols, config);
            entry.scheme = "scale-out-conv";
            schedule.per_cell_busy[0] += static_cast<double>(entry.end - entry.start);
        }
        clock = entry.end;
        schedule.entries.push_back(std::move(entry));
    }
    schedule.makespan = clock;
    return schedule;
}

std::vector<std::string> validate(const Schedule& schedule, const OpGraph& graph,
                                  const sim::ArrayConfig& config) {
    std::vector<std::string> violations;

    std::map<std::size_t, const ScheduleEntry*> by_op;
    for (const auto& e : schedule.entries) {
        if (e.end <= e.start) {
            violations.push_back("op " + e.op_id + ": non-positive duration");
        }
        if (!by_op.emplace(e.op_index, &e).second) {
            violations.push_back("op " + e.op_id + ": scheduled more than once");
        }
    }
    for (const auto& node : graph.nodes) {
        auto it = by_op.find(node.index);
        if (it == by_op.end()) {
            violations.push_back("op " + node.id + ": never scheduled");
            continue;
        }
        for (std::size_t dep : node.deps) {
            auto dit = by_op.find(dep);
            if (dit == by_op.end()) continue;
            if (it->second->start < dit->second->end) {
                violations.push_back("op " + node.id + ": starts at " +
                                     std::to_string(it->second->start) +
                                     " before dependency " + dit->second->op_id +
                                     " ends at " + std::to_string(dit->second->end));
            }
        }
    }

    // Per-column and SIMD interval overlap.
    struct Interval {
        std::uint64_t start, end;
        const ScheduleEntry* entry;
    };
    std::map<std::uint64_t, std::vector<Interval>> column_intervals;
    std::vector<Interval> simd_intervals;
    for (const auto& e : schedule.entries) {
        if (e.resource == ResourceKind::simd) {
            simd_intervals.push_back({e.start, e.end, &e});
        } else if (e.resource == ResourceKind::cells) {
            for (std::uint64_t cell : e.cells) {
                for (std::uint64_t col = 0; col < config.cell_cols; ++col) {
                    column_intervals[cell * config.cell_cols + col].push_back(
                        {e.start, e.end, &e});
                }
            }
        } else {
            for (std::uint64_t col : e.columns) {
                column_intervals[e.cell * config.cell_cols + col].push_back(
                    {e.start, e.end, &e});
            }
        }
    }
    // One violation per conflicting entry pair, not per shared column.
    std::set<std::pair<std::size_t, std::size_t>> seen_pairs;
    auto check_overlaps = [&](std::vector<Interval>& intervals, const std::string& what) {
        std::sort(intervals.begin(), intervals.end(),
                  [](const Interval& a, const Interval& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < intervals.size(); ++i) {
            if (intervals[i].start < intervals[i - 1].end) {
                const auto a = intervals[i - 1].entry->op_index;
                const auto b = intervals[i].entry->op_index;
                if (seen_pairs.emplace(std::min(a, b), std::max(a, b)).second) {
                    violations.push_back("overlap on " + what + ": " +
                                         intervals[i - 1].entry->op_id + " and " +
                                         intervals[i].entry->op_id);
                }
            }
        }
    };
    for (auto& [key, intervals] : column_intervals) {
        check_overlaps(intervals,
                       "cell " + std::to_string(key / config.cell_cols) + " column " +
                           std::to_string(key % config.cell_cols));
    }
    check_overlaps(simd_intervals, "simd unit");
    return violations;
}

ScheduleStats stats(const Schedule& schedule, const sim::ArrayConfig& config) {
    ScheduleStats st;
    st.makespan = schedule.makespan;
    st.cell_utilization.assign(config.num_cells, 0.0);
    if (schedule.makespan == 0) return st;
    double sum = 0.0;
    for (std::uint64_t cell = 0; cell < config.num_cells; ++cell) {
        const double busy =
            cell < schedule.per_cell_busy.size() ? schedule.per_cell_busy[cell] : 0.0;
        st.cell_utilization[cell] = busy / static_cast<double>(schedule.makespan);
        sum += st.cell_utilization[cell];
    }
    st.mean_utilization = sum / static_cast<double>(config.num_cells);
    return st;
}

std::string Schedule::to_json(const sim::ArrayConfig& config) const {
    nlohmann::json j;
    j["makespan"] = makespan;
    const ScheduleStats st = stats(*this, config);
    j["utilization"] = st.cell_utilization;
    j["mean_utilization"] = st.mean_utilization;
    j["max_candidates_per_step"] = max_candidates_per_step;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["op"] = e.op_id;
        je["start"] = e.start;
        je["end"] = e.end;
        je["scheme"] = e.scheme;
        switch (e.resource) {
            case ResourceKind::cells:
                je["cells"] = e.cells;
                break;
            case ResourceKind::columns:
                je["cell"] = e.cell;
                je["columns"] = e.columns;
                break;
            case ResourceKind::simd:
                je["unit"] = "simd";
                break;
        }
        j["entries"].push_back(je);
    }
    return j.dump(2);
}

std::string Schedule::gantt_csv() const {
    std::ostringstream os;
    os << "op,cells,start,end\n";
    for (const auto& e : entries) {
        os << e.op_id << ',';
        if (e.resource == ResourceKind::simd) {
            os << "simd";
        } else if (e.resource == ResourceKind::cells) {
            for (std::size_t i = 0; i < e.cells.size(); ++i) {
                if (i) os << ' ';
                os << "cell" << e.cells[i];
            }
        } else {
            os << "cell" << e.cell << ":cols";
            for (std::size_t i = 0; i < e.columns.size(); ++i) {
                if (i) os << '+';
                os << e.columns[i];
            }
        }
        os << ',' << e.start << ',' << e.end << '\n';
    }
    return os.str();
}

}  // namespace cogsim::sched
