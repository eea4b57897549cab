#include "cogsim/array_config.hpp"

#include <fstream>

#include <json.hpp>

#include "cogsim/common.hpp"

namespace cogsim::sim {

using nlohmann::json;

void ArrayConfig::validate() const {
    if (num_arrays < 1 || pes_per_array < 1 || num_cells < 1 || cell_rows < 1 ||
        cell_cols < 1 || simd_lanes < 1) {
        throw validation_error("ArrayConfig: all shape fields must be >= 1");
    }
    if (num_arrays * pes_per_array != total_pes()) {
        throw validation_error(
            "ArrayConfig: N * M (" + std::to_string(num_arrays * pes_per_array) +
            ") must equal the total PEs across cells (" +
            std::to_string(total_pes()) + ")");
    }
}

ArrayConfig ArrayConfig::load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw validation_error("config file " + path + ": " + e.what());
    }
    ArrayConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("num_arrays", cfg.num_arrays);
    get("pes_per_array", cfg.pes_per_array);
    get("num_cells", cfg.num_cells);
    get("cell_rows", cfg.cell_rows);
    get("cell_cols", cfg.cell_cols);
    get("simd_lanes", cfg.simd_lanes);
    get("sram_a_bytes", cfg.sram_a_bytes);
    get("sram_b_bytes", cfg.sram_b_bytes);
    get("dram_bandwidth_bytes_per_cycle", cfg.dram_bandwidth_bytes_per_cycle);
    if (j.contains("precision")) {
        cfg.precision = quant::parse_quant_mode(j.at("precision").get<std::string>());
    }
    if (j.contains("energy_coeffs")) {
        const json& e = j.at("energy_coeffs");
        auto gete = [&](const char* key, double& field) {
            if (e.contains(key)) field = e.at(key).get<double>();
        };
        gete("mac_pj", cfg.energy.mac_pj);
        gete("sram_a_access_pj", cfg.energy.sram_a_access_pj);
        gete("sram_b_access_pj", cfg.energy.sram_b_access_pj);
        gete("dram_byte_pj", cfg.energy.dram_byte_pj);
        gete("simd_op_pj", cfg.energy.simd_op_pj);
    }
    cfg.validate();
    return cfg;
}

std::string ArrayConfig::to_json() const {
    json j;
    j["num_arrays"] = num_arrays;
    j["pes_per_array"] = pes_per_array;
    j["num_cells"] = num_cells;
    j["cell_rows"] = cell_rows;
    j["cell_cols"] = cell_cols;
    j["simd_lanes"] = simd_lanes;
    j["sram_a_bytes"] = sram_a_bytes;
    j["sram_b_bytes"] = sram_b_bytes;
    j["dram_bandwidth_bytes_per_cycle"] = dram_bandwidth_bytes_per_cycle;
    j["precision"] = quant::to_string(precision);
    j["energy_coeffs"] = {{"mac_pj", energy.mac_pj},
                          {"sram_a_access_pj", energy.sram_a_access_pj},
                          {"sram_b_access_pj", energy.sram_b_access_pj},
                          {"dram_byte_pj", energy.dram_byte_pj},
                          {"simd_op_pj", energy.simd_op_pj}};
    return j.dump(2);
}

}  // namespace cogsim::sim
