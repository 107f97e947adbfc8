#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "jbac/optimizer.hpp"
#include "jbac/types.hpp"

namespace jbac {

enum class ScenarioKind {
    convergence,
    lambda_sweep,
    snr_sweep,
    es_compare,
    discrete_phase,
    imperfect_csi,
    baseline_compare,
};

const char* to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

/// One experiment: a sweep over (sweep value x channel seed x method) cells.
struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::snr_sweep;
    SystemConfig cfg;
    OptimizerSettings opt;
    std::string sweep_name = "snr_db";
    std::vector<double> sweep_values;
    std::vector<std::uint64_t> channel_seeds;
    std::vector<std::string> methods;       // empty = defaults of the kind
    std::vector<int> b_values = {1, 2};     // discrete_phase
    std::vector<double> deltas = {0.0, 0.2, 0.5};  // imperfect_csi
    double snr_db = -10.0;                  // fixed SNR for non-SNR sweeps
    // weight used when optimizing the psk baseline's pattern; NaN = same
    // weight as the proposed design (metrics always use the design weight)
    double mpsk_lambda0 = std::numeric_limits<double>::quiet_NaN();
    int es_bits = 2;
    double es_budget = 2e7;
    std::uint64_t trials = 100000;
    std::uint64_t early_exit_bit_errors = 1000;
    std::size_t n_seeds = 20;               // used when channel_seeds is empty
    std::uint64_t root_seed = 1;
    int jobs = 0;                           // 0 = all hardware threads
    bool quiet = true;
};

/// One CSV row; field order matches csv_header().
struct ResultRow {
    std::string scenario;
    std::string kind;
    std::string method;
    std::int64_t seed = 0;       // -1 marks across-seed aggregate rows
    std::string sweep_name;
    double sweep_value = 0.0;
    double snr_db = 0.0;
    double lambda0 = 0.0;
    std::size_t n_elements = 0;
    std::size_t n_patterns = 0;
    int b = 0;                   // quantization bits, 0 = continuous
    double delta = 0.0;
    double avg_user_rate_bps = 0.0;
    double goodput_bps = 0.0;
    double ber_ub = 0.0;
    double ber_mc = -1.0;        // -1 = no Monte Carlo run for this row
    double ber_mc_stderr = -1.0;
    double objective = 0.0;
    std::int64_t iterations = 0;
    double wall_time_s = 0.0;
};

// Parse the flat key = value scenario format (one key per line, lists
// comma-separated, # starts a comment). Throws std::invalid_argument.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

std::vector<ResultRow> run_scenario(const Scenario& sc);

const std::string& csv_header();
std::string format_csv_row(const ResultRow& row);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace jbac
