#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotgrid/pathloss.hpp"

namespace pilotgrid {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key/value experiment configuration. File format: `key = value` lines,
// '#' comments; CLI overrides take the same `key=value` form.
struct ExperimentConfig {
    std::string scheme = "rsa";  // rsa | regenerative | distributed-rsa | random | maxmin | bnp
    double lambda_r = 1e-4;      // RRHs per m^2
    double lambda_u = 1e-5;      // users per m^2
    int pilots = 16;             // P; pilot length tau_p = P
    double rinh = 200.0;         // meters
    double window_radius = 1500.0;
    double measure_radius = 600.0;
    double rho_p_db = 80.0;      // uplink pilot SNR
    int trials = 500;
    std::uint64_t seed = 1;
    double se_cap_db = 40.0;     // SINR cap for singleton co-pilot sets
    bool emit_timing = false;    // keep runtime_ms at 0 for byte-stable datasets
    int threads = 0;             // 0 = hardware concurrency
    PathlossParams pathloss{};

    // max-min scheme
    double epsilon = 1.0;
    int size_floor = 2;
    double feasibility_budget_s = 10.0;
    int maxmin_max_users = 2000;

    // bnp scheme
    double gamma_min_db = 0.0;   // <= -900 disables the SINR floor
    double big_m = 1e6;
    double bnp_budget_s = 30.0;
    int kmeans_restarts = 10;
    int k_override = 0;          // 0 = max(P, ceil(N_u/P))

    double pilot_energy() const;     // tau_p * rho_p (linear), tau_p = P
    double sinr_cap() const;
    double gamma_min_linear() const;

    void validate() const;
    void apply_override(const std::string& assignment);  // "key=value"
    static ExperimentConfig from_file(const std::string& path);
    std::vector<std::string> echo() const;  // stable "key = value" listing
};

struct ResultRow {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string scheme;
    int typical_assigned = 0;
    double typical_se = 0.0;
    double sum_se = 0.0;
    double assigned_density = 0.0;
    double runtime_ms = 0.0;
};

struct Dataset {
    ExperimentConfig config;
    std::vector<ResultRow> rows;

    std::string to_csv() const;
    std::string to_json() const;
    double mean_typical_se() const;
};

// One row per trial: sample the network, run the scheme, evaluate the typical
// user at the origin and the sum SE over the measurement window.
Dataset run_experiment(const ExperimentConfig& config);

// Grid search for the R_inh that maximizes mean typical-user SE (ties break
// toward the smaller radius).
double best_rinh(const ExperimentConfig& config, const std::vector<double>& grid);

// Dataset generators for the named figure pipelines; files land in out_dir.
// Valid names: fig3-left, fig3-center, fig3-right, fig4-ratios, fig5-cdf.
void reproduce_figure(const std::string& name, const ExperimentConfig& config,
                      const std::string& out_dir, bool certified = false);

const std::vector<std::string>& figure_names();

inline const char* version_string() { return "pilotgrid 0.1.0"; }

}  // namespace pilotgrid
