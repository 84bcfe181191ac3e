#include "pilotgrid/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pilotgrid/assignment.hpp"
#include "pilotgrid/bnp.hpp"
#include "pilotgrid/channel.hpp"
#include "pilotgrid/csv.hpp"
#include "pilotgrid/geometry.hpp"
#include "pilotgrid/maxmin.hpp"
#include "pilotgrid/parallel.hpp"
#include "pilotgrid/random.hpp"
#include "pilotgrid/rsa_theory.hpp"
#include "pilotgrid/spectral.hpp"

namespace pilotgrid {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean: " + v);
}

double parse_double(const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw ConfigError("invalid number: " + v);
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("invalid number: " + v);
    }
}

long long parse_int(const std::string& v) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used != v.size()) throw ConfigError("invalid integer: " + v);
        return i;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer: " + v);
    }
}

}  // namespace

double ExperimentConfig::pilot_energy() const {
    return pilots * std::pow(10.0, rho_p_db / 10.0);
}

double ExperimentConfig::sinr_cap() const { return std::pow(10.0, se_cap_db / 10.0); }

double ExperimentConfig::gamma_min_linear() const {
    if (gamma_min_db <= -900.0) return 0.0;
    return std::pow(10.0, gamma_min_db / 10.0);
}

void ExperimentConfig::validate() const {
    static const char* schemes[] = {"rsa",    "regenerative", "distributed-rsa",
                                    "random", "maxmin",       "bnp"};
    if (std::find(std::begin(schemes), std::end(schemes), scheme) == std::end(schemes))
        throw ConfigError("unknown scheme: " + scheme);
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (lambda_r < 0.0 || lambda_u < 0.0) throw ConfigError("densities must be >= 0");
    if (pilots < 1) throw ConfigError("pilots must be >= 1");
    if (!(rinh > 0.0)) throw ConfigError("rinh must be > 0");
    if (!(window_radius > 0.0) || !(measure_radius > 0.0) ||
        measure_radius > window_radius)
        throw ConfigError("need 0 < measure_radius <= window_radius");
    pathloss.validate();
}

void ExperimentConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));

    if (key == "scheme") scheme = value;
    else if (key == "lambda_r") lambda_r = parse_double(value);
    else if (key == "lambda_u") lambda_u = parse_double(value);
    else if (key == "pilots") pilots = static_cast<int>(parse_int(value));
    else if (key == "rinh") rinh = parse_double(value);
    else if (key == "window_radius") window_radius = parse_double(value);
    else if (key == "measure_radius") measure_radius = parse_double(value);
    else if (key == "rho_p_db") rho_p_db = parse_double(value);
    else if (key == "trials") trials = static_cast<int>(parse_int(value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "se_cap_db") se_cap_db = parse_double(value);
    else if (key == "emit_timing") emit_timing = parse_bool(value);
    else if (key == "threads") threads = static_cast<int>(parse_int(value));
    else if (key == "pl_street_width") pathloss.street_width = parse_double(value);
    else if (key == "pl_h_ap") pathloss.h_ap = parse_double(value);
    else if (key == "pl_h_at") pathloss.h_at = parse_double(value);
    else if (key == "pl_h") pathloss.h = parse_double(value);
    else if (key == "pl_fc_ghz") pathloss.fc_ghz = parse_double(value);
    else if (key == "epsilon") epsilon = parse_double(value);
    else if (key == "size_floor") size_floor = static_cast<int>(parse_int(value));
    else if (key == "feasibility_budget_s") feasibility_budget_s = parse_double(value);
    else if (key == "maxmin_max_users") maxmin_max_users = static_cast<int>(parse_int(value));
    else if (key == "gamma_min_db") gamma_min_db = parse_double(value);
    else if (key == "big_m") big_m = parse_double(value);
    else if (key == "bnp_budget_s") bnp_budget_s = parse_double(value);
    else if (key == "kmeans_restarts") kmeans_restarts = static_cast<int>(parse_int(value));
    else if (key == "k_override") k_override = static_cast<int>(parse_int(value));
    else throw ConfigError("unknown config key: " + key);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        cfg.apply_override(line);
    }
    return cfg;
}

std::vector<std::string> ExperimentConfig::echo() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
    add("scheme", scheme);
    add("lambda_r", format_double(lambda_r));
    add("lambda_u", format_double(lambda_u));
    add("pilots", format_int(pilots));
    add("tau_p", format_int(pilots));
    add("rinh", format_double(rinh));
    add("window_radius", format_double(window_radius));
    add("measure_radius", format_double(measure_radius));
    add("rho_p_db", format_double(rho_p_db));
    add("trials", format_int(trials));
    add("seed", format_int(static_cast<long long>(seed)));
    add("se_cap_db", format_double(se_cap_db));
    add("emit_timing", emit_timing ? "true" : "false");
    add("pl_street_width", format_double(pathloss.street_width));
    add("pl_h_ap", format_double(pathloss.h_ap));
    add("pl_h_at", format_double(pathloss.h_at));
    add("pl_h", format_double(pathloss.h));
    add("pl_fc_ghz", format_double(pathloss.fc_ghz));
    add("epsilon", format_double(epsilon));
    add("size_floor", format_int(size_floor));
    add("feasibility_budget_s", format_double(feasibility_budget_s));
    add("gamma_min_db", format_double(gamma_min_db));
    add("big_m", format_double(big_m));
    add("bnp_budget_s", format_double(bnp_budget_s));
    add("kmeans_restarts", format_int(kmeans_restarts));
    add("k_override", format_int(k_override));
    return out;
}

namespace {

struct Realization {
    std::vector<Point2> rrhs;
    PointSet users;            // typical user appended last, marks present
    std::size_t typical_index = 0;
};

Realization make_realization(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
    const CircularWindow gen{Point2::Zero(), cfg.window_radius};
    Realization real;
    real.rrhs = sample_ppp(cfg.lambda_r, gen, derive_seed(trial_seed, 21)).points;
    PointSet users = sample_ppp(cfg.lambda_u, gen, derive_seed(trial_seed, 22));
    users.points.emplace_back(0.0, 0.0);  // typical user at the origin
    real.users = assign_marks(users, derive_seed(trial_seed, 23));
    real.typical_index = real.users.size() - 1;
    return real;
}

PointSet reorder_by_marks(const PointSet& users, std::vector<std::size_t>& order) {
    order.resize(users.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return users.marks[a] < users.marks[b];
    });
    PointSet out;
    out.seed = users.seed;
    out.points.reserve(users.size());
    for (std::size_t idx : order) out.points.push_back(users.points[idx]);
    return out;
}

PilotAssignment run_scheme(const ExperimentConfig& cfg, const Realization& real,
                           std::uint64_t trial_seed) {
    const int p = cfg.pilots;
    if (cfg.scheme == "rsa") return assign_rsa(real.users, p, cfg.rinh, derive_seed(trial_seed, 24));
    if (cfg.scheme == "random") return assign_random(real.users, p, derive_seed(trial_seed, 26));
    if (cfg.scheme == "distributed-rsa") {
        const SensingConfig sensing =
            sensing_config_from_rinh(cfg.rinh, cfg.pilot_energy(), cfg.pathloss);
        return assign_distributed(real.users, p, sensing, cfg.pathloss,
                                  derive_seed(trial_seed, 25));
    }
    if (cfg.scheme == "regenerative") {
        // feed the list in arrival order so the planted user is unbiased
        std::vector<std::size_t> order;
        const PointSet ordered = reorder_by_marks(real.users, order);
        const PilotAssignment seq = assign_regenerative(ordered, p, cfg.rinh);
        PilotAssignment out;
        out.num_pilots = p;
        out.r_inh = cfg.rinh;
        out.pilot.assign(real.users.size(), kUnassigned);
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            out.pilot[order[pos]] = seq.pilot[pos];
        return out;
    }
    if (cfg.scheme == "maxmin") {
        if (static_cast<int>(real.users.size()) > cfg.maxmin_max_users)
            throw ConfigError("maxmin scheme: user count exceeds maxmin_max_users");
        PartitionInstance inst;
        inst.users = real.users.points;
        inst.num_partitions = p;
        inst.size_floor = cfg.size_floor;
        inst.epsilon = cfg.epsilon;
        inst.feasibility_budget_s = cfg.feasibility_budget_s;
        const PartitionResult res = maxmin_assign(inst);
        PilotAssignment out;
        out.num_pilots = p;
        out.pilot.assign(real.users.size(), kUnassigned);
        if (res.status != PartitionStatus::infeasible)
            for (std::size_t i = 0; i < res.membership.size(); ++i)
                out.pilot[i] = res.membership[i] + 1;
        return out;
    }
    if (cfg.scheme == "bnp") {
        const CircularWindow meas{Point2::Zero(), cfg.measure_radius};
        std::vector<int> inside;
        for (std::size_t i = 0; i < real.users.size(); ++i)
            if (meas.contains(real.users.points[i])) inside.push_back(static_cast<int>(i));
        if (static_cast<int>(inside.size()) > 64)
            throw ConfigError("bnp scheme: more than 64 users in the measurement window");
        PilotAssignment out;
        out.num_pilots = p;
        out.pilot.assign(real.users.size(), kUnassigned);
        if (static_cast<int>(inside.size()) < 2 * p) return out;  // no non-singleton partition

        BnpInstance inst;
        inst.beta = copilot_gains(real.rrhs, real.users.points, inside, cfg.pathloss);
        inst.num_pilots = p;
        inst.gamma_min = cfg.gamma_min_linear();
        inst.big_m = cfg.big_m;
        inst.pilot_energy = cfg.pilot_energy();
        ClusterOptions copts;
        copts.kmeans.restarts = cfg.kmeans_restarts;
        const ClusterResult clusters = cluster_users(
            inst.beta.transpose(), p, derive_seed(trial_seed, 27),
            cfg.k_override > 0 ? std::optional<int>(cfg.k_override) : std::nullopt, copts);
        inst.clusters = clusters.user_membership;
        const BnpResult res = bnp_solve(inst, BnpOptions{cfg.bnp_budget_s, false});
        for (std::size_t j = 0; j < inside.size(); ++j)
            out.pilot[static_cast<std::size_t>(inside[j])] = res.assignment.pilot[j];
        return out;
    }
    throw ConfigError("unknown scheme: " + cfg.scheme);
}

ResultRow evaluate_trial(const ExperimentConfig& cfg, const Realization& real,
                         const PilotAssignment& assignment, int trial,
                         std::uint64_t trial_seed, double runtime_ms) {
    ResultRow row;
    row.trial = trial;
    row.seed = trial_seed;
    row.scheme = cfg.scheme;
    row.runtime_ms = cfg.emit_timing ? runtime_ms : 0.0;

    const CircularWindow meas{Point2::Zero(), cfg.measure_radius};
    row.typical_assigned = assignment.assigned(real.typical_index) ? 1 : 0;
    if (row.typical_assigned && !real.rrhs.empty()) {
        const double sinr = user_sinr(real.rrhs, real.users.points, assignment,
                                      real.typical_index, cfg.pilot_energy(), cfg.pathloss);
        row.typical_se = spectral_efficiency(sinr, cfg.sinr_cap());
    }

    if (!real.rrhs.empty()) {
        SeOptions opts;
        opts.pilot_energy = cfg.pilot_energy();
        opts.sinr_cap = cfg.sinr_cap();
        opts.pathloss = cfg.pathloss;
        opts.window_users_only = true;
        row.sum_se = se_metrics(real.rrhs, real.users.points, assignment, meas, opts).sum_se;
    }

    int assigned_in_window = 0;
    for (std::size_t i = 0; i < real.users.size(); ++i)
        if (assignment.assigned(i) && meas.contains(real.users.points[i]))
            ++assigned_in_window;
    row.assigned_density =
        assigned_in_window / (M_PI * cfg.measure_radius * cfg.measure_radius);
    return row;
}

}  // namespace

Dataset run_experiment(const ExperimentConfig& config) {
    config.validate();
    Dataset ds;
    ds.config = config;
    ds.rows.resize(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, config.threads, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
        const auto start = std::chrono::steady_clock::now();
        const Realization real = make_realization(config, trial_seed);
        const PilotAssignment assignment = run_scheme(config, real, trial_seed);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        ds.rows[static_cast<std::size_t>(t)] =
            evaluate_trial(config, real, assignment, t, trial_seed, ms);
    });
    return ds;
}

double Dataset::mean_typical_se() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.typical_se;
    return s / static_cast<double>(rows.size());
}

std::string Dataset::to_csv() const {
    CsvWriter w;
    w.comment(version_string());
    for (const auto& line : config.echo()) w.comment(line);
    w.header({"trial", "seed", "scheme", "typical_assigned", "typical_se", "sum_se",
              "assigned_density", "runtime_ms"});
    for (const auto& r : rows)
        w.row({format_int(r.trial), format_int(static_cast<long long>(r.seed)), r.scheme,
               format_int(r.typical_assigned), format_double(r.typical_se),
               format_double(r.sum_se), format_double(r.assigned_density),
               format_double(r.runtime_ms)});
    return w.content();
}

std::string Dataset::to_json() const {
    nlohmann::json j;
    j["version"] = version_string();
    for (const auto& line : config.echo()) {
        const auto eq = line.find(" = ");
        j["config"][line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"trial", r.trial},
                             {"seed", r.seed},
                             {"scheme", r.scheme},
                             {"typical_assigned", r.typical_assigned},
                             {"typical_se", r.typical_se},
                             {"sum_se", r.sum_se},
                             {"assigned_density", r.assigned_density},
                             {"runtime_ms", r.runtime_ms}});
    }
    return j.dump(2) + "\n";
}

double best_rinh(const ExperimentConfig& config, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("best_rinh: empty grid");
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    ExperimentConfig cfg = config;
    cfg.scheme = "rsa";
    double best_r = sorted.front();
    double best_se = -1.0;
    for (double r : sorted) {
        cfg.rinh = r;
        const double se = run_experiment(cfg).mean_typical_se();
        if (se > best_se) {
            best_se = se;
            best_r = r;
        }
    }
    return best_r;
}

namespace {

void write_figure_csv(const std::string& out_dir, const std::string& name,
                      const ExperimentConfig& cfg, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::filesystem::create_directories(out_dir);
    CsvWriter w;
    w.comment(version_string());
    w.comment("figure = " + name);
    for (const auto& line : cfg.echo()) w.comment(line);
    w.header(columns);
    for (const auto& r : rows) w.row(r);
    w.save(out_dir + "/" + name + ".csv");
}

void figure_fig3_left(const ExperimentConfig& cfg, const std::string& out_dir) {
    const CircularWindow gen{Point2::Zero(), cfg.window_radius};
    const CircularWindow meas{Point2::Zero(), cfg.measure_radius};
    std::vector<std::vector<std::string>> rows;
    for (int p = 1; p <= 16; ++p) {
        const double theory = sequential_densities(cfg.lambda_u, cfg.rinh, p).per_pilot_mean;
        const RsaDensityStats mc =
            rsa_density_mc(cfg.lambda_u, p, cfg.rinh, gen, meas, cfg.trials,
                           derive_seed(cfg.seed, 300 + static_cast<std::uint64_t>(p)));
        rows.push_back({format_int(p), format_double(theory),
                        format_double(mc.assigned_per_m2 / p)});
    }
    write_figure_csv(out_dir, "fig3-left", cfg, {"pilots", "density_theory", "density_sim"},
                     rows);
}

void figure_fig3_center(const ExperimentConfig& cfg, const std::string& out_dir) {
    const CircularWindow gen{Point2::Zero(), cfg.window_radius};
    std::vector<std::vector<std::string>> rows;
    for (int p = 1; p <= 16; ++p) {
        AssignmentProbabilityInputs in;
        in.lambda_u = cfg.lambda_u;
        in.r_inh = cfg.rinh;
        in.num_pilots = p;
        in.r_s = cfg.measure_radius;
        const double theory = assignment_probability(in);
        const double sim =
            typical_assignment_mc(cfg.lambda_u, p, cfg.rinh, gen, cfg.trials,
                                  derive_seed(cfg.seed, 400 + static_cast<std::uint64_t>(p)));
        rows.push_back({format_int(p), format_double(theory), format_double(sim)});
    }
    write_figure_csv(out_dir, "fig3-center", cfg, {"pilots", "prob_theory", "prob_sim"}, rows);
}

struct MeanCi {
    double mean = 0.0;
    double ci95 = 0.0;
};

MeanCi typical_se_stats(const Dataset& ds) {
    MeanCi out;
    const std::size_t n = ds.rows.size();
    if (n == 0) return out;
    for (const auto& r : ds.rows) out.mean += r.typical_se;
    out.mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : ds.rows) var += (r.typical_se - out.mean) * (r.typical_se - out.mean);
    var /= std::max<std::size_t>(1, n - 1);
    out.ci95 = 1.96 * std::sqrt(var / static_cast<double>(n));
    return out;
}

void figure_fig3_right(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::vector<double> rinh_grid = {50, 100, 150, 200, 250, 300, 400, 500, 650, 800};
    ExperimentConfig random_cfg = cfg;
    random_cfg.scheme = "random";
    const MeanCi random_stats = typical_se_stats(run_experiment(random_cfg));

    std::vector<std::vector<std::string>> rows;
    ExperimentConfig rsa_cfg = cfg;
    rsa_cfg.scheme = "rsa";
    for (double r : rinh_grid) {
        rsa_cfg.rinh = r;
        const MeanCi s = typical_se_stats(run_experiment(rsa_cfg));
        rows.push_back({format_double(r), format_double(s.mean), format_double(s.ci95),
                        format_double(random_stats.mean), format_double(random_stats.ci95)});
    }
    write_figure_csv(out_dir, "fig3-right", cfg,
                     {"rinh", "se_rsa_mean", "se_rsa_ci95", "se_random_mean", "se_random_ci95"},
                     rows);
}

void figure_fig4_ratios(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::vector<double> lambda_r_grid = {1e-5, 2e-5, 5e-5, 1e-4};
    const std::vector<double> rinh_grid = {100, 200, 300, 400, 500, 600};
    std::vector<std::vector<std::string>> rows;
    for (double lr : lambda_r_grid) {
        ExperimentConfig c = cfg;
        c.lambda_r = lr;
        const double rstar = best_rinh(c, rinh_grid);
        c.rinh = rstar;
        c.scheme = "rsa";
        const double se_rsa = run_experiment(c).mean_typical_se();
        c.scheme = "maxmin";
        const double se_maxmin = run_experiment(c).mean_typical_se();
        c.scheme = "random";
        const double se_random = run_experiment(c).mean_typical_se();
        rows.push_back({format_double(lr), format_double(rstar), format_double(se_rsa),
                        format_double(se_maxmin), format_double(se_random),
                        format_double(se_maxmin / se_rsa), format_double(se_random / se_rsa)});
    }
    write_figure_csv(out_dir, "fig4-ratios", cfg,
                     {"lambda_r", "rinh_star", "se_rsa", "se_maxmin", "se_random",
                      "maxmin_to_rsa", "random_to_rsa"},
                     rows);
}

void figure_fig5_cdf(const ExperimentConfig& cfg, const std::string& out_dir, bool certified) {
    const int n_u = certified ? 12 : 48;
    const int p = certified ? 3 : cfg.pilots;
    const std::vector<int> n_r_grid = {5, 10, 20};
    const CircularWindow disk{Point2::Zero(), cfg.window_radius};

    std::vector<std::vector<std::string>> rows;
    for (int n_r : n_r_grid) {
        struct TrialOut {
            double ratio = 0.0;
            int certified = 0;
        };
        std::vector<TrialOut> outs(static_cast<std::size_t>(cfg.trials));
        parallel_for(cfg.trials, cfg.threads, [&](int t) {
            const std::uint64_t ts = derive_seed(
                cfg.seed, 500 + static_cast<std::uint64_t>(n_r) * 100000 +
                              static_cast<std::uint64_t>(t));
            PointSet users = sample_uniform_disk(static_cast<std::size_t>(n_u), disk,
                                                 derive_seed(ts, 31));
            users = assign_marks(users, derive_seed(ts, 32));
            const PointSet rrhs = sample_uniform_disk(static_cast<std::size_t>(n_r), disk,
                                                      derive_seed(ts, 33));

            SeOptions opts;
            opts.pilot_energy = static_cast<double>(p) * std::pow(10.0, cfg.rho_p_db / 10.0);
            opts.sinr_cap = cfg.sinr_cap();
            opts.pathloss = cfg.pathloss;

            const PilotAssignment rsa =
                assign_rsa(users, p, cfg.rinh, derive_seed(ts, 34));
            const double sum_rsa =
                se_metrics(rrhs.points, users.points, rsa, disk, opts).sum_se;

            BnpInstance inst;
            std::vector<int> all(static_cast<std::size_t>(n_u));
            std::iota(all.begin(), all.end(), 0);
            inst.beta = copilot_gains(rrhs.points, users.points, all, cfg.pathloss);
            inst.num_pilots = p;
            inst.gamma_min = cfg.gamma_min_linear();
            inst.big_m = cfg.big_m;
            inst.pilot_energy = opts.pilot_energy;
            ClusterOptions copts;
            copts.kmeans.restarts = cfg.kmeans_restarts;
            inst.clusters =
                cluster_users(inst.beta.transpose(), p, derive_seed(ts, 35), std::nullopt, copts)
                    .user_membership;
            const BnpResult bnp = bnp_solve(inst, BnpOptions{cfg.bnp_budget_s, false});
            const double sum_bnp =
                se_metrics(rrhs.points, users.points, bnp.assignment, disk, opts).sum_se;

            outs[static_cast<std::size_t>(t)].ratio = sum_bnp > 0.0 ? sum_rsa / sum_bnp : 0.0;
            outs[static_cast<std::size_t>(t)].certified = bnp.status == BnpStatus::optimal ? 1 : 0;
        });
        std::sort(outs.begin(), outs.end(),
                  [](const TrialOut& a, const TrialOut& b) { return a.ratio < b.ratio; });
        for (std::size_t i = 0; i < outs.size(); ++i)
            rows.push_back({format_int(n_r), format_int(p), format_int(n_u),
                            format_double(outs[i].ratio),
                            format_double(static_cast<double>(i + 1) / outs.size()),
                            format_int(outs[i].certified)});
    }
    write_figure_csv(out_dir, "fig5-cdf", cfg, {"n_r", "pilots", "n_u", "ratio", "cdf", "certified"},
                     rows);
}

}  // namespace

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = {"fig3-left", "fig3-center", "fig3-right",
                                                   "fig4-ratios", "fig5-cdf"};
    return names;
}

void reproduce_figure(const std::string& name, const ExperimentConfig& config,
                      const std::string& out_dir, bool certified) {
    if (name == "fig3-left") return figure_fig3_left(config, out_dir);
    if (name == "fig3-center") return figure_fig3_center(config, out_dir);
    if (name == "fig3-right") return figure_fig3_right(config, out_dir);
    if (name == "fig4-ratios") return figure_fig4_ratios(config, out_dir);
    if (name == "fig5-cdf") return figure_fig5_cdf(config, out_dir, certified);
    std::string known;
    for (const auto& n : figure_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown figure '" + name + "'; valid names: " + known);
}

}  // namespace pilotgrid
