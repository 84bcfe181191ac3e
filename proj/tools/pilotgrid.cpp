#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "pilotgrid/assignment.hpp"
#include "pilotgrid/bnp.hpp"
#include "pilotgrid/channel.hpp"
#include "pilotgrid/csv.hpp"
#include "pilotgrid/experiment.hpp"
#include "pilotgrid/geometry.hpp"
#include "pilotgrid/maxmin.hpp"
#include "pilotgrid/random.hpp"
#include "pilotgrid/rsa_theory.hpp"
#include "pilotgrid/spectral.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

std::string assignment_csv(const pilotgrid::PointSet& users,
                           const pilotgrid::PilotAssignment& assignment,
                           const std::string& scheme, std::uint64_t seed,
                           const std::vector<std::string>& extra_comments = {}) {
    using pilotgrid::format_double;
    using pilotgrid::format_int;
    pilotgrid::CsvWriter w;
    w.comment(pilotgrid::version_string());
    w.comment("scheme = " + scheme);
    w.comment("pilots = " + format_int(assignment.num_pilots));
    w.comment("rinh = " + format_double(assignment.r_inh));
    w.comment("seed = " + format_int(static_cast<long long>(seed)));
    w.comment("pilot 0 means unassigned");
    w.header({"user_index", "x", "y", "pilot"});
    for (std::size_t i = 0; i < users.size(); ++i)
        w.row({format_int(static_cast<long long>(i)), format_double(users.points[i].x()),
               format_double(users.points[i].y()), format_int(assignment.pilot[i])});
    return w.content();
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
    } else {
        pilotgrid::write_text_file(out_path, content);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pilotgrid;

    CLI::App app{"pilot assignment simulator and optimization toolkit"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    std::string sim_config_path;
    std::vector<std::string> sim_overrides;
    std::string sim_out;
    bool sim_json = false;
    simulate->add_option("--config", sim_config_path, "config file (key = value lines)");
    simulate->add_option("--override", sim_overrides, "key=value override (repeatable)");
    simulate->add_option("--out", sim_out, "output CSV path (stdout when omitted)");
    simulate->add_flag("--json", sim_json, "also write a JSON mirror next to the CSV");

    // --- figure -----------------------------------------------------------
    auto* figure = app.add_subcommand("figure", "emit the dataset behind a named figure");
    std::string fig_name;
    std::string fig_out_dir = ".";
    std::string fig_config_path;
    std::vector<std::string> fig_overrides;
    bool fig_certified = false;
    figure->add_option("name", fig_name, "figure name")->required();
    figure->add_option("--out", fig_out_dir, "output directory");
    figure->add_option("--config", fig_config_path, "config file");
    figure->add_option("--override", fig_overrides, "key=value override (repeatable)");
    figure->add_flag("--certified", fig_certified,
                     "reduced instances with certified-optimal partitioning");

    // --- theory -----------------------------------------------------------
    auto* theory = app.add_subcommand("theory", "analytic density and probability tables");
    theory->require_subcommand(1);

    auto* density = theory->add_subcommand("density", "retained-density curve rho(t)");
    double th_lambda_u = 1e-3, th_rinh = 200.0, th_tmax = 1.0, th_step = 0.01;
    std::string th_out;
    bool th_alt_rate = false, th_alt_blocking = false;
    density->add_option("--lambda-u", th_lambda_u, "user density per m^2");
    density->add_option("--rinh", th_rinh, "inhibition distance, meters");
    density->add_option("--t-max", th_tmax, "end time");
    density->add_option("--step", th_step, "tabulation step");
    density->add_option("--out", th_out, "output CSV path");
    density->add_flag("--alt-rate-normalization", th_alt_rate,
                      "integrate d rho/dt = (lambda/kappa) Phi for comparison");
    density->add_flag("--alt-blocking", th_alt_blocking,
                      "use the (1 - x^3) blocking factor for comparison");

    auto* prob = theory->add_subcommand("prob", "pilot assignment probability vs P");
    double pr_lambda_u = 1e-3, pr_rinh = 200.0, pr_rs = 600.0, pr_window = 1500.0;
    int pr_pmax = 16, pr_trials = 0;
    std::uint64_t pr_seed = 1;
    std::string pr_out;
    prob->add_option("--lambda-u", pr_lambda_u, "user density per m^2");
    prob->add_option("--rinh", pr_rinh, "inhibition distance, meters");
    prob->add_option("--rs", pr_rs, "observation radius for the theory, meters");
    prob->add_option("--p-max", pr_pmax, "evaluate P = 1..p-max");
    prob->add_option("--trials", pr_trials, "Monte Carlo trials per P (0 = theory only)");
    prob->add_option("--window-radius", pr_window, "simulation window radius");
    prob->add_option("--seed", pr_seed, "simulation seed");
    prob->add_option("--out", pr_out, "output CSV path");

    // --- sample -----------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "sample a Poisson point set to CSV/JSON");
    double sm_lambda = 1e-4, sm_radius = 1500.0;
    std::uint64_t sm_seed = 1;
    bool sm_marks = false, sm_json = false;
    std::string sm_out;
    sample->add_option("--lambda", sm_lambda, "intensity per m^2");
    sample->add_option("--radius", sm_radius, "window radius, meters");
    sample->add_option("--seed", sm_seed, "seed");
    sample->add_flag("--marks", sm_marks, "attach U(0,1) marks");
    sample->add_flag("--json", sm_json, "emit JSON instead of CSV");
    sample->add_option("--out", sm_out, "output path (stdout when omitted)");

    // --- assign -----------------------------------------------------------
    auto* assign = app.add_subcommand("assign", "run one assignment scheme on CSV inputs");
    assign->require_subcommand(1);

    auto* a_rsa = assign->add_subcommand("rsa", "inhibition-based randomized assignment");
    std::string rsa_users, rsa_out;
    int rsa_pilots = 16;
    double rsa_rinh = 200.0;
    std::uint64_t rsa_seed = 1;
    a_rsa->add_option("--users", rsa_users, "user CSV (x_m,y_m[,mark])")->required();
    a_rsa->add_option("--pilots", rsa_pilots, "pilot count P");
    a_rsa->add_option("--rinh", rsa_rinh, "inhibition distance, meters");
    a_rsa->add_option("--seed", rsa_seed, "seed (marks are drawn when absent)");
    a_rsa->add_option("--out", rsa_out, "output CSV path");

    auto* a_maxmin = assign->add_subcommand("maxmin", "max-min distance partitioning");
    std::string mm_users, mm_out;
    int mm_pilots = 4, mm_floor = 2;
    double mm_eps = 1.0, mm_budget = 10.0;
    a_maxmin->add_option("--users", mm_users, "user CSV (x_m,y_m)")->required();
    a_maxmin->add_option("--pilots", mm_pilots, "partition count P");
    a_maxmin->add_option("--epsilon", mm_eps, "bisection tolerance, meters");
    a_maxmin->add_option("--size-floor", mm_floor, "minimum users per partition");
    a_maxmin->add_option("--budget", mm_budget, "seconds per feasibility call");
    a_maxmin->add_option("--out", mm_out, "output CSV path");

    auto* a_bnp = assign->add_subcommand("bnp", "branch-and-price sum-SE assignment");
    std::string bnp_users, bnp_rrhs, bnp_clusters, bnp_out;
    int bnp_pilots = 3;
    double bnp_gamma_min_db = 0.0, bnp_big_m = 1e6, bnp_budget = 600.0, bnp_rho_p_db = 80.0;
    std::uint64_t bnp_seed = 1;
    a_bnp->add_option("--users", bnp_users, "user CSV (x_m,y_m)")->required();
    a_bnp->add_option("--rrhs", bnp_rrhs, "RRH CSV (x_m,y_m)")->required();
    a_bnp->add_option("--clusters", bnp_clusters,
                      "cluster CSV (user_index,cluster); spectral clustering when omitted");
    a_bnp->add_option("--pilots", bnp_pilots, "pilot count P");
    a_bnp->add_option("--gamma-min-db", bnp_gamma_min_db,
                      "SINR floor in dB (<= -900 disables)");
    a_bnp->add_option("--big-m", bnp_big_m, "penalty magnitude");
    a_bnp->add_option("--budget", bnp_budget, "time budget, seconds");
    a_bnp->add_option("--rho-p-db", bnp_rho_p_db, "uplink pilot SNR, dB");
    a_bnp->add_option("--seed", bnp_seed, "clustering seed");
    a_bnp->add_option("--out", bnp_out, "output CSV path");

    try {
        app.parse(argc, argv);

        if (*simulate) {
            ExperimentConfig cfg;
            if (!sim_config_path.empty()) cfg = ExperimentConfig::from_file(sim_config_path);
            for (const auto& o : sim_overrides) cfg.apply_override(o);
            const Dataset ds = run_experiment(cfg);
            emit(ds.to_csv(), sim_out);
            if (sim_json) {
                const std::string json_path =
                    sim_out.empty() ? "dataset.json" : sim_out + ".json";
                write_text_file(json_path, ds.to_json());
            }
            return kExitOk;
        }

        if (*figure) {
            ExperimentConfig cfg;
            bool have_cfg = false;
            if (!fig_config_path.empty()) {
                cfg = ExperimentConfig::from_file(fig_config_path);
                have_cfg = true;
            }
            if (!have_cfg) {
                // per-figure defaults
                if (fig_name == "fig3-left" || fig_name == "fig3-center") {
                    cfg.lambda_u = 1e-3;
                    cfg.rinh = 200.0;
                    cfg.trials = fig_name == "fig3-left" ? 200 : 2000;
                } else if (fig_name == "fig3-right") {
                    cfg.lambda_u = 1e-5;
                    cfg.lambda_r = 1e-4;
                    cfg.pilots = 16;
                    cfg.trials = 500;
                } else if (fig_name == "fig4-ratios") {
                    cfg.lambda_u = 1e-5;
                    cfg.pilots = 16;
                    cfg.trials = 100;
                } else if (fig_name == "fig5-cdf") {
                    cfg.window_radius = 400.0;
                    cfg.measure_radius = 400.0;
                    cfg.rinh = 100.0;
                    cfg.pilots = 10;
                    cfg.trials = 50;
                    cfg.gamma_min_db = -1000.0;
                    cfg.bnp_budget_s = 10.0;
                }
            }
            for (const auto& o : fig_overrides) cfg.apply_override(o);
            reproduce_figure(fig_name, cfg, fig_out_dir, fig_certified);
            return kExitOk;
        }

        if (*density) {
            RsaKineticsOptions opts;
            opts.rate_over_kappa = th_alt_rate;
            opts.blocking_one_minus_x_cubed = th_alt_blocking;
            const DensityModel m = density_curve(th_lambda_u, th_rinh, th_tmax, th_step, opts);
            CsvWriter w;
            w.comment(version_string());
            w.comment("lambda_u = " + format_double(th_lambda_u));
            w.comment("rinh = " + format_double(th_rinh));
            w.comment("kappa = " + format_double(m.kappa));
            w.comment("theta_inf = " + format_double(m.theta_inf));
            w.comment("fit_b1 = " + format_double(m.fit.b1) + ", fit_b2 = " +
                      format_double(m.fit.b2) + ", fit_b3 = " + format_double(m.fit.b3));
            w.header({"t", "rho"});
            for (std::size_t i = 0; i < m.t.size(); ++i)
                w.row({format_double(m.t[i]), format_double(m.rho[i])});
            emit(w.content(), th_out);
            return kExitOk;
        }

        if (*prob) {
            CsvWriter w;
            w.comment(version_string());
            w.comment("lambda_u = " + format_double(pr_lambda_u));
            w.comment("rinh = " + format_double(pr_rinh));
            w.comment("rs = " + format_double(pr_rs));
            w.comment("seed = " + format_int(static_cast<long long>(pr_seed)));
            w.header({"pilots", "prob_theory", "prob_sim"});
            const CircularWindow gen{Point2::Zero(), pr_window};
            for (int p = 1; p <= pr_pmax; ++p) {
                AssignmentProbabilityInputs in{pr_lambda_u, pr_rinh, p, pr_rs};
                const double theory = assignment_probability(in);
                double sim = std::numeric_limits<double>::quiet_NaN();
                if (pr_trials > 0)
                    sim = typical_assignment_mc(pr_lambda_u, p, pr_rinh, gen, pr_trials,
                                                derive_seed(pr_seed, 600 + p));
                w.row({format_int(p), format_double(theory), format_double(sim)});
            }
            emit(w.content(), pr_out);
            return kExitOk;
        }

        if (*sample) {
            const CircularWindow win{Point2::Zero(), sm_radius};
            PointSet ps = sample_ppp(sm_lambda, win, sm_seed);
            if (sm_marks) ps = assign_marks(ps, sm_seed);
            emit(sm_json ? point_set_to_json(ps) : point_set_to_csv(ps), sm_out);
            return kExitOk;
        }

        if (*a_rsa) {
            PointSet users = point_set_from_csv(rsa_users);
            if (!users.has_marks()) users = assign_marks(users, rsa_seed);
            const PilotAssignment out = assign_rsa(users, rsa_pilots, rsa_rinh, rsa_seed);
            emit(assignment_csv(users, out, "rsa", rsa_seed), rsa_out);
            return kExitOk;
        }

        if (*a_maxmin) {
            const PointSet users = point_set_from_csv(mm_users);
            PartitionInstance inst;
            inst.users = users.points;
            inst.num_partitions = mm_pilots;
            inst.size_floor = mm_floor;
            inst.epsilon = mm_eps;
            inst.feasibility_budget_s = mm_budget;
            const PartitionResult res = maxmin_assign(inst);
            if (res.status == PartitionStatus::infeasible) {
                std::fprintf(stderr, "infeasible: need at least P*size_floor users\n");
                return kExitInfeasible;
            }
            PilotAssignment assignment;
            assignment.num_pilots = mm_pilots;
            assignment.pilot.resize(users.size());
            for (std::size_t i = 0; i < users.size(); ++i)
                assignment.pilot[i] = res.membership[i] + 1;
            std::string csv = assignment_csv(users, assignment, "maxmin", 0,
                                             {});
            csv.insert(0, "# t_star = " + format_double(res.t_star) + "\n# status = " +
                              (res.status == PartitionStatus::approximate
                                   ? "approximate"
                                   : "optimal-within-epsilon") +
                              "\n");
            emit(csv, mm_out);
            std::fprintf(stderr, "t_star = %s\n", format_double(res.t_star).c_str());
            return res.status == PartitionStatus::approximate ? kExitBudget : kExitOk;
        }

        if (*a_bnp) {
            const PointSet users = point_set_from_csv(bnp_users);
            const PointSet rrhs = point_set_from_csv(bnp_rrhs);
            const int n = static_cast<int>(users.size());
            BnpInstance inst;
            std::vector<int> all(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
            inst.beta = copilot_gains(rrhs.points, users.points, all);
            inst.num_pilots = bnp_pilots;
            inst.gamma_min =
                bnp_gamma_min_db <= -900.0 ? 0.0 : std::pow(10.0, bnp_gamma_min_db / 10.0);
            inst.big_m = bnp_big_m;
            inst.pilot_energy = bnp_pilots * std::pow(10.0, bnp_rho_p_db / 10.0);
            if (!bnp_clusters.empty()) {
                inst.clusters.assign(static_cast<std::size_t>(n), 0);
                for (const auto& row : read_numeric_csv(bnp_clusters)) {
                    if (row.size() < 2) throw ConfigError("cluster rows need user_index,cluster");
                    inst.clusters.at(static_cast<std::size_t>(row[0])) =
                        static_cast<int>(row[1]);
                }
            } else {
                inst.clusters = cluster_users(inst.beta.transpose(), bnp_pilots, bnp_seed)
                                    .user_membership;
            }
            const BnpResult res = bnp_solve(inst, BnpOptions{bnp_budget, false});
            if (res.status == BnpStatus::infeasible) {
                std::fprintf(stderr, "infeasible: need at least 2P users\n");
                return kExitInfeasible;
            }
            std::string csv = assignment_csv(users, res.assignment, "bnp", bnp_seed);
            csv.insert(0, "# objective = " + format_double(res.objective) + "\n# certified = " +
                              (res.status == BnpStatus::optimal ? "true" : "false") +
                              "\n# nodes = " + format_int(static_cast<long long>(
                                                   res.stats.nodes_processed)) +
                              "\n# columns = " + format_int(static_cast<long long>(
                                                     res.stats.columns_generated)) +
                              "\n# pricing_calls = " + format_int(static_cast<long long>(
                                                          res.stats.pricing_calls)) +
                              "\n");
            emit(csv, bnp_out);
            return res.status == BnpStatus::budget_exceeded ? kExitBudget : kExitOk;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
