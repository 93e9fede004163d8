// Command line front end.  Subcommands:
//   run     march one configuration, stream diagnostics to CSV
//   mms     manufactured-solution convergence study
//   sweep   (gamma, kappa) grid of damped decay runs
//   eig     smallest Dirichlet eigenvalue of the discrete Laplacian
//   zcheck  standard-variant transport residual and envelope report
//   decay   fit decay rates on an existing diagnostics CSV
// Exit codes: 0 success, 1 validation error, 2 numerical blow-up,
// 3 failed check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpolar/checkpoint.hpp"
#include "mpolar/config.hpp"
#include "mpolar/csv.hpp"
#include "mpolar/errors.hpp"
#include "mpolar/mms.hpp"
#include "mpolar/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBlowup = 2;
constexpr int kExitFailedCheck = 3;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Output paths from the config are taken relative to --out when given; the
// directory is created on demand.  Input paths (resume, decay CSV) are not
// redirected.
void apply_out_dir(mpolar::RunConfig& config, const std::string& out_dir) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    const auto prefix = [&out_dir](std::string& path) {
        if (!path.empty()) path = (std::filesystem::path(out_dir) / path).string();
    };
    prefix(config.csv);
    prefix(config.checkpoint);
}

mpolar::RunConfig load_config(const std::string& path, const std::string& check_override,
                              const std::string& out_dir) {
    mpolar::RunConfig config = mpolar::RunConfig::from_file(path);
    if (!check_override.empty()) config.checks = mpolar::CheckFlags::parse(check_override);
    apply_out_dir(config, out_dir);
    return config;
}

void print_check(const char* name, const mpolar::CheckOutcome& outcome) {
    std::printf("check:%s enabled=%d pass=%d worst=%s\n", name, outcome.enabled ? 1 : 0,
                outcome.passed ? 1 : 0, fmt17(outcome.worst).c_str());
}

int do_run(const mpolar::RunConfig& config) {
    const mpolar::RunResult result = mpolar::run_simulation(config);
    const auto& last = result.records.back();
    std::printf("run: steps=%lld records=%zu t=%s\n",
                static_cast<long long>(result.steps), result.records.size(),
                fmt17(last.t).c_str());
    std::printf("final: l2_u=%s l2_w=%s linf_omega=%s energy=%s\n", fmt17(last.l2_u).c_str(),
                fmt17(last.l2_w).c_str(), fmt17(last.linf_omega).c_str(),
                fmt17(last.energy).c_str());
    print_check("energy", result.energy_check);
    print_check("zcheck", result.zcheck_check);
    print_check("gronwall", result.gronwall_check);
    return result.checks_passed() ? kExitOk : kExitFailedCheck;
}

int do_mms(const std::string& config_path, double min_order) {
    // Only the keys the study uses are read from the config: gamma, kappa,
    // variant, advection, and t_end (study horizon, 0.5 when unset).
    const mpolar::RunConfig config = mpolar::RunConfig::from_file(config_path);
    const mpolar::PhysParams<double> params = config.phys_params();
    params.validate();
    const double t_final = config.t_end > 0 ? config.t_end : 0.5;

    const auto ms = mpolar::ManufacturedSolution<double>::default_trig();
    const double drv = mpolar::check_ms_derivatives(ms);
    const double cons = mpolar::check_ms_consistency(ms, params);
    std::printf("mms: derivative_check=%s consistency_check=%s\n", fmt17(drv).c_str(),
                fmt17(cons).c_str());

    const auto study = mpolar::convergence_study(ms, params, config.advection, {32, 64, 128},
                                                 t_final);
    std::printf("n,h,dt,err_omega,err_w\n");
    for (const auto& level : study.levels)
        std::printf("%d,%s,%s,%s,%s\n", level.n, fmt17(level.h).c_str(), fmt17(level.dt).c_str(),
                    fmt17(level.err_omega).c_str(), fmt17(level.err_w).c_str());
    double worst_order = std::numeric_limits<double>::infinity();
    std::printf("order_omega:");
    for (double p : study.order_omega) {
        std::printf(" %s", fmt17(p).c_str());
        worst_order = std::min(worst_order, p);
    }
    std::printf("\norder_w:");
    for (double p : study.order_w) {
        std::printf(" %s", fmt17(p).c_str());
        worst_order = std::min(worst_order, p);
    }
    std::printf("\n");
    if (!std::isnan(min_order) && !(worst_order >= min_order)) {
        std::fprintf(stderr, "mms: observed order %s below required %s\n",
                     fmt17(worst_order).c_str(), fmt17(min_order).c_str());
        return kExitFailedCheck;
    }
    return kExitOk;
}

int do_sweep(const mpolar::RunConfig& config, int threads) {
    const mpolar::SweepResult result = mpolar::run_sweep(config, threads);
    const std::string table = mpolar::sweep_table_csv(result);
    std::printf("lambda1=%s\n", fmt17(result.lambda1).c_str());
    std::fputs(table.c_str(), stdout);
    if (!config.csv.empty()) {
        std::ofstream out(config.csv, std::ios::binary | std::ios::trunc);
        if (!out) throw mpolar::ConfigError("sweep: cannot open output file " + config.csv);
        out << table;
    }
    return result.all_passed ? kExitOk : kExitFailedCheck;
}

int do_eig(const mpolar::RunConfig& config) {
    config.validate_grid_only();
    const mpolar::Grid<double> grid(config.nx, config.ny, config.lx, config.ly);
    const mpolar::PoissonSolver<double> solver(grid);
    const auto pair = mpolar::smallest_dirichlet_eigenvalue(solver);
    std::printf("lambda1=%s\n", fmt17(pair.lambda).c_str());
    std::printf("C_P=%s\n", fmt17(1.0 / std::sqrt(pair.lambda)).c_str());
    std::printf("iterations=%d\n", pair.iterations);
    return kExitOk;
}

int do_zcheck(mpolar::RunConfig config) {
    if (config.variant != mpolar::Variant::standard)
        throw mpolar::ConfigError("zcheck: requires variant = standard");
    config.checks.zcheck = true;
    config.checks.gronwall = true;
    const mpolar::RunResult result = mpolar::run_simulation(config);

    double max_residual = 0.0, margin = 0.0;
    for (const auto& rec : result.records) {
        max_residual = std::max(max_residual, rec.z_residual_l2);
        if (rec.gronwall_envelope > 0)
            margin = std::max(margin, rec.lp_Z / rec.gronwall_envelope);
    }
    std::printf("zcheck: max_z_residual_l2=%s envelope_margin=%s\n", fmt17(max_residual).c_str(),
                fmt17(margin).c_str());
    print_check("zcheck", result.zcheck_check);
    print_check("gronwall", result.gronwall_check);
    return result.checks_passed() ? kExitOk : kExitFailedCheck;
}

int do_decay(const std::string& csv_path, const std::string& config_path,
             const std::string& series_name, double t_begin, double t_end) {
    const auto records = mpolar::read_csv(csv_path);
    mpolar::EnergySeries series = mpolar::EnergySeries::l2;
    if (series_name == "h1")
        series = mpolar::EnergySeries::h1;
    else if (series_name != "l2")
        throw mpolar::UsageError("decay: series must be l2 or h1");

    auto fit = mpolar::fit_decay_rate(records, series, t_begin, t_end);
    std::printf("decay: series=%s n=%d window=[%s,%s]\n", series_name.c_str(), fit.n_points,
                fmt17(fit.t_begin).c_str(), fmt17(fit.t_end).c_str());
    std::printf("fitted_rate=%s r_squared=%s\n", fmt17(fit.fitted_rate).c_str(),
                fmt17(fit.r_squared).c_str());
    if (config_path.empty()) return kExitOk;

    // With a config, compare the fitted rate against the damped-variant
    // prediction on that grid.
    const mpolar::RunConfig config = mpolar::RunConfig::from_file(config_path);
    config.validate_grid_only();
    const mpolar::PhysParams<double> params = config.phys_params();
    params.validate();
    const mpolar::Grid<double> grid(config.nx, config.ny, config.lx, config.ly);
    const mpolar::PoissonSolver<double> solver(grid);
    fit.poincare_sq = 1.0 / solver.lambda_min();
    fit.predicted_c0 = mpolar::predicted_c0(params, fit.poincare_sq);
    const double ratio = fit.fitted_rate / fit.predicted_c0;
    std::printf("predicted_c0=%s ratio=%s\n", fmt17(fit.predicted_c0).c_str(),
                fmt17(ratio).c_str());
    if (!(ratio >= mpolar::kRateFraction)) {
        std::fprintf(stderr, "decay: fitted rate below %s of the predicted rate\n",
                     fmt17(mpolar::kRateFraction).c_str());
        return kExitFailedCheck;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D incompressible micropolar flow on a rectangle: simulator and "
                 "verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, check_override, csv_path;
    std::string series_name = "l2";
    int threads = 1;
    double min_order = std::numeric_limits<double>::quiet_NaN();
    double t_begin = std::numeric_limits<double>::quiet_NaN();
    double t_end = std::numeric_limits<double>::quiet_NaN();

    CLI::App* cmd_run = app.add_subcommand("run", "march one configured simulation");
    cmd_run->add_option("--config", config_path, "run configuration file")->required();
    cmd_run->add_option("--out", out_dir, "directory for output files");
    cmd_run->add_option("--check", check_override,
                        "override configured checks: comma list of energy,zcheck,gronwall, "
                        "or all / none");

    CLI::App* cmd_mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    cmd_mms->add_option("--config", config_path, "parameter source (gamma, kappa, variant)")
        ->required();
    cmd_mms->add_option("--min-order", min_order, "fail (exit 3) below this observed order");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "damped decay-rate parameter sweep");
    cmd_sweep->add_option("--config", config_path, "sweep configuration file")->required();
    cmd_sweep->add_option("--out", out_dir, "directory for output files");
    cmd_sweep->add_option("--threads", threads, "concurrent sweep cells")
        ->check(CLI::PositiveNumber);

    CLI::App* cmd_eig = app.add_subcommand("eig", "smallest Dirichlet Laplacian eigenvalue");
    cmd_eig->add_option("--config", config_path, "grid source (nx, ny, lx, ly)")->required();

    CLI::App* cmd_zcheck =
        app.add_subcommand("zcheck", "combined-quantity transport and envelope report");
    cmd_zcheck->add_option("--config", config_path, "run configuration file")->required();
    cmd_zcheck->add_option("--out", out_dir, "directory for output files");
    cmd_zcheck->add_option("--check", check_override, "additional checks to enforce");

    CLI::App* cmd_decay = app.add_subcommand("decay", "fit decay rates on an existing CSV");
    cmd_decay->add_option("--csv", csv_path, "diagnostics CSV to fit")->required();
    cmd_decay->add_option("--config", config_path,
                          "optional config enabling the predicted-rate comparison");
    cmd_decay->add_option("--series", series_name, "energy series: l2 or h1");
    cmd_decay->add_option("--t-begin", t_begin, "fit window start (default: last 60%)");
    cmd_decay->add_option("--t-end", t_end, "fit window end (default: final time)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cmd_run->parsed())
            return do_run(load_config(config_path, check_override, out_dir));
        if (cmd_mms->parsed()) return do_mms(config_path, min_order);
        if (cmd_sweep->parsed()) {
            mpolar::RunConfig config = mpolar::RunConfig::from_file(config_path);
            apply_out_dir(config, out_dir);
            return do_sweep(config, threads);
        }
        if (cmd_eig->parsed()) return do_eig(mpolar::RunConfig::from_file(config_path));
        if (cmd_zcheck->parsed())
            return do_zcheck(load_config(config_path, check_override, out_dir));
        if (cmd_decay->parsed())
            return do_decay(csv_path, config_path, series_name, t_begin, t_end);
    } catch (const mpolar::BlowupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBlowup;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
