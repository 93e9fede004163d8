#include "mpolar/runner.hpp"

#include <cstdio>
#include <thread>

namespace mpolar {

namespace {

// Residuals need three consecutive states at equal spacing; adaptive runs can
// produce unequal steps, in which case the columns stay zero.  The tolerance
// absorbs the roundoff drift of accumulating t over many steps.
bool uniform_triple(double t0, double t1, double t2) {
    const double d1 = t1 - t0, d2 = t2 - t1;
    return d1 > 0 && d2 > 0 && std::abs(d2 - d1) <= 1e-9 * d1;
}

}  // namespace

RunResult run_simulation(const RunConfig& config) {
    config.validate(false);

    const Grid<double> grid(config.nx, config.ny, config.lx, config.ly);
    const PhysParams<double> params = config.phys_params();
    params.validate();
    TimeControls<double> controls = config.time_controls();
    controls.validate();

    const PoissonSolver<double> solver(grid);
    Stepper<double> stepper(solver, params, config.advection);

    State<double> s;
    if (!config.resume.empty()) {
        const CheckpointData data = load_checkpoint(config.resume);
        if (data.grid != grid)
            throw ConfigError("resume: checkpoint grid does not match the config");
        if (data.params.gamma != params.gamma || data.params.kappa != params.kappa ||
            data.params.variant != params.variant)
            throw ConfigError("resume: checkpoint parameters do not match the config");
        s = state_from_checkpoint(solver, data);
    } else {
        s = initial_condition(config.ic, solver, config.amplitude, config.seed);
    }

    RunResult result;
    result.params = params;

    // rolling window of the last three states for the residual columns
    State<double> prev2, prev1;
    int have = 0;
    std::int64_t pending = -1;  // index into records awaiting residuals

    auto push_record = [&](const State<double>& state, std::int64_t step) {
        DiagnosticsRecord<double> r = compute_record(state, params, config.lp_p);
        r.step = step;
        result.records.push_back(r);
        result.energy_scales.push_back(0.0);
        pending = std::int64_t(result.records.size()) - 1;
    };

    auto fill_pending = [&](const State<double>& next) {
        // prev1 is the recorded state, prev2/next its neighbors
        if (pending < 0 || have < 2) return;
        auto& rec = result.records[std::size_t(pending)];
        if (rec.t != prev1.t) return;  // pending record is older than the window
        if (!uniform_triple(prev2.t, prev1.t, next.t)) {
            pending = -1;
            return;
        }
        const EnergyBalance<double> bal = energy_residual(prev2, prev1, next, params);
        rec.energy_residual = bal.residual;
        result.energy_scales[std::size_t(pending)] = bal.scale;
        if (params.variant == Variant::standard)
            rec.z_residual_l2 = z_residual_l2(prev2, prev1, next, params, config.advection);
        pending = -1;
    };

    push_record(s, 0);
    pending = -1;  // the step-0 record has no left neighbor

    const double t_tol = 1e-12 * std::max(1.0, controls.t_end);
    std::int64_t step = 0;
    while (controls.t_end - s.t > t_tol && step < controls.max_steps) {
        double dt;
        if (controls.dt > 0)
            dt = std::min(controls.dt, controls.t_end - s.t);
        else
            dt = stepper.stable_dt(s, controls);
        State<double> next = stepper.step(s, dt);
        ++step;

        prev2 = std::move(prev1);
        prev1 = std::move(s);
        have = std::min(have + 1, 2);
        s = std::move(next);

        // prev1 is now the state a pending record was taken from; its
        // neighbors prev2 and s complete the residual stencil
        fill_pending(s);

        if (step % config.record_every == 0) push_record(s, step);
    }
    result.steps = step;

    // envelope column and the enabled checks
    result.energy_check.enabled = config.checks.energy;
    result.zcheck_check.enabled = config.checks.zcheck;
    result.gronwall_check.enabled = config.checks.gronwall;

    if (params.variant == Variant::standard && result.records.size() >= 2) {
        bool uniform = true;
        const double d0 = result.records[1].t - result.records[0].t;
        for (std::size_t k = 1; k < result.records.size() && uniform; ++k) {
            const double d = result.records[k].t - result.records[k - 1].t;
            uniform = d > 0 && std::abs(d - d0) <= 1e-9 * d0;
        }
        if (uniform) {
            const auto env = gronwall_z_envelope(result.records, params);
            for (std::size_t k = 0; k < env.size(); ++k)
                result.records[k].gronwall_envelope = env[k];
        } else if (config.checks.gronwall) {
            throw UsageError(
                "gronwall check needs uniformly spaced records; use a fixed dt and a "
                "record_every that divides the step count");
        }
    } else if (config.checks.gronwall || config.checks.zcheck) {
        if (params.variant != Variant::standard)
            throw UsageError("zcheck/gronwall checks apply to the standard variant only");
    }

    if (config.checks.energy) {
        double worst = 0.0;
        for (std::size_t k = 0; k < result.records.size(); ++k) {
            const double scale = result.energy_scales[k];
            if (scale > 0)
                worst = std::max(worst, result.records[k].energy_residual / scale);
        }
        result.energy_check.worst = worst;
        result.energy_check.passed = worst <= kEnergyResidualRel;
    }
    if (config.checks.zcheck) {
        double worst = 0.0;
        for (const auto& r : result.records) worst = std::max(worst, r.z_residual_l2);
        result.zcheck_check.worst = worst;
        result.zcheck_check.passed = worst <= config.z_residual_tol;
    }
    if (config.checks.gronwall) {
        double worst = 0.0;
        bool ok = true;
        for (const auto& r : result.records) {
            if (r.gronwall_envelope > 0)
                worst = std::max(worst, r.lp_Z / r.gronwall_envelope);
            else if (r.lp_Z > 0)
                ok = false;
        }
        result.gronwall_check.worst = worst;
        result.gronwall_check.passed = ok && worst <= kGronwallFactor;
    }

    if (!config.csv.empty()) write_csv(config.csv, result.records);
    if (!config.checkpoint.empty()) save_checkpoint(config.checkpoint, s, params);
    result.final_state = std::move(s);
    return result;
}

SweepResult run_sweep(const RunConfig& config, int threads) {
    config.validate(true);

    // refuse out-of-regime cells before running anything
    for (const double g : config.gamma_list)
        for (const double k : config.kappa_list)
            if (!(g > 4 * k))
                throw RegimeError("sweep: cell gamma = " + std::to_string(g) +
                                  ", kappa = " + std::to_string(k) +
                                  " violates gamma > 4 kappa; C0 is undefined there");

    const Grid<double> grid(config.nx, config.ny, config.lx, config.ly);
    const PoissonSolver<double> solver(grid);
    const auto eig = smallest_dirichlet_eigenvalue(solver);
    const double poincare_sq = 1.0 / eig.lambda;

    SweepResult result;
    result.lambda1 = eig.lambda;
    const std::size_t ncells = config.gamma_list.size() * config.kappa_list.size();
    result.rows.resize(ncells);

    auto run_cell = [&](std::size_t cell) {
        const double g = config.gamma_list[cell / config.kappa_list.size()];
        const double k = config.kappa_list[cell % config.kappa_list.size()];
        RunConfig cell_cfg = config;
        cell_cfg.gamma_list.clear();
        cell_cfg.kappa_list.clear();
        cell_cfg.gamma = g;
        cell_cfg.kappa = k;
        cell_cfg.csv.clear();
        cell_cfg.checkpoint.clear();
        cell_cfg.checks = CheckFlags{};
        const RunResult run = run_simulation(cell_cfg);

        SweepRow row;
        row.gamma = g;
        row.kappa = k;
        row.gamma_minus_4kappa = g - 4 * k;
        row.predicted_c0 = predicted_c0(run.params, poincare_sq);
        row.fitted_rate = fit_decay_rate(run.records).fitted_rate;
        row.monotone = energy_monotone(run.records);
        row.passed = row.monotone && row.fitted_rate >= kRateFraction * row.predicted_c0;
        result.rows[cell] = row;
    };

    if (threads <= 1) {
        for (std::size_t cell = 0; cell < ncells; ++cell) run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(ncells);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t]() {
                for (std::size_t cell = std::size_t(t); cell < ncells; cell += std::size_t(threads)) {
                    try {
                        run_cell(cell);
                    } catch (...) {
                        errors[cell] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    result.all_passed = true;
    for (const auto& row : result.rows) result.all_passed = result.all_passed && row.passed;
    return result;
}

std::string sweep_table_csv(const SweepResult& result) {
    std::string out = "gamma,kappa,gamma_minus_4kappa,fitted_rate,predicted_c0,monotone_flag\n";
    char buf[160];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.gamma, r.kappa,
                      r.gamma_minus_4kappa, r.fitted_rate, r.predicted_c0, r.monotone ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace mpolar
