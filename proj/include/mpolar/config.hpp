#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpolar/operators.hpp"
#include "mpolar/stepper.hpp"
#include "mpolar/system.hpp"

namespace mpolar {

/// Which built-in run checks are enforced.  Parsed from a comma list of
/// {energy, zcheck, gronwall}, or the shorthands "all" and "none".
struct CheckFlags {
    bool energy = false;
    bool zcheck = false;
    bool gronwall = false;

    static CheckFlags parse(const std::string& text);
    bool any() const { return energy || zcheck || gronwall; }
};

/// Flat key = value run configuration ('#' starts a comment).  Unknown keys,
/// duplicates, missing required keys and out-of-range values are all rejected
/// by validate() before any simulation state is allocated.  The MPOLAR_SEED
/// environment variable, when set, overrides the seed key.
struct RunConfig {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    double gamma = 0.0;
    double kappa = -1.0;
    Variant variant = Variant::standard;

    ICKind ic = ICKind::random_smooth;
    std::uint64_t seed = 1;
    double amplitude = 1.0;

    AdvectionScheme advection = AdvectionScheme::conservative;
    double dt = 0.0;  // fixed step when > 0, adaptive otherwise
    double cfl = 0.4;
    double dt_max = 0.05;
    double t_end = -1.0;
    std::int64_t max_steps = 10'000'000;

    int record_every = 1;
    double lp_p = std::numeric_limits<double>::infinity();

    std::string csv;         // output paths; empty disables the file
    std::string checkpoint;
    std::string resume;      // checkpoint to restart from

    CheckFlags checks;
    double z_residual_tol = std::numeric_limits<double>::infinity();

    std::vector<double> gamma_list;  // sweep subcommand only
    std::vector<double> kappa_list;

    static RunConfig from_string(const std::string& text);
    static RunConfig from_file(const std::string& path);

    PhysParams<double> phys_params() const { return {gamma, kappa, variant}; }
    TimeControls<double> time_controls() const { return {dt, cfl, dt_max, t_end, max_steps}; }

    /// sweep_mode requires the gamma/kappa lists (and ignores the scalar
    /// gamma/kappa keys); run mode rejects the list keys.
    void validate(bool sweep_mode = false) const;

    /// Subset check for subcommands that only need the grid keys.
    void validate_grid_only() const;
};

}  // namespace mpolar
