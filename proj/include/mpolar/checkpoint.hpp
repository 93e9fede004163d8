#pragma once

#include <string>

#include "mpolar/system.hpp"

namespace mpolar {

/// Raw contents of a checkpoint file, sufficient to resume a run bit-exactly:
/// grid metadata, physical parameters, time, and the omega and w node values.
/// The streamfunction and velocity are not stored; they are deterministic
/// functions of omega.
struct CheckpointData {
    Grid<double> grid;
    PhysParams<double> params;
    double t = 0.0;
    Eigen::ArrayXd omega;
    Eigen::ArrayXd w;
};

/// Binary format: magic "MPOLAR1", u32 version (= 1), u32 nx, u32 ny,
/// f64 lx, ly, t, gamma, kappa, u32 variant tag (0 standard, 1 damped),
/// then the omega payload and the w payload, each nx*ny f64 values in
/// row-major node order.  All integers and floats are little-endian.
void save_checkpoint(const std::string& path, const State<double>& state,
                     const PhysParams<double>& params);

CheckpointData load_checkpoint(const std::string& path);

/// Rebuild a full State from checkpoint data (solves for the streamfunction).
State<double> state_from_checkpoint(const PoissonSolver<double>& solver,
                                    const CheckpointData& data);

}  // namespace mpolar
