#include "mpolar/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace mpolar {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[7] = {'M', 'P', 'O', 'L', 'A', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), std::streamsize(n));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n, std::size_t offset,
                const char* what) {
    in.read(static_cast<char*>(data), std::streamsize(n));
    if (std::size_t(in.gcount()) != n)
        throw FormatError(std::string("checkpoint: truncated while reading ") + what, offset);
}

}  // namespace

void save_checkpoint(const std::string& path, const State<double>& state,
                     const PhysParams<double>& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("checkpoint: cannot open '" + path + "' for writing");
    const Grid<double>& g = state.grid();
    const std::uint32_t nx = std::uint32_t(g.nx), ny = std::uint32_t(g.ny);
    const std::uint32_t variant = params.variant == Variant::standard ? 0u : 1u;
    write_bytes(out, kMagic, sizeof(kMagic));
    write_bytes(out, &kVersion, 4);
    write_bytes(out, &nx, 4);
    write_bytes(out, &ny, 4);
    write_bytes(out, &g.lx, 8);
    write_bytes(out, &g.ly, 8);
    write_bytes(out, &state.t, 8);
    write_bytes(out, &params.gamma, 8);
    write_bytes(out, &params.kappa, 8);
    write_bytes(out, &variant, 4);
    write_bytes(out, state.omega.values.data(), sizeof(double) * std::size_t(g.size()));
    write_bytes(out, state.w.values.data(), sizeof(double) * std::size_t(g.size()));
    if (!out) throw UsageError("checkpoint: write to '" + path + "' failed");
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("checkpoint: cannot open '" + path + "'");

    char magic[7];
    read_bytes(in, magic, sizeof(magic), 0, "magic");
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("checkpoint: bad magic", 0);

    std::uint32_t version = 0, nx = 0, ny = 0, variant = 0;
    read_bytes(in, &version, 4, 7, "version");
    if (version != kVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version), 7);
    read_bytes(in, &nx, 4, 11, "nx");
    read_bytes(in, &ny, 4, 15, "ny");
    if (nx < 3 || ny < 3 || std::uint64_t(nx) * ny > (std::uint64_t(1) << 28))
        throw FormatError("checkpoint: implausible grid size", 11);

    double lx = 0, ly = 0, t = 0, gamma = 0, kappa = 0;
    read_bytes(in, &lx, 8, 19, "lx");
    read_bytes(in, &ly, 8, 27, "ly");
    read_bytes(in, &t, 8, 35, "t");
    read_bytes(in, &gamma, 8, 43, "gamma");
    read_bytes(in, &kappa, 8, 51, "kappa");
    read_bytes(in, &variant, 4, 59, "variant");
    if (variant > 1) throw FormatError("checkpoint: unknown variant tag", 59);
    if (!(lx > 0) || !(ly > 0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw FormatError("checkpoint: invalid domain extents", 19);
    if (!(gamma > 0) || !(kappa >= 0) || !std::isfinite(gamma) || !std::isfinite(kappa))
        throw FormatError("checkpoint: invalid parameters", 43);
    if (!std::isfinite(t)) throw FormatError("checkpoint: invalid time", 35);

    CheckpointData data;
    data.grid = Grid<double>(int(nx), int(ny), lx, ly);
    data.params = {gamma, kappa, variant == 0 ? Variant::standard : Variant::damped};
    data.t = t;
    const std::size_t count = std::size_t(nx) * ny;
    const std::size_t payload = 63;
    data.omega.resize(Eigen::Index(count));
    read_bytes(in, data.omega.data(), 8 * count, payload, "omega payload");
    data.w.resize(Eigen::Index(count));
    read_bytes(in, data.w.data(), 8 * count, payload + 8 * count, "w payload");
    if (!data.omega.allFinite() || !data.w.allFinite())
        throw FormatError("checkpoint: non-finite payload values", payload);
    return data;
}

State<double> state_from_checkpoint(const PoissonSolver<double>& solver,
                                    const CheckpointData& data) {
    require_same_grid(solver.grid(), data.grid, "state_from_checkpoint");
    ScalarField<double> omega(data.grid, data.omega);
    ScalarField<double> w(data.grid, data.w);
    return assemble_state(solver, std::move(omega), std::move(w), data.t);
}

}  // namespace mpolar
