#include "mpolar/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace mpolar {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    if (value == "inf" || value == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.find('-') != std::string::npos)
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has invalid unsigned value '" + value + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ','))
        if (!item.empty()) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

}  // namespace

CheckFlags CheckFlags::parse(const std::string& text) {
    CheckFlags flags;
    const std::string t = trim(text);
    if (t == "none" || t.empty()) return flags;
    if (t == "all") {
        flags.energy = flags.zcheck = flags.gronwall = true;
        return flags;
    }
    for (const auto& item : split(t, ',')) {
        if (item == "energy")
            flags.energy = true;
        else if (item == "zcheck")
            flags.zcheck = true;
        else if (item == "gronwall")
            flags.gronwall = true;
        else
            throw ConfigError("config: unknown check '" + item + "'");
    }
    return flags;
}

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
        if (seen[key]) throw ConfigError("config: duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "nx")
            cfg.nx = int(parse_int(key, value));
        else if (key == "ny")
            cfg.ny = int(parse_int(key, value));
        else if (key == "lx")
            cfg.lx = parse_double(key, value);
        else if (key == "ly")
            cfg.ly = parse_double(key, value);
        else if (key == "gamma")
            cfg.gamma = parse_double(key, value);
        else if (key == "kappa")
            cfg.kappa = parse_double(key, value);
        else if (key == "variant") {
            if (value == "standard")
                cfg.variant = Variant::standard;
            else if (value == "damped")
                cfg.variant = Variant::damped;
            else
                throw ConfigError("config: variant must be 'standard' or 'damped', got '" + value +
                                  "'");
        } else if (key == "ic") {
            if (value == "eigenmode")
                cfg.ic = ICKind::eigenmode;
            else if (value == "vortex_pair")
                cfg.ic = ICKind::vortex_pair;
            else if (value == "random_smooth")
                cfg.ic = ICKind::random_smooth;
            else
                throw ConfigError("config: unknown ic '" + value + "'");
        } else if (key == "seed")
            cfg.seed = parse_uint(key, value);
        else if (key == "amplitude")
            cfg.amplitude = parse_double(key, value);
        else if (key == "advection") {
            if (value == "central2")
                cfg.advection = AdvectionScheme::central2;
            else if (value == "upwind1")
                cfg.advection = AdvectionScheme::upwind1;
            else if (value == "conservative")
                cfg.advection = AdvectionScheme::conservative;
            else
                throw ConfigError("config: unknown advection scheme '" + value + "'");
        } else if (key == "dt")
            cfg.dt = parse_double(key, value);
        else if (key == "cfl")
            cfg.cfl = parse_double(key, value);
        else if (key == "dt_max")
            cfg.dt_max = parse_double(key, value);
        else if (key == "t_end")
            cfg.t_end = parse_double(key, value);
        else if (key == "max_steps")
            cfg.max_steps = parse_int(key, value);
        else if (key == "record_every")
            cfg.record_every = int(parse_int(key, value));
        else if (key == "p")
            cfg.lp_p = parse_double(key, value);
        else if (key == "csv")
            cfg.csv = value;
        else if (key == "checkpoint")
            cfg.checkpoint = value;
        else if (key == "resume")
            cfg.resume = value;
        else if (key == "checks")
            cfg.checks = CheckFlags::parse(value);
        else if (key == "z_residual_tol")
            cfg.z_residual_tol = parse_double(key, value);
        else if (key == "gamma_list")
            cfg.gamma_list = parse_list(key, value);
        else if (key == "kappa_list")
            cfg.kappa_list = parse_list(key, value);
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }

    if (const char* env = std::getenv("MPOLAR_SEED"))
        cfg.seed = parse_uint("MPOLAR_SEED", env);
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

void RunConfig::validate_grid_only() const {
    if (nx < 4 || ny < 4) throw ConfigError("config: nx and ny must be at least 4");
    if (!(lx > 0) || !(ly > 0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw ConfigError("config: lx and ly must be finite and positive");
}

void RunConfig::validate(bool sweep_mode) const {
    validate_grid_only();
    if (sweep_mode) {
        if (gamma_list.empty() || kappa_list.empty())
            throw ConfigError("config: sweep needs gamma_list and kappa_list");
        if (variant != Variant::damped)
            throw ConfigError("config: sweep requires variant = damped");
        for (const double g : gamma_list)
            if (!(g > 0) || !std::isfinite(g))
                throw ConfigError("config: gamma_list entries must be finite and positive");
        for (const double k : kappa_list)
            if (!(k >= 0) || !std::isfinite(k))
                throw ConfigError("config: kappa_list entries must be finite and nonnegative");
    } else {
        if (!gamma_list.empty() || !kappa_list.empty())
            throw ConfigError("config: gamma_list/kappa_list are sweep-only keys");
        if (!(gamma > 0) || !std::isfinite(gamma))
            throw ConfigError("config: gamma must be finite and positive");
        if (!(kappa >= 0) || !std::isfinite(kappa))
            throw ConfigError("config: kappa must be finite and nonnegative");
    }
    if (!std::isfinite(amplitude)) throw ConfigError("config: amplitude must be finite");
    if (!(dt >= 0) || !std::isfinite(dt)) throw ConfigError("config: dt must be finite and >= 0");
    if (dt == 0 && !(cfl > 0 && cfl <= 1))
        throw ConfigError("config: adaptive stepping needs 0 < cfl <= 1");
    if (!(dt_max > 0)) throw ConfigError("config: dt_max must be positive");
    if (!(t_end >= 0) || !std::isfinite(t_end))
        throw ConfigError("config: t_end must be finite and nonnegative (is it missing?)");
    if (max_steps < 1) throw ConfigError("config: max_steps must be at least 1");
    if (record_every < 1) throw ConfigError("config: record_every must be at least 1");
    if (!(lp_p >= 1))
        throw ConfigError("config: p must be >= 1 (or inf)");
    if (!(z_residual_tol > 0)) throw ConfigError("config: z_residual_tol must be positive");
}

}  // namespace mpolar
