#include "mpolar/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mpolar {

namespace {

const char* kHeader =
    "t,l2_u,l2_w,h1_semi_u,h1_semi_w,linf_omega,linf_w,linf_Z,energy,"
    "energy_residual,z_residual_l2,gronwall_envelope";

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_field(const std::string& text, std::size_t offset) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    // underflow to a subnormal sets ERANGE but still yields the stored value;
    // reject only malformed text and magnitudes beyond the double range
    if (end == s || *end != '\0' || (errno == ERANGE && std::abs(v) == HUGE_VAL))
        throw FormatError("csv: non-numeric field '" + text + "'", offset);
    return v;
}

}  // namespace

std::string csv_header() { return kHeader; }

std::string csv_to_string(const std::vector<DiagnosticsRecord<double>>& records) {
    std::string out = kHeader;
    out += '\n';
    for (const auto& r : records) {
        const double row[12] = {r.t,         r.l2_u,   r.l2_w,           r.h1_semi_u,
                                r.h1_semi_w, r.linf_omega, r.linf_w,     r.linf_Z,
                                r.energy,    r.energy_residual, r.z_residual_l2,
                                r.gronwall_envelope};
        for (int c = 0; c < 12; ++c) {
            if (c) out += ',';
            out += format_value(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<DiagnosticsRecord<double>>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("csv: cannot open '" + path + "' for writing");
    const std::string text = csv_to_string(records);
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw UsageError("csv: write to '" + path + "' failed");
}

std::vector<DiagnosticsRecord<double>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("csv: cannot open '" + path + "'");
    std::string line;
    std::size_t offset = 0;
    if (!std::getline(in, line)) throw FormatError("csv: empty file", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw FormatError("csv: unexpected header", 0);
    offset += line.size() + 1;

    std::vector<DiagnosticsRecord<double>> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            offset += 1;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) fields.push_back(item);
        if (fields.size() != 12)
            throw FormatError("csv: expected 12 fields, got " + std::to_string(fields.size()),
                              offset);
        DiagnosticsRecord<double> r;
        int c = 0;
        r.t = parse_field(fields[c++], offset);
        r.l2_u = parse_field(fields[c++], offset);
        r.l2_w = parse_field(fields[c++], offset);
        r.h1_semi_u = parse_field(fields[c++], offset);
        r.h1_semi_w = parse_field(fields[c++], offset);
        r.linf_omega = parse_field(fields[c++], offset);
        r.linf_w = parse_field(fields[c++], offset);
        r.linf_Z = parse_field(fields[c++], offset);
        r.energy = parse_field(fields[c++], offset);
        r.energy_residual = parse_field(fields[c++], offset);
        r.z_residual_l2 = parse_field(fields[c++], offset);
        r.gronwall_envelope = parse_field(fields[c++], offset);
        r.lp_Z = r.linf_Z;
        r.lp_w = r.linf_w;
        r.step = std::int64_t(records.size());
        records.push_back(r);
        offset += line.size() + 1;
    }
    return records;
}

}  // namespace mpolar
