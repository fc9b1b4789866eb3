// File formats for the batch tool. Every file starts with a comment line
// carrying the config hash and the seed, so a result can always be traced
// to the exact configuration that produced it, and reruns can be compared
// byte for byte: all numbers print via to_chars in shortest round-trip
// form, which is deterministic and parses back to the identical double.
//
// Formats:
//   ledger CSV    one row per recorded time (schema in MomentLedger)
//   snapshot CSV  r,f,env               (spectrum + pointwise lower bound)
//   eval CSV      r,f,gain,theta,q      (one collision-operator evaluation)
//   report JSON   array of check records, hash/seed in a // comment line
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "collision.hpp"
#include "evolution.hpp"
#include "spectrum.hpp"
#include "verify.hpp"

namespace wavekin {

struct OutputStamp {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field, const char* what) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw std::invalid_argument(std::string("cannot parse ") + what + ": \"" +
                                    std::string(field) + "\"");
    }
    return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace detail

inline std::string stamp_comment(const OutputStamp& stamp, const char* lead = "#") {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s config_hash=%016llx seed=%llu", lead,
                  static_cast<unsigned long long>(stamp.config_hash),
                  static_cast<unsigned long long>(stamp.seed));
    return std::string(buf);
}

inline void write_ledger(const std::filesystem::path& path, const MomentLedger& ledger,
                         const OutputStamp& stamp) {
    auto out = detail::open_output(path);
    out << stamp_comment(stamp) << '\n' << MomentLedger::csv_header << '\n';
    for (const LedgerRow& row : ledger.rows) {
        out << detail::format_double(row.t) << ',' << detail::format_double(row.m0) << ','
            << detail::format_double(row.m1) << ',' << detail::format_double(row.mN) << ','
            << detail::format_double(row.mN1) << ',' << detail::format_double(row.mN2) << ','
            << detail::format_double(row.l1N3) << ',' << detail::format_double(row.c0) << ','
            << detail::format_double(row.c1) << ','
            << detail::format_double(row.envelope_slack) << ',' << (row.s1 ? 1 : 0) << ','
            << (row.s2 ? 1 : 0) << ',' << (row.s3 ? 1 : 0) << ',' << (row.trunc_warn ? 1 : 0)
            << '\n';
    }
}

inline MomentLedger read_ledger(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    MomentLedger ledger;
    bool saw_header = false;
    for (const std::string& line : lines) {
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != MomentLedger::csv_header) {
                throw std::invalid_argument("ledger file missing the expected header: " +
                                            path.string());
            }
            saw_header = true;
            continue;
        }
        const auto fields = detail::split_csv(line);
        if (fields.size() != 14) {
            throw std::invalid_argument("ledger row has " + std::to_string(fields.size()) +
                                        " fields, expected 14");
        }
        LedgerRow row;
        row.t = detail::parse_double(fields[0], "ledger t");
        row.m0 = detail::parse_double(fields[1], "ledger m0");
        row.m1 = detail::parse_double(fields[2], "ledger m1");
        row.mN = detail::parse_double(fields[3], "ledger mN");
        row.mN1 = detail::parse_double(fields[4], "ledger mN1");
        row.mN2 = detail::parse_double(fields[5], "ledger mN2");
        row.l1N3 = detail::parse_double(fields[6], "ledger l1N3");
        row.c0 = detail::parse_double(fields[7], "ledger c0");
        row.c1 = detail::parse_double(fields[8], "ledger c1");
        row.envelope_slack = detail::parse_double(fields[9], "ledger envelope_slack");
        row.s1 = detail::parse_double(fields[10], "ledger s1") != 0.0;
        row.s2 = detail::parse_double(fields[11], "ledger s2") != 0.0;
        row.s3 = detail::parse_double(fields[12], "ledger s3") != 0.0;
        row.trunc_warn = detail::parse_double(fields[13], "ledger trunc_warn") != 0.0;
        ledger.rows.push_back(row);
    }
    if (!saw_header) {
        throw std::invalid_argument("ledger file missing the expected header: " + path.string());
    }
    return ledger;
}

inline void write_snapshot(const std::filesystem::path& path, const Spectrum& f,
                           std::span<const double> env, const OutputStamp& stamp) {
    if (env.size() != f.size()) {
        throw std::invalid_argument("snapshot envelope length does not match the grid");
    }
    auto out = detail::open_output(path);
    out << stamp_comment(stamp) << '\n' << "r,f,env" << '\n';
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << detail::format_double(f.grid->nodes[i]) << ','
            << detail::format_double(f.values[i]) << ',' << detail::format_double(env[i])
            << '\n';
    }
}

inline void write_eval(const std::filesystem::path& path, const Spectrum& f,
                       const CollisionResult& result, const OutputStamp& stamp) {
    if (result.gain.size() != f.size() || result.theta.size() != f.size() ||
        result.q.size() != f.size()) {
        throw std::invalid_argument("collision result length does not match the grid");
    }
    auto out = detail::open_output(path);
    out << stamp_comment(stamp) << '\n' << "r,f,gain,theta,q" << '\n';
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << detail::format_double(f.grid->nodes[i]) << ','
            << detail::format_double(f.values[i]) << ','
            << detail::format_double(result.gain[i]) << ','
            << detail::format_double(result.theta[i]) << ','
            << detail::format_double(result.q[i]) << '\n';
    }
}

// Reads a two-or-more column CSV whose first columns are r,f (snapshots and
// eval dumps read back too; extra columns are ignored). The node column must
// match the grid the caller supplies.
inline Spectrum read_spectrum(const std::filesystem::path& path, const GridPtr& grid) {
    if (!grid) throw std::invalid_argument("read_spectrum requires a grid");
    const auto lines = detail::read_lines(path);
    std::vector<double> values;
    values.reserve(grid->nodes.size());
    const double tol = 1e-9 * std::max(1.0, grid->r_max());
    bool saw_header = false;
    std::size_t i = 0;
    for (const std::string& line : lines) {
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line.rfind("r,f", 0) != 0) {
                throw std::invalid_argument("spectrum file missing the r,f header: " +
                                            path.string());
            }
            saw_header = true;
            continue;
        }
        const auto fields = detail::split_csv(line);
        if (fields.size() < 2) {
            throw std::invalid_argument("spectrum row needs at least r and f: " + line);
        }
        if (i >= grid->nodes.size()) {
            throw std::invalid_argument("spectrum file has more rows than grid nodes");
        }
        const double r = detail::parse_double(fields[0], "spectrum r");
        if (!(std::abs(r - grid->nodes[i]) <= tol)) {
            throw std::invalid_argument("spectrum file nodes do not match the grid at row " +
                                        std::to_string(i));
        }
        values.push_back(detail::parse_double(fields[1], "spectrum f"));
        ++i;
    }
    if (i != grid->nodes.size()) {
        throw std::invalid_argument("spectrum file has " + std::to_string(i) +
                                    " rows, expected " + std::to_string(grid->nodes.size()));
    }
    return make_spectrum(grid, std::move(values));
}

inline nlohmann::json report_to_json(const std::vector<VerifyReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const VerifyReport& r : reports) {
        arr.push_back({{"name", r.name},
                       {"samples", r.samples},
                       {"worst_ratio", r.worst_ratio},
                       {"bound", r.bound},
                       {"provenance", r.provenance},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed},
                       {"note", r.note}});
    }
    return arr;
}

// The payload is a JSON array of check records; the hash/seed stamp rides in
// a // comment line that readers strip (parse with comments ignored).
inline void write_report(const std::filesystem::path& path,
                         const std::vector<VerifyReport>& reports, const OutputStamp& stamp) {
    auto out = detail::open_output(path);
    out << stamp_comment(stamp, "//") << '\n' << report_to_json(reports).dump(2) << '\n';
}

inline std::vector<VerifyReport> read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("report parse error: ") + e.what());
    }
    if (!arr.is_array()) {
        throw std::invalid_argument("report must be a JSON array of check records");
    }
    std::vector<VerifyReport> reports;
    for (const auto& j : arr) {
        VerifyReport r;
        r.name = j.at("name").get<std::string>();
        r.samples = j.at("samples").get<std::size_t>();
        r.worst_ratio = j.at("worst_ratio").get<double>();
        r.bound = j.at("bound").get<double>();
        r.provenance = j.at("provenance").get<std::string>();
        r.tolerance = j.at("tolerance").get<double>();
        r.passed = j.at("passed").get<bool>();
        r.note = j.at("note").get<std::string>();
        reports.push_back(std::move(r));
    }
    return reports;
}

} // namespace wavekin
