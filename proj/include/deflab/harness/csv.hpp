#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "deflab/algorithms/driver.hpp"
#include "deflab/errors.hpp"

namespace deflab::harness {

using algorithms::DeflationRecord;

inline constexpr std::string_view kCsvHeader = "algorithm,ensemble,n,epsilon,sample_id,seed,tau,iota,censored";

/// Shortest-safe text for a double: 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_record(const DeflationRecord& r) {
    std::string s;
    s.reserve(96);
    s += algorithms::algorithm_name(r.algorithm);
    s += ',';
    s += ensembles::ensemble_name(r.ensemble);
    s += ',';
    s += std::to_string(r.n);
    s += ',';
    s += format_double(r.epsilon);
    s += ',';
    s += std::to_string(r.sample_id);
    s += ',';
    s += std::to_string(r.seed);
    s += ',';
    s += format_double(r.tau);
    s += ',';
    s += std::to_string(r.iota);
    s += ',';
    s += r.censored ? '1' : '0';
    return s;
}

inline void write_csv(std::ostream& out, const std::vector<DeflationRecord>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << format_record(r) << '\n';
}

inline void write_csv(const std::filesystem::path& path, const std::vector<DeflationRecord>& rows) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, rows);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace detail {

template <class T>
T parse_number(std::string_view field, std::string_view what, std::size_t line) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("line " + std::to_string(line) + ": bad " + std::string(what) + " '" +
                        std::string(field) + "'");
    return value;
}

}  // namespace detail

inline DeflationRecord parse_record(std::string_view line, std::size_t line_no = 0) {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        f.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 9) throw DataError(where + "expected 9 fields, found " + std::to_string(f.size()));
    DeflationRecord r;
    const auto a = algorithms::parse_algorithm(f[0]);
    if (!a) throw DataError(where + "unknown algorithm '" + std::string(f[0]) + "'");
    r.algorithm = *a;
    const auto e = ensembles::parse_ensemble(f[1]);
    if (!e) throw DataError(where + "unknown ensemble '" + std::string(f[1]) + "'");
    r.ensemble = *e;
    r.n = detail::parse_number<std::size_t>(f[2], "n", line_no);
    r.epsilon = detail::parse_number<double>(f[3], "epsilon", line_no);
    r.sample_id = detail::parse_number<std::uint64_t>(f[4], "sample_id", line_no);
    r.seed = detail::parse_number<std::uint64_t>(f[5], "seed", line_no);
    r.tau = detail::parse_number<double>(f[6], "tau", line_no);
    r.iota = detail::parse_number<std::size_t>(f[7], "iota", line_no);
    if (f[8] != "0" && f[8] != "1") throw DataError(where + "censored must be 0 or 1");
    r.censored = f[8] == "1";
    if (!(r.epsilon > 0.0) || !(r.tau >= 0.0)) throw DataError(where + "epsilon must be positive, tau nonnegative");
    return r;
}

inline std::vector<DeflationRecord> read_csv(std::istream& in, std::string_view source = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw DataError(std::string(source) + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw DataError(std::string(source) + ": unexpected header '" + line + "'");
    std::vector<DeflationRecord> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            rows.push_back(parse_record(line, line_no));
        } catch (const DataError& e) {
            throw DataError(std::string(source) + ": " + e.what());
        }
    }
    return rows;
}

inline std::vector<DeflationRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_csv(in, path.string());
}

}  // namespace deflab::harness
