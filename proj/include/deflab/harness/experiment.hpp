#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "deflab/algorithms/driver.hpp"
#include "deflab/ensembles/ensembles.hpp"
#include "deflab/harness/config.hpp"
#include "deflab/harness/csv.hpp"
#include "deflab/stats/descriptive.hpp"
#include "deflab/version.hpp"

namespace deflab::harness {

/// Rows in job order (n ascending, then sample_id, then tolerance) plus a manifest.
struct ResultStore {
    std::vector<DeflationRecord> rows;
    nlohmann::ordered_json manifest;
};

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(algorithms::algorithm_name(cfg.algorithm));
    j["ensemble"] = std::string(ensembles::ensemble_name(cfg.ensemble.kind));
    j["udsj_sweeps"] = cfg.ensemble.udsj_sweeps;
    j["n_list"] = cfg.n_list;
    std::vector<std::string> eps;
    for (double e : cfg.epsilon_list) eps.push_back(format_double(e));
    j["epsilon_list"] = eps;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["iteration_cap"] = cfg.iteration_cap;
    j["output_path"] = cfg.output_path;
    return j;
}

/// Worker count: explicit value, else DEFLATIONLAB_WORKERS, else hardware parallelism.
/// Returns nullopt when the environment variable is set but not a positive integer.
inline std::optional<unsigned> resolve_workers(std::optional<unsigned> requested) {
    if (requested) return *requested;
    if (const char* env = std::getenv("DEFLATIONLAB_WORKERS"); env && *env) {
        unsigned v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) return std::nullopt;
        return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// One sample: draw its matrix from stream (seed, ensemble, n, sample_id) and run it
/// across every tolerance. A failed draw yields censored rows.
inline std::vector<DeflationRecord> run_sample(const ExperimentConfig& cfg, std::size_t n,
                                               std::uint64_t sample_id) {
    const algorithms::RunMetadata meta{cfg.ensemble.kind, sample_id, cfg.seed};
    ensembles::RngStream rng(cfg.seed, ensembles::stream_id(cfg.ensemble.kind, n, sample_id));
    try {
        const auto m0 = ensembles::sample(cfg.ensemble, n, rng);
        return algorithms::run_to_deflation(m0, cfg.algorithm, cfg.epsilon_list, cfg.iteration_cap, meta);
    } catch (const Error&) {
        std::vector<DeflationRecord> out;
        for (double eps : cfg.epsilon_list) {
            DeflationRecord r;
            r.algorithm = cfg.algorithm;
            r.ensemble = cfg.ensemble.kind;
            r.n = n;
            r.epsilon = eps;
            r.sample_id = sample_id;
            r.seed = cfg.seed;
            r.tau = static_cast<double>(cfg.iteration_cap);
            r.censored = true;
            out.push_back(r);
        }
        return out;
    }
}

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the whole grid on `workers` threads. Jobs are claimed from a shared counter and
/// their rows land in per-job slots, so the output does not depend on scheduling.
inline ResultStore run_experiment(const ExperimentConfig& cfg, unsigned workers = 1,
                                  const ProgressCallback& progress = {}) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    struct Job {
        std::size_t n;
        std::uint64_t sample_id;
    };
    std::vector<Job> jobs;
    jobs.reserve(cfg.n_list.size() * cfg.samples);
    for (std::size_t n : cfg.n_list)
        for (std::uint64_t s = 0; s < cfg.samples; ++s) jobs.push_back({n, s});

    std::vector<std::vector<DeflationRecord>> slots(jobs.size());
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
                slots[j] = run_sample(cfg, jobs[j].n, jobs[j].sample_id);
                const auto d = done.fetch_add(1) + 1;
                if (progress) {
                    std::lock_guard lock(progress_mutex);
                    progress(d, jobs.size());
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(jobs.size());
        }
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size()))));
    if (w == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < w; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ResultStore store;
    store.rows.reserve(jobs.size() * cfg.epsilon_list.size());
    for (auto& s : slots) store.rows.insert(store.rows.end(), s.begin(), s.end());
    std::size_t censored = 0;
    for (const auto& r : store.rows) censored += r.censored ? 1 : 0;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    store.manifest["tool"] = "deflab";
    store.manifest["code_version"] = std::string(kVersion);
    store.manifest["config"] = config_to_json(cfg);
    store.manifest["workers"] = w;
    store.manifest["rows"] = store.rows.size();
    store.manifest["censored_rows"] = censored;
    store.manifest["wall_time_seconds"] = wall;
    return store;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p += ".manifest.json";
    return p;
}

/// Writes the CSV and, next to it, `<path>.manifest.json`.
inline void write_store(const ResultStore& store, const std::filesystem::path& csv_path) {
    write_csv(csv_path, store.rows);
    std::ofstream out(manifest_path(csv_path), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + manifest_path(csv_path).string() + "' for writing");
    out << store.manifest.dump(2) << '\n';
    if (!out) throw IoError("write failed for manifest");
}

// ---- aggregation ------------------------------------------------------------------

struct CellKey {
    algorithms::AlgorithmKind algorithm = algorithms::AlgorithmKind::QR;
    ensembles::EnsembleKind ensemble = ensembles::EnsembleKind::GOE;
    std::size_t n = 0;
    double epsilon = 0.0;

    static CellKey of(const DeflationRecord& r) { return {r.algorithm, r.ensemble, r.n, r.epsilon}; }

    /// Algorithm, ensemble, n ascending, then epsilon descending.
    friend bool operator<(const CellKey& a, const CellKey& b) {
        return std::tuple(a.algorithm, a.ensemble, a.n, -a.epsilon) <
               std::tuple(b.algorithm, b.ensemble, b.n, -b.epsilon);
    }
    bool operator==(const CellKey&) const = default;
};

struct CellSummary {
    CellKey key;
    std::size_t count = 0;           // non-censored rows
    std::size_t censored_count = 0;
    double mean = 0.0;
    double sd = 0.0;
    bool empty = false;              // EmptyCell: every row censored

    bool operator==(const CellSummary&) const = default;
};

/// Non-censored τ values grouped by cell, each sorted ascending.
inline std::map<CellKey, std::vector<double>> cell_values(const std::vector<DeflationRecord>& rows,
                                                          std::map<CellKey, std::size_t>* censored = nullptr) {
    std::map<CellKey, std::vector<double>> cells;
    for (const auto& r : rows) {
        auto& v = cells[CellKey::of(r)];
        if (r.censored) {
            if (censored) ++(*censored)[CellKey::of(r)];
        } else {
            v.push_back(r.tau);
        }
    }
    for (auto& [k, v] : cells) std::sort(v.begin(), v.end());
    return cells;
}

/// (count, censored, mean, sd) per cell, independent of row order.
inline std::vector<CellSummary> aggregate(const std::vector<DeflationRecord>& rows) {
    std::map<CellKey, std::size_t> censored;
    const auto cells = cell_values(rows, &censored);
    std::vector<CellSummary> out;
    for (const auto& [key, values] : cells) {
        CellSummary s;
        s.key = key;
        s.count = values.size();
        s.censored_count = censored.count(key) ? censored.at(key) : 0;
        if (values.empty()) {
            s.empty = true;
        } else {
            const auto m = stats::mean_sd(values);
            s.mean = m.mean;
            s.sd = m.sd;
        }
        out.push_back(s);
    }
    return out;
}

inline constexpr std::string_view kAggregateHeader = "algorithm,ensemble,n,epsilon,count,censored,mean,sd,status";

inline void write_aggregate(std::ostream& out, const std::vector<CellSummary>& table) {
    out << kAggregateHeader << '\n';
    for (const auto& c : table) {
        out << algorithms::algorithm_name(c.key.algorithm) << ',' << ensembles::ensemble_name(c.key.ensemble)
            << ',' << c.key.n << ',' << format_double(c.key.epsilon) << ',' << c.count << ','
            << c.censored_count << ',';
        if (c.empty)
            out << "nan,nan,EmptyCell\n";
        else
            out << format_double(c.mean) << ',' << format_double(c.sd) << ",ok\n";
    }
}

}  // namespace deflab::harness
