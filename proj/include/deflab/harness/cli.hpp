#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deflab/errors.hpp"
#include "deflab/harness/config.hpp"
#include "deflab/harness/csv.hpp"
#include "deflab/harness/experiment.hpp"
#include "deflab/harness/reports.hpp"
#include "deflab/two_by_two.hpp"
#include "deflab/version.hpp"

namespace deflab::harness {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitData = 3 };

namespace detail {

inline std::vector<DeflationRecord> load_inputs(const std::vector<std::string>& paths) {
    std::vector<DeflationRecord> rows;
    for (const auto& p : paths) {
        auto r = read_csv(std::filesystem::path(p));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

// Writes to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
        body(fallback);
        fallback.flush();
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    body(f);
    f.flush();
    if (!f) throw IoError("write failed for '" + path + "'");
}

inline std::vector<stats::TailFamily> parse_families(const std::vector<std::string>& names) {
    std::vector<stats::TailFamily> out;
    for (const auto& n : names) {
        const auto f = stats::parse_family(n);
        if (!f) throw CLI::ValidationError("--families", "unknown tail family '" + n + "'");
        out.push_back(*f);
    }
    return out;
}

}  // namespace detail

/// Entry point of the `deflab` tool. Returns the process exit code: 0 success, 1 usage
/// error, 2 I/O error, 3 data-validation error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Deflation-time laboratory for symmetric eigenvalue algorithms", "deflab"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment grid and write its CSV");
    std::string config_path, out_path;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> seed_override;
    bool quiet = false;
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_path, "Output CSV (overrides the config; default standard output)");
    run->add_option("--workers", workers, "Worker threads (default: DEFLATIONLAB_WORKERS, else all cores)")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed_override, "Override the config seed");
    run->add_flag("--quiet", quiet, "No progress output");

    std::vector<std::string> inputs;
    std::string group_name = "ensemble";
    auto add_inputs = [&](CLI::App* sub) {
        sub->add_option("--input", inputs, "Result CSV file(s)")->required()->expected(1, -1);
        sub->add_option("--out", out_path, "Output file (default standard output)");
    };

    auto* agg = app.add_subcommand("aggregate", "Per-cell count, censored count, mean and sd of tau");
    add_inputs(agg);

    auto* regress = app.add_subcommand("regress", "Regress cell means and sds on (n | log n, log eps)");
    add_inputs(regress);

    auto* collapse = app.add_subcommand("collapse", "Pooled normalized tau: KS matrix and histograms");
    add_inputs(collapse);
    collapse->add_option("--group", group_name, "Pooling: ensemble | algorithm | algorithm_ensemble")
        ->check(CLI::IsMember({"ensemble", "algorithm", "algorithm_ensemble"}));
    std::string continuity = "jitter";
    collapse->add_option("--continuity", continuity, "Continuity correction of tau: jitter | none")
        ->check(CLI::IsMember({"jitter", "none"}));

    auto* tail = app.add_subcommand("tailtest", "Semiparametric tail tests of pooled normalized tau");
    add_inputs(tail);
    std::vector<std::string> family_names{"exponential", "gaussian", "weibull", "gamma"};
    std::size_t resamples = 500;
    std::uint64_t seed = 0;
    std::string tail_group = "algorithm_ensemble";
    tail->add_option("--families", family_names, "Tail families")->delimiter(',');
    tail->add_option("--resamples", resamples, "Resamples per test (at least 100)")->check(CLI::Range(100, 100000000));
    tail->add_option("--seed", seed, "Seed of the resampling streams");
    tail->add_option("--group", tail_group, "Pooling: ensemble | algorithm | algorithm_ensemble")
        ->check(CLI::IsMember({"ensemble", "algorithm", "algorithm_ensemble"}));
    tail->add_option("--continuity", continuity, "Continuity correction of tau: jitter | none")
        ->check(CLI::IsMember({"jitter", "none"}));

    auto* index = app.add_subcommand("indexreport", "Deflation-index frequencies per cell");
    add_inputs(index);

    auto* oracle = app.add_subcommand("oracle2x2", "Monte Carlo mean of the analytic 2x2 deflation time");
    std::string kind_name = "goe2";
    std::vector<double> eps_values;
    std::size_t mc_samples = 10000;
    oracle->add_option("--ensemble", kind_name, "goe2 | jue")->required();
    oracle->add_option("--eps", eps_values, "Tolerance(s)")->required()->expected(1, -1)->check(CLI::PositiveNumber);
    oracle->add_option("--samples", mc_samples, "Monte Carlo samples (at least 100)")->check(CLI::Range(100, 1000000000));
    oracle->add_option("--seed", seed, "Seed");
    oracle->add_option("--out", out_path, "Output file (default standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            auto cfg = load_config(config_path);
            if (seed_override) cfg.seed = *seed_override;
            if (!out_path.empty()) cfg.output_path = out_path;
            const auto w = resolve_workers(workers);
            if (!w) {
                err << "deflab: DEFLATIONLAB_WORKERS must be a positive integer\n";
                return kExitUsage;
            }
            ProgressCallback progress;
            std::size_t last_percent = 0;
            if (!quiet)
                progress = [&](std::size_t done, std::size_t total) {
                    const std::size_t pct = done * 100 / total;
                    if (pct >= last_percent + 10 || done == total) {
                        last_percent = pct;
                        err << "deflab: " << done << "/" << total << " samples\n";
                    }
                };
            const auto store = run_experiment(cfg, *w, progress);
            if (cfg.output_path.empty()) {
                write_csv(out, store.rows);
            } else {
                write_store(store, cfg.output_path);
                if (!quiet)
                    err << "deflab: wrote " << store.rows.size() << " rows to " << cfg.output_path << '\n';
            }
        } else if (*agg) {
            const auto table = aggregate(detail::load_inputs(inputs));
            detail::emit(out_path, out, [&](std::ostream& o) { write_aggregate(o, table); });
        } else if (*regress) {
            const auto rep = emit_regression_report(aggregate(detail::load_inputs(inputs)));
            detail::emit(out_path, out, [&](std::ostream& o) { write_regression_report(o, rep); });
        } else if (*collapse) {
            const auto rep = emit_collapse_report(detail::load_inputs(inputs), *parse_grouping(group_name),
                                                  *parse_continuity(continuity));
            detail::emit(out_path, out, [&](std::ostream& o) { write_collapse_report(o, rep); });
        } else if (*tail) {
            const auto families = detail::parse_families(family_names);
            const auto pooled = pool_normalized(detail::load_inputs(inputs), *parse_grouping(tail_group),
                                                *parse_continuity(continuity));
            auto rep = emit_tail_report(pooled.groups, families, resamples, seed);
            rep.notices.insert(rep.notices.begin(), pooled.notices.begin(), pooled.notices.end());
            detail::emit(out_path, out, [&](std::ostream& o) { write_tail_report(o, rep); });
        } else if (*index) {
            const auto rep = emit_index_report(detail::load_inputs(inputs));
            detail::emit(out_path, out, [&](std::ostream& o) { write_index_report(o, rep); });
        } else if (*oracle) {
            const auto kind = two_by_two::parse_kind(kind_name);
            if (!kind) {
                err << "deflab: unknown 2x2 ensemble '" << kind_name << "' (goe2 | jue)\n";
                return kExitUsage;
            }
            detail::emit(out_path, out, [&](std::ostream& o) {
                o << "ensemble,epsilon,samples,estimate,stderr\n";
                for (double eps : eps_values) {
                    ensembles::RngStream rng(seed, ensembles::hash_combine(ensembles::hash_string("oracle2x2"),
                                                                           ensembles::hash_string(two_by_two::kind_name(*kind))));
                    const auto est = two_by_two::mc_mean_tau_2x2(*kind, eps, mc_samples, rng);
                    o << two_by_two::kind_name(*kind) << ',' << format_double(eps) << ',' << est.samples << ','
                      << format_double(est.mean) << ',' << format_double(est.std_error) << '\n';
                }
            });
        }
    } catch (const CLI::ValidationError& e) {
        err << "deflab: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "deflab: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "deflab: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "deflab: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace deflab::harness
