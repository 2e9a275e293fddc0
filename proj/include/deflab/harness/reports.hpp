#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "deflab/ensembles/rng.hpp"
#include "deflab/harness/experiment.hpp"
#include "deflab/stats/descriptive.hpp"
#include "deflab/stats/regression.hpp"
#include "deflab/stats/tails.hpp"

namespace deflab::harness {

// ---- pooling ----------------------------------------------------------------------

enum class Grouping { Ensemble, Algorithm, AlgorithmEnsemble };

inline std::optional<Grouping> parse_grouping(std::string_view s) noexcept {
    if (s == "ensemble") return Grouping::Ensemble;
    if (s == "algorithm") return Grouping::Algorithm;
    if (s == "algorithm_ensemble") return Grouping::AlgorithmEnsemble;
    return std::nullopt;
}

inline std::string group_label(const CellKey& k, Grouping g) {
    const std::string a(algorithms::algorithm_name(k.algorithm)), e(ensembles::ensemble_name(k.ensemble));
    switch (g) {
        case Grouping::Ensemble: return e;
        case Grouping::Algorithm: return a;
        case Grouping::AlgorithmEnsemble: return a + "/" + e;
    }
    return e;
}

inline std::string cell_label(const CellKey& k) {
    return std::string(algorithms::algorithm_name(k.algorithm)) + "/" +
           std::string(ensembles::ensemble_name(k.ensemble)) + "/n=" + std::to_string(k.n) +
           "/eps=" + format_double(k.epsilon);
}

/// Continuity correction applied to the integer iteration counts before normalizing.
/// Jitter replaces τ by τ - U with U ~ Uniform(0, 1): the iterate first undercuts ε
/// somewhere in (τ - 1, τ] on a continuous clock. Without it, cells normalized with
/// different (mean, sd) put their atoms on shifted lattices and KS distances measure
/// the misalignment rather than the law.
enum class Continuity { None, Jitter };

inline std::optional<Continuity> parse_continuity(std::string_view s) noexcept {
    if (s == "none") return Continuity::None;
    if (s == "jitter") return Continuity::Jitter;
    return std::nullopt;
}

/// The jitter of one row, keyed by the row's identity so it is independent of row
/// order and file layout.
inline double row_jitter(const DeflationRecord& r) {
    std::uint64_t id = ensembles::stream_id(r.ensemble, r.n, r.sample_id);
    id = ensembles::hash_combine(id, ensembles::hash_string(algorithms::algorithm_name(r.algorithm)));
    id = ensembles::hash_combine(id, std::bit_cast<std::uint64_t>(r.epsilon));
    id = ensembles::hash_combine(id, ensembles::hash_string("continuity"));
    return ensembles::RngStream(r.seed, id).uniform();
}

/// Non-censored τ grouped by cell, continuity-corrected on request.
inline std::map<CellKey, std::vector<double>> corrected_cell_values(const std::vector<DeflationRecord>& rows,
                                                                    Continuity continuity,
                                                                    std::map<CellKey, std::size_t>* censored = nullptr) {
    if (continuity == Continuity::None) return cell_values(rows, censored);
    std::map<CellKey, std::vector<double>> cells;
    for (const auto& r : rows) {
        auto& v = cells[CellKey::of(r)];
        if (r.censored) {
            if (censored) ++(*censored)[CellKey::of(r)];
        } else {
            v.push_back(r.tau - row_jitter(r));
        }
    }
    for (auto& [k, v] : cells) std::sort(v.begin(), v.end());
    return cells;
}

/// Normalized τ pooled per group: every (algorithm, ensemble, n, ε) cell is normalized
/// on its own before pooling. Cells that cannot be normalized are skipped with a notice.
struct PooledSamples {
    std::map<std::string, std::vector<double>> groups;
    std::map<std::string, std::size_t> censored;
    std::vector<std::string> notices;
};

inline PooledSamples pool_normalized(const std::vector<DeflationRecord>& rows, Grouping grouping,
                                     Continuity continuity = Continuity::Jitter) {
    PooledSamples out;
    std::map<CellKey, std::size_t> censored;
    for (const auto& [key, values] : corrected_cell_values(rows, continuity, &censored)) {
        const auto label = group_label(key, grouping);
        out.censored[label] += censored.count(key) ? censored.at(key) : 0;
        try {
            const auto z = stats::normalize(values);
            auto& g = out.groups[label];
            g.insert(g.end(), z.begin(), z.end());
        } catch (const ZeroVariance& e) {
            out.notices.push_back("skipped cell " + cell_label(key) + ": " + e.what());
        }
    }
    for (auto& [label, v] : out.groups) std::sort(v.begin(), v.end());
    return out;
}

// ---- collapse ---------------------------------------------------------------------

struct CollapseReport {
    std::vector<std::string> labels;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<double>> ks;  // pairwise two-sample statistics
    std::vector<stats::HistogramData> histograms;
    std::vector<std::string> notices;
};

inline CollapseReport emit_collapse_report(const std::vector<DeflationRecord>& rows, Grouping grouping,
                                          Continuity continuity = Continuity::Jitter) {
    auto pooled = pool_normalized(rows, grouping, continuity);
    CollapseReport r;
    r.notices = std::move(pooled.notices);
    for (auto& [label, values] : pooled.groups) {
        if (values.empty()) continue;
        r.labels.push_back(label);
        r.sizes.push_back(values.size());
        r.histograms.push_back(stats::histogram(values));
    }
    const std::size_t g = r.labels.size();
    r.ks.assign(g, std::vector<double>(g, 0.0));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j)
            r.ks[i][j] = r.ks[j][i] =
                stats::ks_two_sample(pooled.groups.at(r.labels[i]), pooled.groups.at(r.labels[j]));
    return r;
}

inline void write_histogram(std::ostream& out, const stats::HistogramData& h) {
    out << "bin_lo,bin_hi,count,density,log10_density\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ',' << h.counts[b] << ','
            << format_double(h.densities[b]) << ','
            << (h.densities[b] > 0.0 ? format_double(std::log10(h.densities[b])) : std::string("nan")) << '\n';
    }
}

inline void write_notices(std::ostream& out, const std::vector<std::string>& notices) {
    for (const auto& n : notices) out << "# notice: " << n << '\n';
}

inline void write_collapse_report(std::ostream& out, const CollapseReport& r) {
    write_notices(out, r.notices);
    out << "# ks_matrix\ngroup_a,group_b,n_a,n_b,ks,critical_5pct,critical_1pct,below_1pct\n";
    for (std::size_t i = 0; i < r.labels.size(); ++i)
        for (std::size_t j = i + 1; j < r.labels.size(); ++j) {
            const double c5 = stats::ks_critical_value(1.36, r.sizes[i], r.sizes[j]);
            const double c1 = stats::ks_critical_value(1.63, r.sizes[i], r.sizes[j]);
            out << r.labels[i] << ',' << r.labels[j] << ',' << r.sizes[i] << ',' << r.sizes[j] << ','
                << format_double(r.ks[i][j]) << ',' << format_double(c5) << ',' << format_double(c1) << ','
                << (r.ks[i][j] < c1 ? 1 : 0) << '\n';
        }
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        out << "# histogram " << r.labels[i] << '\n';
        write_histogram(out, r.histograms[i]);
    }
}

// ---- regression -------------------------------------------------------------------

enum class Design { Dimension, LogDimension };

inline constexpr std::string_view design_name(Design d) noexcept {
    return d == Design::Dimension ? "n" : "log_n";
}

struct RegressionEntry {
    algorithms::AlgorithmKind algorithm = algorithms::AlgorithmKind::QR;
    ensembles::EnsembleKind ensemble = ensembles::EnsembleKind::GOE;
    std::string response;  // "mean" or "sd"
    Design design = Design::Dimension;
    stats::RegressionFit fit;
    bool preferred = false;  // smaller residual standard error of the two designs
};

struct RegressionReport {
    std::vector<RegressionEntry> entries;
    std::vector<std::string> notices;

    const RegressionEntry* find(algorithms::AlgorithmKind a, ensembles::EnsembleKind e, std::string_view response,
                                Design d) const {
        for (const auto& x : entries)
            if (x.algorithm == a && x.ensemble == e && x.response == response && x.design == d) return &x;
        return nullptr;
    }
};

/// Fits mean and sd of τ against (n or log n, log ε) for each (algorithm, ensemble).
inline RegressionReport emit_regression_report(const std::vector<CellSummary>& table) {
    RegressionReport rep;
    std::map<std::pair<algorithms::AlgorithmKind, ensembles::EnsembleKind>, std::vector<CellSummary>> groups;
    for (const auto& c : table) {
        if (c.empty) {
            rep.notices.push_back("EmptyCell " + cell_label(c.key) + " excluded");
            continue;
        }
        groups[{c.key.algorithm, c.key.ensemble}].push_back(c);
    }
    for (const auto& [ae, cells] : groups) {
        for (std::string response : {"mean", "sd"}) {
            std::vector<double> xn, xl, xe, y;
            for (const auto& c : cells) {
                if (response == "sd" && c.count < 2) continue;
                xn.push_back(static_cast<double>(c.key.n));
                xl.push_back(std::log(static_cast<double>(c.key.n)));
                xe.push_back(std::log(c.key.epsilon));
                y.push_back(response == "mean" ? c.mean : c.sd);
            }
            std::vector<RegressionEntry> pair;
            for (Design d : {Design::Dimension, Design::LogDimension}) {
                try {
                    RegressionEntry e{ae.first, ae.second, response, d,
                                      stats::linear_regression(d == Design::Dimension ? xn : xl, xe, y), false};
                    pair.push_back(std::move(e));
                } catch (const SingularDesign& err) {
                    rep.notices.push_back(std::string(algorithms::algorithm_name(ae.first)) + "/" +
                                          std::string(ensembles::ensemble_name(ae.second)) + " " + response +
                                          " (" + std::string(design_name(d)) + "): " + err.what());
                }
            }
            if (pair.size() == 2) {
                const bool first = pair[0].fit.residual_std_error <= pair[1].fit.residual_std_error;
                pair[first ? 0 : 1].preferred = true;
            }
            for (auto& e : pair) rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

inline void write_regression_report(std::ostream& out, const RegressionReport& r) {
    write_notices(out, r.notices);
    out << "algorithm,ensemble,response,design,c0,c1,c2,se0,se1,se2,t_dim,p_value_dim,residual_se,dof,preferred\n";
    for (const auto& e : r.entries) {
        const auto& f = e.fit;
        out << algorithms::algorithm_name(e.algorithm) << ',' << ensembles::ensemble_name(e.ensemble) << ','
            << e.response << ',' << design_name(e.design);
        for (double c : f.coefficients) out << ',' << format_double(c);
        for (double s : f.std_errors) out << ',' << format_double(s);
        out << ',' << format_double(f.t_dim) << ',' << format_double(f.p_value_dim) << ','
            << format_double(f.residual_std_error) << ',' << f.dof << ',' << (e.preferred ? 1 : 0) << '\n';
    }
}

// ---- tails ------------------------------------------------------------------------

struct TailReportEntry {
    std::string group;
    stats::TailFamily family = stats::TailFamily::Exponential;
    std::optional<stats::TailFitResult> result;  // empty: insufficient tail
    std::string note;
};

struct TailOverlay {
    std::string group;
    stats::HistogramData histogram;
    std::vector<double> gamma_reference;   // Gamma(2, 1) shifted to mean zero, at bin centres
    std::vector<double> normal_reference;  // standard normal, at bin centres
};

struct TailReport {
    std::vector<TailReportEntry> entries;
    std::vector<TailOverlay> overlays;
    std::vector<std::string> notices;
};

inline double shifted_gamma21_pdf(double x) {
    const double y = x + 2.0;
    return y > 0.0 ? y * std::exp(-y) : 0.0;
}

inline double standard_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Semiparametric tail tests of each pooled group against each family. The resampling
/// stream of (group, family) is derived from `seed` and the two names.
inline TailReport emit_tail_report(const std::map<std::string, std::vector<double>>& pooled,
                                   const std::vector<stats::TailFamily>& families, std::size_t resamples,
                                   std::uint64_t seed) {
    TailReport rep;
    for (const auto& [group, values] : pooled) {
        for (auto f : families) {
            TailReportEntry e{group, f, std::nullopt, ""};
            const auto sid = ensembles::hash_combine(ensembles::hash_string(group),
                                                     ensembles::hash_string(stats::family_name(f)));
            try {
                e.result = stats::semiparametric_pvalue(values, f, resamples, ensembles::RngStream(seed, sid));
            } catch (const InsufficientTail& err) {
                e.note = err.what();
            } catch (const NoConvergence& err) {
                e.note = err.what();
            }
            rep.entries.push_back(std::move(e));
        }
        if (values.empty()) continue;
        TailOverlay o{group, stats::histogram(values), {}, {}};
        for (std::size_t b = 0; b < o.histogram.counts.size(); ++b) {
            const double c = 0.5 * (o.histogram.edges[b] + o.histogram.edges[b + 1]);
            o.gamma_reference.push_back(shifted_gamma21_pdf(c));
            o.normal_reference.push_back(standard_normal_pdf(c));
        }
        rep.overlays.push_back(std::move(o));
    }
    return rep;
}

inline void write_tail_report(std::ostream& out, const TailReport& r) {
    write_notices(out, r.notices);
    out << "# tail_tests\ngroup,family,n_total,n_tail,x_min,params,ks_stat,p_value,failed_resamples,status\n";
    for (const auto& e : r.entries) {
        out << e.group << ',' << stats::family_name(e.family) << ',';
        if (!e.result) {
            out << ",,,,,,,insufficient\n";
            continue;
        }
        const auto& t = *e.result;
        out << t.n_total << ',' << t.n_tail << ',' << format_double(t.x_min) << ',';
        for (std::size_t i = 0; i < t.params.size(); ++i) out << (i ? ";" : "") << format_double(t.params[i]);
        out << ',' << format_double(t.ks_stat) << ',' << format_double(t.p_value) << ',' << t.failed_resamples
            << ",ok\n";
    }
    for (const auto& o : r.overlays) {
        out << "# overlay " << o.group << "\nbin_lo,bin_hi,density,log10_density,gamma21_shifted,standard_normal\n";
        const auto& h = o.histogram;
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
                << format_double(h.densities[b]) << ','
                << (h.densities[b] > 0.0 ? format_double(std::log10(h.densities[b])) : std::string("nan")) << ','
                << format_double(o.gamma_reference[b]) << ',' << format_double(o.normal_reference[b]) << '\n';
    }
}

// ---- deflation index --------------------------------------------------------------

struct IndexEntry {
    CellKey key;
    std::vector<std::size_t> frequency;  // frequency[k] for k = 1..n-1; frequency[0] unused
    std::size_t total = 0;               // non-censored rows
    std::size_t censored = 0;
    std::size_t modal_index = 0;
    double mass_ends = 0.0;              // fraction at k in {1, n-1}
    double mass_other = 0.0;
};

/// Deflation-index frequencies per (algorithm, ensemble, n, ε). Tolerances are kept
/// apart because indices at different tolerances of one sample are dependent.
inline std::vector<IndexEntry> emit_index_report(const std::vector<DeflationRecord>& rows) {
    std::map<CellKey, IndexEntry> cells;
    for (const auto& r : rows) {
        auto& e = cells[CellKey::of(r)];
        if (e.frequency.empty()) {
            e.key = CellKey::of(r);
            e.frequency.assign(std::max<std::size_t>(r.n, 2), 0);
        }
        if (r.censored) {
            ++e.censored;
            continue;
        }
        if (r.iota < 1 || r.iota >= r.n)
            throw DataError("deflation index " + std::to_string(r.iota) + " out of range for n=" + std::to_string(r.n));
        ++e.frequency[r.iota];
        ++e.total;
    }
    std::vector<IndexEntry> out;
    for (auto& [key, e] : cells) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < e.frequency.size(); ++k)
            if (e.frequency[k] > best) {
                best = e.frequency[k];
                e.modal_index = k;
            }
        if (e.total > 0) {
            const std::size_t last = key.n - 1;
            const std::size_t ends = e.frequency[1] + (last != 1 ? e.frequency[last] : 0);
            e.mass_ends = static_cast<double>(ends) / static_cast<double>(e.total);
            e.mass_other = 1.0 - e.mass_ends;
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline void write_index_report(std::ostream& out, const std::vector<IndexEntry>& entries) {
    out << "# summary\nalgorithm,ensemble,n,epsilon,total,censored,modal_index,mass_ends,mass_other\n";
    for (const auto& e : entries)
        out << algorithms::algorithm_name(e.key.algorithm) << ',' << ensembles::ensemble_name(e.key.ensemble) << ','
            << e.key.n << ',' << format_double(e.key.epsilon) << ',' << e.total << ',' << e.censored << ','
            << e.modal_index << ',' << format_double(e.mass_ends) << ',' << format_double(e.mass_other) << '\n';
    out << "# frequency\nalgorithm,ensemble,n,epsilon,index,count\n";
    for (const auto& e : entries)
        for (std::size_t k = 1; k < e.frequency.size(); ++k)
            out << algorithms::algorithm_name(e.key.algorithm) << ',' << ensembles::ensemble_name(e.key.ensemble)
                << ',' << e.key.n << ',' << format_double(e.key.epsilon) << ',' << k << ',' << e.frequency[k]
                << '\n';
}

}  // namespace deflab::harness
