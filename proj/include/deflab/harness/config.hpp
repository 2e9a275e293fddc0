#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "deflab/algorithms/driver.hpp"
#include "deflab/ensembles/ensembles.hpp"
#include "deflab/errors.hpp"

namespace deflab::harness {

using algorithms::AlgorithmKind;
using ensembles::EnsembleSpec;

/// One experiment grid: every n in n_list gets `samples` initial matrices, each run
/// across the whole tolerance list.
struct ExperimentConfig {
    AlgorithmKind algorithm = AlgorithmKind::QR;
    EnsembleSpec ensemble{};
    std::vector<std::size_t> n_list;
    std::vector<double> epsilon_list;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::size_t iteration_cap = algorithms::kDefaultIterationCap;
    std::string output_path;  // empty: standard output

    bool operator==(const ExperimentConfig&) const = default;

    void validate() const {
        if (n_list.empty()) throw ConfigError("n_list is empty");
        if (epsilon_list.empty()) throw ConfigError("epsilon_list is empty");
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (n_list[i] < 2) throw ConfigError("n_list entries must be at least 2");
            if (i > 0 && !(n_list[i] > n_list[i - 1])) throw ConfigError("n_list must be strictly ascending");
        }
        for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
            if (!(epsilon_list[i] > 0.0) || !std::isfinite(epsilon_list[i]))
                throw ConfigError("epsilon_list entries must be positive and finite");
            if (i > 0 && !(epsilon_list[i] < epsilon_list[i - 1]))
                throw ConfigError("epsilon_list must be strictly descending");
        }
        if (samples < 1) throw ConfigError("samples must be at least 1");
        if (iteration_cap < 1) throw ConfigError("iteration_cap must be at least 1");
    }
};

namespace detail {

inline void reject_unknown_keys(const toml::table& t, std::string_view where,
                                std::initializer_list<std::string_view> known) {
    for (const auto& [key, node] : t) {
        bool ok = false;
        for (auto k : known) ok = ok || key.str() == k;
        if (!ok) throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
    }
}

inline std::int64_t require_int(const toml::node_view<const toml::node>& v, std::string_view name) {
    const auto x = v.value<std::int64_t>();
    if (!x || !v.is_integer()) throw ConfigError(std::string(name) + " must be an integer");
    return *x;
}

inline std::size_t require_positive_size(const toml::node_view<const toml::node>& v, std::string_view name) {
    const auto x = require_int(v, name);
    if (x < 1) throw ConfigError(std::string(name) + " must be positive");
    return static_cast<std::size_t>(x);
}

inline std::string require_string(const toml::node_view<const toml::node>& v, std::string_view name) {
    const auto x = v.value<std::string>();
    if (!x || !v.is_string()) throw ConfigError(std::string(name) + " must be a string");
    return *x;
}

}  // namespace detail

/// Parses the key-value experiment format:
///
///     [experiment]
///     algorithm = "qr"            # qr | qr_wilkinson | toda | sign
///     ensemble = "goe"            # goe | gwigner | bernoulli | hermite1 | udsj | jue
///     n_list = [10, 30, 50, 70]
///     epsilon_list = [1e-2, 1e-4, 1e-6, 1e-8]
///     samples = 1000
///     seed = 1
///     iteration_cap = 10000       # optional
///     udsj_sweeps = 0             # optional, 0 = default
///
///     [output]
///     path = "results/goe_qr.csv" # optional
inline ExperimentConfig parse_config(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(msg.str());
    }
    detail::reject_unknown_keys(root, "top level", {"experiment", "output"});
    const auto* exp = root["experiment"].as_table();
    if (!exp) throw ConfigError("missing [experiment] section");
    detail::reject_unknown_keys(*exp, "[experiment]",
                                {"algorithm", "ensemble", "n_list", "epsilon_list", "samples", "seed",
                                 "iteration_cap", "udsj_sweeps"});
    const toml::node_view<const toml::node> e{exp};

    ExperimentConfig cfg;
    const auto alg = detail::require_string(e["algorithm"], "algorithm");
    const auto a = algorithms::parse_algorithm(alg);
    if (!a) throw ConfigError("unknown algorithm '" + alg + "'");
    cfg.algorithm = *a;

    const auto ens = detail::require_string(e["ensemble"], "ensemble");
    const auto k = ensembles::parse_ensemble(ens);
    if (!k) throw ConfigError("unknown ensemble '" + ens + "'");
    cfg.ensemble.kind = *k;

    const auto* ns = e["n_list"].as_array();
    if (!ns) throw ConfigError("n_list must be an array of integers");
    for (const auto& node : *ns) {
        const auto v = node.value<std::int64_t>();
        if (!v || !node.is_integer() || *v < 0) throw ConfigError("n_list must contain nonnegative integers");
        cfg.n_list.push_back(static_cast<std::size_t>(*v));
    }
    const auto* eps = e["epsilon_list"].as_array();
    if (!eps) throw ConfigError("epsilon_list must be an array of numbers");
    for (const auto& node : *eps) {
        const auto v = node.value<double>();
        if (!v || !(node.is_floating_point() || node.is_integer()))
            throw ConfigError("epsilon_list must contain numbers");
        cfg.epsilon_list.push_back(*v);
    }
    cfg.samples = detail::require_positive_size(e["samples"], "samples");
    const auto seed = detail::require_int(e["seed"], "seed");
    if (seed < 0) throw ConfigError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (e["iteration_cap"]) cfg.iteration_cap = detail::require_positive_size(e["iteration_cap"], "iteration_cap");
    if (e["udsj_sweeps"]) {
        const auto s = detail::require_int(e["udsj_sweeps"], "udsj_sweeps");
        if (s < 0 || s > 100000000) throw ConfigError("udsj_sweeps out of range");
        cfg.ensemble.udsj_sweeps = static_cast<unsigned>(s);
    }

    if (const auto* out = root["output"].as_table()) {
        detail::reject_unknown_keys(*out, "[output]", {"path"});
        const toml::node_view<const toml::node> o{out};
        if (o["path"]) cfg.output_path = detail::require_string(o["path"], "output.path");
    } else if (root.contains("output")) {
        throw ConfigError("[output] must be a table");
    }
    cfg.validate();
    return cfg;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return ss.str();
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

}  // namespace deflab::harness
