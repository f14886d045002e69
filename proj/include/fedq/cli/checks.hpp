#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fedq/cli/config.hpp"

namespace fedq::cli {

/// exact: asserted in every mode. integer: holds for alpha = 1 only; reported
/// without being asserted for alpha < 1 in diagnostic mode.
enum class Tier { exact, integer };

inline const char* to_string(Tier t) { return t == Tier::exact ? "exact" : "integer"; }

struct CheckDef {
    std::string name;
    std::string suite;
    Tier tier;
    double threshold;
    bool term_level; ///< exact checks decided by term-level cancellation rather than by value
};

inline const std::vector<CheckDef>& check_catalog() {
    static const std::vector<CheckDef> defs = {
        {"caputo_power_rule", "caputo", Tier::exact, 1e-6, false},
        {"caputo_constant", "caputo", Tier::exact, 0.0, true},

        {"metric_inverse", "geometry", Tier::exact, 0.0, true},
        {"metric_compatibility", "geometry", Tier::exact, 0.0, true},
        {"j_compatibility", "geometry", Tier::exact, 0.0, true},
        {"j_square", "geometry", Tier::exact, 0.0, true},
        {"theta_metric", "geometry", Tier::exact, 0.0, true},
        {"torsion_pure_blocks", "geometry", Tier::exact, 0.0, true},
        {"curvature_antisymmetry", "geometry", Tier::exact, 0.0, true},
        {"anholonomy_brackets", "geometry", Tier::integer, 1e-8, false},
        {"nijenhuis_torsion", "geometry", Tier::integer, 1e-8, false},

        {"delta_squared", "algebra", Tier::exact, 1e-12, false},
        {"hodge_identity", "algebra", Tier::exact, 1e-12, false},
        {"delta_derivation", "algebra", Tier::exact, 1e-12, false},
        {"wick_associativity", "algebra", Tier::exact, 1e-12, false},
        {"graded_jacobi", "algebra", Tier::exact, 1e-12, false},

        {"dconn_delta_commutator", "fedosov", Tier::integer, 1e-8, false},
        {"dconn_square", "fedosov", Tier::integer, 1e-8, false},
        {"delta_torsion", "fedosov", Tier::integer, 1e-8, false},
        {"delta_curvature", "fedosov", Tier::integer, 1e-8, false},
        {"fedosov_equation", "fedosov", Tier::integer, 1e-9, false},
        {"flat_connection_square", "fedosov", Tier::integer, 1e-8, false},
        {"tau_flatness", "fedosov", Tier::integer, 1e-8, false},
        {"sigma_tau", "fedosov", Tier::exact, 0.0, true},
        {"star_c0", "fedosov", Tier::exact, 0.0, true},
        {"star_unit", "fedosov", Tier::exact, 0.0, true},
        {"star_commutator", "fedosov", Tier::integer, 1e-8, false},
        {"star_associativity", "fedosov", Tier::integer, 1e-8, false},

        {"chern_weyl_closed", "chern", Tier::integer, 1e-8, false},
        {"lemma_assembly", "chern", Tier::integer, 1e-8, false},
    };
    return defs;
}

inline const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& d : check_catalog()) out.push_back(d.name);
        return out;
    }();
    return names;
}

inline const CheckDef& check_def(const std::string& name) {
    for (const auto& d : check_catalog())
        if (d.name == name) return d;
    throw ConfigError("unknown check " + name);
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"caputo", "geometry", "algebra", "fedosov", "chern"};
    return names;
}

/// What a check measured. `term_zero` is set by term-level checks.
struct Measurement {
    double value = 0.0;
    std::optional<bool> term_zero;
    std::string detail;
};

struct CheckResult {
    std::string name;
    std::string suite;
    Tier tier = Tier::exact;
    double value = 0.0;
    double threshold = 0.0;
    std::string status = "not_run"; ///< pass | fail | diagnostic | not_run
    std::string detail;
};

inline double threshold_for(const CheckDef& def, const RunSpec& spec) {
    auto it = spec.tolerances.find(def.name);
    return it == spec.tolerances.end() ? def.threshold : it->second;
}

inline CheckResult judge(const CheckDef& def, const Measurement& m, const RunSpec& spec) {
    CheckResult r{def.name, def.suite, def.tier, m.value, threshold_for(def, spec), "fail", m.detail};
    bool ok = std::isfinite(m.value) && m.value <= r.threshold;
    if (def.term_level) {
        const bool overridden = spec.tolerances.count(def.name) > 0;
        ok = m.term_zero.value_or(false) || (overridden && ok);
    }
    if (def.tier == Tier::integer && spec.alpha < 1.0 && spec.mode == Mode::diagnostic) r.status = "diagnostic";
    else r.status = ok ? "pass" : "fail";
    return r;
}

} // namespace fedq::cli
