#pragma once

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fedq/chern/forms.hpp"
#include "fedq/cli/checks.hpp"

namespace fedq::cli {

using OJson = nlohmann::ordered_json;

inline constexpr const char* kEngineVersion = "1.0.0";

/// Signomial as [{"re", "im", "exp"}] in canonical term order.
inline OJson terms_json(const Signomial& s) {
    OJson out = OJson::array();
    for (const auto& t : s.terms()) {
        OJson exps = OJson::array();
        for (double e : t.exps) exps.push_back(e);
        out.push_back({{"re", t.coeff.real()}, {"im", t.coeff.imag()}, {"exp", std::move(exps)}});
    }
    return out;
}

inline Signomial signomial_from_json(const OJson& j, std::size_t dim) {
    std::vector<expr::Term> raw;
    for (const auto& t : j) {
        expr::Exponents e;
        for (const auto& x : t.at("exp")) e.push_back(x.get<double>());
        raw.push_back({{t.at("re").get<double>(), t.at("im").get<double>()}, std::move(e)});
    }
    return Signomial::from_terms(dim, std::move(raw));
}

inline OJson form_json(const chern::AdaptedForm& f) {
    OJson comps = OJson::array();
    for (const auto& [mask, c] : f.components) {
        OJson idx = OJson::array();
        for (auto i : forms::indices(mask)) idx.push_back(i);
        comps.push_back({{"indices", std::move(idx)}, {"terms", terms_json(c)}});
    }
    return {{"degree", f.degree}, {"components", std::move(comps)}};
}

/// Everything one pipeline invocation produced. Sections stay null when their
/// stage did not run.
struct Report {
    OJson config;
    OJson geometry;
    OJson fedosov;
    OJson star;
    OJson chern;
    std::vector<CheckResult> invariants;
    int exit_code = 0;
    std::string error;
    std::string failed_stage;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<std::string> failed_checks() const {
        std::vector<std::string> out;
        for (const auto& c : invariants)
            if (c.status == "fail") out.push_back(c.name);
        return out;
    }
};

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline OJson to_json(const Report& r) {
    OJson inv = OJson::array();
    for (const auto& c : r.invariants) {
        OJson e;
        e["name"] = c.name;
        e["suite"] = c.suite;
        e["tier"] = to_string(c.tier);
        e["value"] = std::isfinite(c.value) ? OJson(c.value) : OJson(nullptr);
        e["threshold"] = c.threshold;
        e["status"] = c.status;
        if (!c.detail.empty()) e["detail"] = c.detail;
        inv.push_back(std::move(e));
    }
    OJson out;
    out["config"] = r.config;
    out["geometry"] = r.geometry;
    out["fedosov"] = r.fedosov;
    out["star"] = r.star;
    out["chern"] = r.chern;
    out["invariants"] = std::move(inv);
    OJson status;
    status["exit_code"] = r.exit_code;
    status["failed_checks"] = r.failed_checks();
    status["error"] = r.error.empty() ? OJson(nullptr) : OJson(r.error);
    status["failed_stage"] = r.failed_stage.empty() ? OJson(nullptr) : OJson(r.failed_stage);
    out["status"] = std::move(status);
    out["provenance"] = {{"config_hash", "fnv1a64:" + hex64(r.config_hash)},
                         {"seed", r.seed},
                         {"engine", "fedq"},
                         {"engine_version", kEngineVersion}};
    return out;
}

inline std::string format_value(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string to_text(const Report& r) {
    std::ostringstream os;
    const auto& c = r.config;
    os << "fedq " << kEngineVersion << "  alpha=" << c.value("alpha", 0.0) << " n=" << c.value("n", 0)
       << " order=" << c.value("truncation_order", 0) << " mode=" << c.value("mode", std::string())
       << " seed=" << r.seed << "\n";
    os << "config hash fnv1a64:" << hex64(r.config_hash) << "\n";
    if (!r.fedosov.is_null()) {
        os << "fedosov: solved through degree " << r.fedosov.value("solved_degree", 0) << " of "
           << r.fedosov.value("requested_degree", 0) << "\n";
        const auto reason = r.fedosov.value("stop_reason", OJson(nullptr));
        if (reason.is_string()) os << "  stopped: " << reason.get<std::string>() << "\n";
        os << "  degree  residual\n";
        for (const auto& d : r.fedosov["residuals"]) {
            char line[64];
            std::snprintf(line, sizeof line, "  %6d  %s\n", d["degree"].get<int>(),
                          format_value(d["value"].is_null() ? NAN : d["value"].get<double>()).c_str());
            os << line;
        }
    }
    if (!r.star.is_null())
        os << "star: " << r.star["coefficients"].size() << " coefficients, complete through order "
           << r.star.value("complete_order", 0) << "\n";
    os << "invariants:\n";
    for (const auto& inv : r.invariants) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-24s %-9s %-8s %-10s %-10s %s\n", inv.name.c_str(), inv.suite.c_str(),
                      to_string(inv.tier), format_value(inv.value).c_str(), format_value(inv.threshold).c_str(),
                      inv.status.c_str());
        os << line;
    }
    if (!r.error.empty()) os << "error (" << r.failed_stage << "): " << r.error << "\n";
    os << "exit code " << r.exit_code << "\n";
    return os.str();
}

enum class Format { json, text };

inline std::string emit_report(const Report& r, Format f) {
    if (f == Format::text) return to_text(r);
    return to_json(r).dump(2) + "\n";
}

} // namespace fedq::cli
