#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fedq/errors.hpp"
#include "fedq/geometry/metric.hpp"

namespace fedq::cli {

using Json = nlohmann::json;
using geometry::Point;
using expr::Signomial;

enum class Mode { strict, diagnostic };

inline const char* to_string(Mode m) { return m == Mode::strict ? "strict" : "diagnostic"; }

/// Validated run configuration.
struct RunSpec {
    double alpha = 1.0;
    int n = 1;
    Signomial lagrangian;
    int truncation_order = 2;
    Signomial f;
    Signomial g;
    std::vector<Point> sample_points;
    Mode mode = Mode::strict;
    std::map<std::string, double> tolerances; ///< overrides of default thresholds
    std::uint64_t seed = 0;
    std::string canonical; ///< canonical JSON text of the parsed config, for hashing

    [[nodiscard]] expr::AlphaContext ctx() const { return {alpha, n}; }
    [[nodiscard]] geometry::LagrangianSpec lagrangian_spec() const { return {lagrangian, ctx()}; }
};

namespace detail {

[[noreturn]] inline void fail(const std::string& pointer, const std::string& what) {
    throw ConfigError((pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

inline double number_at(const Json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
}

inline long long integer_at(const Json& j, const std::string& ptr) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long long>();
}

inline const Json& field(const Json& obj, const std::string& key, const std::string& ptr) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ptr, "missing required field \"" + key + "\"");
    return *it;
}

/// [{"c": number | [re, im], "exp": [2n numbers]}, ...]
inline Signomial term_list(const Json& j, std::size_t dim, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array of terms");
    std::vector<expr::Term> raw;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string tp = ptr + "/" + std::to_string(k);
        const Json& t = j[k];
        if (!t.is_object()) fail(tp, "expected an object with fields \"c\" and \"exp\"");
        const Json& c = field(t, "c", tp);
        expr::Complex coeff;
        if (c.is_array()) {
            if (c.size() != 2) fail(tp + "/c", "expected [re, im]");
            coeff = {number_at(c[0], tp + "/c/0"), number_at(c[1], tp + "/c/1")};
        } else {
            coeff = number_at(c, tp + "/c");
        }
        const Json& e = field(t, "exp", tp);
        if (!e.is_array() || e.size() != dim)
            fail(tp + "/exp", "expected an array of " + std::to_string(dim) + " exponents");
        expr::Exponents exps(dim);
        for (std::size_t i = 0; i < dim; ++i) exps[i] = number_at(e[i], tp + "/exp/" + std::to_string(i));
        raw.push_back({coeff, std::move(exps)});
    }
    return Signomial::from_terms(dim, std::move(raw));
}

inline std::vector<Point> default_sample_points(int n) {
    static const double base[5][8] = {
        {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, {0.7, 1.3, 1.1, 0.9, 1.2, 0.8, 1.4, 0.6},
        {1.5, 0.6, 0.8, 1.7, 0.9, 1.1, 0.7, 1.3}, {0.9, 1.8, 1.3, 0.5, 1.6, 0.7, 1.2, 0.9},
        {1.2, 0.8, 1.6, 1.2, 0.6, 1.5, 0.9, 1.1},
    };
    std::vector<Point> out;
    for (const auto& row : base) out.emplace_back(row, row + 2 * n);
    return out;
}

} // namespace detail

/// Names accepted in the "tolerances" map.
const std::vector<std::string>& check_names();

inline RunSpec parse_config(const Json& j) {
    using namespace detail;
    if (!j.is_object()) fail("", "configuration must be a JSON object");
    RunSpec s;
    s.alpha = number_at(field(j, "alpha", ""), "/alpha");
    if (!(s.alpha > 0.0 && s.alpha <= 1.0)) fail("/alpha", "alpha out of range (0, 1]");
    const long long n = integer_at(field(j, "n", ""), "/n");
    if (n < 1 || n > 4) fail("/n", "n must be between 1 and 4");
    s.n = static_cast<int>(n);
    const std::size_t dim = 2 * static_cast<std::size_t>(n);
    try {
        s.lagrangian = term_list(field(j, "lagrangian", ""), dim, "/lagrangian");
    } catch (const MalformedInput& e) {
        fail("/lagrangian", e.what());
    }
    if (s.lagrangian.is_zero()) fail("/lagrangian", "lagrangian must be non-zero");

    if (auto it = j.find("truncation_order"); it != j.end()) {
        const long long k = integer_at(*it, "/truncation_order");
        if (k < 2 || k > 8) fail("/truncation_order", "truncation order must be between 2 and 8");
        s.truncation_order = static_cast<int>(k);
    }

    s.f = Signomial::variable(dim, 0);
    s.g = Signomial::variable(dim, static_cast<std::size_t>(n));
    if (auto it = j.find("observables"); it != j.end()) {
        if (!it->is_object()) fail("/observables", "expected an object with fields \"f\" and \"g\"");
        s.f = term_list(field(*it, "f", "/observables"), dim, "/observables/f");
        s.g = term_list(field(*it, "g", "/observables"), dim, "/observables/g");
    }

    if (auto it = j.find("sample_points"); it != j.end()) {
        if (!it->is_array() || it->empty()) fail("/sample_points", "expected a non-empty array of points");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string pp = "/sample_points/" + std::to_string(k);
            const Json& p = (*it)[k];
            if (!p.is_array() || p.size() != dim) fail(pp, "expected " + std::to_string(dim) + " coordinates");
            Point pt(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                pt[i] = number_at(p[i], pp + "/" + std::to_string(i));
                if (!(pt[i] > 0.0)) fail(pp + "/" + std::to_string(i), "sample point coordinates must be > 0");
            }
            s.sample_points.push_back(std::move(pt));
        }
    } else {
        s.sample_points = default_sample_points(s.n);
    }

    if (auto it = j.find("mode"); it != j.end()) {
        if (!it->is_string()) fail("/mode", "expected \"strict\" or \"diagnostic\"");
        const auto m = it->get<std::string>();
        if (m == "strict") s.mode = Mode::strict;
        else if (m == "diagnostic") s.mode = Mode::diagnostic;
        else fail("/mode", "expected \"strict\" or \"diagnostic\", got \"" + m + "\"");
    }

    if (auto it = j.find("tolerances"); it != j.end()) {
        if (!it->is_object()) fail("/tolerances", "expected an object mapping check names to thresholds");
        const auto& names = check_names();
        for (const auto& [name, value] : it->items()) {
            const std::string tp = "/tolerances/" + name;
            if (std::find(names.begin(), names.end(), name) == names.end()) fail(tp, "unknown check name");
            const double v = number_at(value, tp);
            if (!(v >= 0.0)) fail(tp, "threshold must be >= 0");
            s.tolerances[name] = v;
        }
    }

    if (auto it = j.find("seed"); it != j.end()) {
        const long long seed = integer_at(*it, "/seed");
        if (seed < 0) fail("/seed", "seed must be non-negative");
        s.seed = static_cast<std::uint64_t>(seed);
    }
    s.canonical = j.dump();
    return s;
}

inline RunSpec parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("/: malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace fedq::cli
