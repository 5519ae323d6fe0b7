#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "latdecor/caseplan/caseplan.hpp"
#include "latdecor/core/flow.hpp"
#include "latdecor/core/index_set.hpp"
#include "latdecor/error.hpp"
#include "latdecor/montecarlo/affine.hpp"
#include "latdecor/montecarlo/observables.hpp"
#include "latdecor/testfns/trigpoly.hpp"
#include "latdecor/weights/weights.hpp"

namespace latdecor::cli {

/// Malformed or inconsistent experiment configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ExperimentKind { theta, sweep, integral, case_trace, affine, circle };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::theta: return "theta";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::integral: return "integral";
        case ExperimentKind::case_trace: return "case";
        case ExperimentKind::affine: return "affine";
        case ExperimentKind::circle: return "circle";
    }
    return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::theta, ExperimentKind::sweep, ExperimentKind::integral, ExperimentKind::case_trace,
                   ExperimentKind::affine, ExperimentKind::circle})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown kind '" + s + "'");
}

struct ThetaConfig {
    ThetaMode mode = ThetaMode::balanced;
};

struct SweepConfig {
    std::vector<Observable> observables;
    std::vector<FlowParam> base;
    std::vector<std::vector<double>> directions;
    std::vector<double> grid;
};

/// `joint` estimates the joint correlation at `flows` (r = 1 is the
/// nu-integral); `muI` estimates the mu_I integral of each observable at
/// horizon T; `haar` is `muI` on the full index set.
enum class IntegralTarget { joint, muI, haar };

inline std::string to_string(IntegralTarget t) {
    switch (t) {
        case IntegralTarget::joint: return "joint";
        case IntegralTarget::muI: return "muI";
        case IntegralTarget::haar: return "haar";
    }
    return "?";
}

struct IntegralConfig {
    IntegralTarget target = IntegralTarget::joint;
    std::vector<Observable> observables;
    std::vector<FlowParam> flows;
    std::optional<AdmissibleSet> set;
};

struct CaseConfig {
    std::vector<FlowParam> tuple;
    CasePlanConstants constants;
    bool overridden = false;
};

struct AffineConfig {
    AffineObservable phi;
    AffineObservable psi;
    std::vector<double> w;
    std::vector<double> lengths;
    int grid = 64;
    int fiber_points = 16;
};

struct CircleConfig {
    TrigPoly phi{1, 1};
    TrigPoly psi{1, 1};
    std::vector<double> lengths;
};

inline constexpr const char* kDefaultFormats[] = {"csv", "json"};

struct ExperimentConfig {
    std::string id;
    ExperimentKind kind = ExperimentKind::theta;
    int m = 1;
    int n = 1;
    int r = 1;
    std::optional<std::uint64_t> seed;
    std::uint64_t n_samples = 0;
    double horizon = kDefaultHorizon;
    std::filesystem::path output_dir;
    std::vector<std::string> formats;
    std::variant<ThetaConfig, SweepConfig, IntegralConfig, CaseConfig, AffineConfig, CircleConfig> body;
};

namespace detail {

inline std::string where(const toml::node& node) {
    const auto& src = node.source();
    return " (line " + std::to_string(src.begin.line) + ")";
}

inline const toml::node& need(const toml::table& t, std::string_view key, std::string_view ctx) {
    const toml::node* node = t.get(key);
    if (!node) throw ConfigError(std::string(ctx) + ": missing key '" + std::string(key) + "'");
    return *node;
}

inline double as_real(const toml::node& node, std::string_view what) {
    if (auto v = node.value<double>()) {
        if (!std::isfinite(*v)) throw ConfigError(std::string(what) + " must be finite" + where(node));
        return *v;
    }
    throw ConfigError(std::string(what) + " must be a number" + where(node));
}

inline std::int64_t as_int(const toml::node& node, std::string_view what) {
    if (const auto* v = node.as_integer()) return v->get();
    throw ConfigError(std::string(what) + " must be an integer" + where(node));
}

inline std::string as_string(const toml::node& node, std::string_view what) {
    if (const auto* v = node.as_string()) return v->get();
    throw ConfigError(std::string(what) + " must be a string" + where(node));
}

inline bool as_bool(const toml::node& node, std::string_view what) {
    if (const auto* v = node.as_boolean()) return v->get();
    throw ConfigError(std::string(what) + " must be a boolean" + where(node));
}

inline const toml::array& as_array(const toml::node& node, std::string_view what) {
    if (const auto* a = node.as_array()) return *a;
    throw ConfigError(std::string(what) + " must be an array" + where(node));
}

inline const toml::table& as_table(const toml::node& node, std::string_view what) {
    if (const auto* t = node.as_table()) return *t;
    throw ConfigError(std::string(what) + " must be a table" + where(node));
}

inline std::vector<double> real_list(const toml::node& node, std::string_view what) {
    std::vector<double> out;
    for (const auto& e : as_array(node, what)) out.push_back(as_real(e, what));
    return out;
}

inline std::vector<int> int_list(const toml::node& node, std::string_view what) {
    std::vector<int> out;
    for (const auto& e : as_array(node, what)) {
        const auto v = as_int(e, what);
        if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(std::string(what) + ": value out of range" + where(e));
        out.push_back(static_cast<int>(v));
    }
    return out;
}

inline double real_or(const toml::table& t, std::string_view key, double fallback) {
    const toml::node* node = t.get(key);
    return node ? as_real(*node, key) : fallback;
}

inline std::int64_t int_or(const toml::table& t, std::string_view key, std::int64_t fallback) {
    const toml::node* node = t.get(key);
    return node ? as_int(*node, key) : fallback;
}

inline BumpSpec parse_bump(const toml::table& t, int dim) {
    BumpSpec b;
    b.dim = dim;
    b.radius = real_or(t, "radius", b.radius);
    b.power = static_cast<int>(int_or(t, "power", b.power));
    b.amplitude = real_or(t, "amplitude", b.amplitude);
    b.validate();
    return b;
}

inline Observable parse_observable(const toml::table& t, int m, int n) {
    const std::string type = as_string(need(t, "type", "observable"), "observable type");
    if (type == "constant") return ConstantObservable{real_or(t, "value", 1.0)};
    if (type == "siegel") return SiegelObservable{parse_bump(t, m + n), real_or(t, "offset", 0.0)};
    if (type == "character") {
        CharacterObservable c;
        c.freq = int_list(need(t, "freq", "character observable"), "freq");
        if (const toml::node* p = t.get("part")) {
            const std::string part = as_string(*p, "part");
            if (part != "real" && part != "imag") throw ConfigError("character part must be 'real' or 'imag'");
            c.imaginary = part == "imag";
        }
        return c;
    }
    throw ConfigError("unknown observable type '" + type + "'");
}

inline std::vector<Observable> parse_observables(const toml::table& root, int m, int n) {
    std::vector<Observable> out;
    const auto& arr = as_array(need(root, "observables", "config"), "observables");
    for (const auto& e : arr) {
        Observable o = parse_observable(as_table(e, "observable"), m, n);
        validate(o, m, n);
        out.push_back(std::move(o));
    }
    if (out.empty()) throw ConfigError("observables: at least one observable is required");
    return out;
}

inline FlowParam parse_flow(const toml::node& node, int m, int n, std::string_view what) {
    return FlowParam(m, n, real_list(node, what));
}

inline AffineObservable parse_affine_observable(const toml::table& t) {
    const std::string type = as_string(need(t, "type", "affine observable"), "observable type");
    AffineObservable o;
    if (type == "constant") o = AffineConstant{real_or(t, "value", 1.0)};
    else if (type == "siegel") o = AffineSiegel{parse_bump(t, 2)};
    else if (type == "offset_bump") {
        OffsetBump b{parse_bump(t, 2), {0.5, 0.5}};
        if (const toml::node* c = t.get("center")) b.center = real_list(*c, "center");
        o = b;
    } else {
        throw ConfigError("unknown affine observable type '" + type + "'");
    }
    validate(o, 2);
    return o;
}

/// Coefficients as an array of [frequency, re, im] triples.
inline TrigPoly parse_trigpoly(const toml::node& node, std::string_view what) {
    TrigPoly p(1, 1);
    for (const auto& e : as_array(node, what)) {
        const auto& triple = as_array(e, what);
        if (triple.size() != 3) throw ConfigError(std::string(what) + ": expected [frequency, re, im]" + where(e));
        const auto k = as_int(*triple.get(0), what);
        if (k < -1000000 || k > 1000000) throw ConfigError(std::string(what) + ": frequency out of range");
        p.add({static_cast<int>(k)}, Complex(as_real(*triple.get(1), what), as_real(*triple.get(2), what)));
    }
    return p;
}

inline std::vector<FlowParam> parse_tuple_json(const nlohmann::json& j, int m, int n) {
    if (!j.is_array()) throw ConfigError("tuple file: expected a JSON list of coordinate vectors");
    std::vector<FlowParam> out;
    for (const auto& v : j) {
        if (!v.is_array()) throw ConfigError("tuple file: each entry must be a list of numbers");
        std::vector<double> c;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError("tuple file: coordinates must be numbers");
            c.push_back(x.get<double>());
        }
        out.emplace_back(m, n, std::move(c));
    }
    return out;
}

inline bool safe_id(const std::string& id) {
    if (id.empty() || id.size() > 128 || id[0] == '.') return false;
    for (char ch : id)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
    return true;
}

}  // namespace detail

/// Parses and validates a TOML experiment config. Relative paths (output_dir,
/// tuple files) resolve against `base_dir`. Every library-level domain or
/// invariant failure is reported as ConfigError.
inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                                     std::string_view source_name = "config") {
    using namespace detail;
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(os.str());
    }
    try {
        ExperimentConfig cfg;
        cfg.id = as_string(need(root, "id", "config"), "id");
        if (!safe_id(cfg.id)) throw ConfigError("id must be 1-128 characters of [A-Za-z0-9_.-], not starting with '.'");
        cfg.kind = parse_kind(as_string(need(root, "kind", "config"), "kind"));
        cfg.m = static_cast<int>(int_or(root, "m", 1));
        cfg.n = static_cast<int>(int_or(root, "n", 1));
        if (cfg.m < 1 || cfg.n < 1 || cfg.m + cfg.n > kMaxLatticeDim)
            throw ConfigError("m and n must be >= 1 with m + n <= " + std::to_string(kMaxLatticeDim));
        cfg.r = static_cast<int>(int_or(root, "r", 1));
        if (cfg.r < 1 || cfg.r > 16) throw ConfigError("r must lie in [1, 16]");
        if (const toml::node* s = root.get("seed")) {
            const auto v = as_int(*s, "seed");
            if (v < 0) throw ConfigError("seed must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(v);
        }
        const auto n_samples = int_or(root, "N", 0);
        if (n_samples < 0) throw ConfigError("N must be nonnegative");
        cfg.n_samples = static_cast<std::uint64_t>(n_samples);
        cfg.horizon = real_or(root, "T", kDefaultHorizon);
        if (!(cfg.horizon > 0.0)) throw ConfigError("T must be positive");

        cfg.output_dir = base_dir / std::filesystem::path(
                                        root.get("output_dir") ? as_string(*root.get("output_dir"), "output_dir") : "out");
        if (const toml::node* f = root.get("formats")) {
            for (const auto& e : as_array(*f, "formats")) {
                const std::string s = as_string(e, "formats");
                if (s != "csv" && s != "json" && s != "svg") throw ConfigError("unknown format '" + s + "'");
                cfg.formats.push_back(s);
            }
        } else {
            cfg.formats.assign(std::begin(kDefaultFormats), std::end(kDefaultFormats));
        }

        const bool stochastic = cfg.kind == ExperimentKind::sweep || cfg.kind == ExperimentKind::integral ||
                                cfg.kind == ExperimentKind::affine;
        if (stochastic) {
            if (!cfg.seed) throw ConfigError("seed is mandatory for kind '" + to_string(cfg.kind) + "'");
            if (cfg.n_samples < 2) throw ConfigError("N must be >= 2 for kind '" + to_string(cfg.kind) + "'");
        }

        switch (cfg.kind) {
            case ExperimentKind::theta: {
                ThetaConfig c;
                if (const toml::node* mode = root.get("mode")) {
                    const std::string s = as_string(*mode, "mode");
                    if (s == "balanced") c.mode = ThetaMode::balanced;
                    else if (s == "unbalanced") c.mode = ThetaMode::unbalanced;
                    else throw ConfigError("mode must be 'balanced' or 'unbalanced'");
                }
                cfg.body = c;
                break;
            }
            case ExperimentKind::sweep: {
                SweepConfig c;
                c.observables = parse_observables(root, cfg.m, cfg.n);
                const auto& flows = as_array(need(root, "flows", "sweep"), "flows");
                for (const auto& e : flows) {
                    const auto& t = as_table(e, "flows entry");
                    c.base.push_back(parse_flow(need(t, "base", "flows entry"), cfg.m, cfg.n, "base"));
                    c.directions.push_back(real_list(need(t, "direction", "flows entry"), "direction"));
                    if (static_cast<int>(c.directions.back().size()) != cfg.m + cfg.n)
                        throw ConfigError("direction must have m + n entries");
                }
                c.grid = real_list(need(root, "grid", "sweep"), "grid");
                if (c.grid.empty()) throw ConfigError("grid must be nonempty");
                if (static_cast<int>(c.observables.size()) != cfg.r || static_cast<int>(c.base.size()) != cfg.r)
                    throw ConfigError("sweep: need r observables and r flows");
                if (cfg.r < 2) throw ConfigError("sweep: r must be >= 2");
                cfg.body = std::move(c);
                break;
            }
            case ExperimentKind::integral: {
                IntegralConfig c;
                const std::string target = root.get("target") ? as_string(*root.get("target"), "target") : "joint";
                c.observables = parse_observables(root, cfg.m, cfg.n);
                if (target == "joint") {
                    c.target = IntegralTarget::joint;
                    const auto& flows = as_array(need(root, "flows", "integral"), "flows");
                    for (const auto& e : flows) c.flows.push_back(parse_flow(e, cfg.m, cfg.n, "flows"));
                    if (c.flows.size() != c.observables.size())
                        throw ConfigError("integral: need one flow per observable");
                } else if (target == "muI" || target == "haar") {
                    c.target = target == "muI" ? IntegralTarget::muI : IntegralTarget::haar;
                    if (c.target == IntegralTarget::muI) {
                        const auto labels = int_list(need(root, "set", "integral"), "set");
                        for (int l : labels)
                            if (l < 1 || l > cfg.m + cfg.n) throw ConfigError("set: index out of range");
                        c.set = AdmissibleSet::from_one_based(cfg.m, cfg.n, labels);
                    } else {
                        c.set = AdmissibleSet::full(cfg.m, cfg.n);
                    }
                } else {
                    throw ConfigError("target must be 'joint', 'muI' or 'haar'");
                }
                cfg.body = std::move(c);
                break;
            }
            case ExperimentKind::case_trace: {
                CaseConfig c;
                if (const toml::node* tuple = root.get("tuple")) {
                    for (const auto& e : as_array(*tuple, "tuple")) c.tuple.push_back(parse_flow(e, cfg.m, cfg.n, "tuple"));
                } else {
                    const auto file = base_dir / as_string(need(root, "tuple_file", "case"), "tuple_file");
                    std::ifstream in(file);
                    if (!in) throw ConfigError("cannot read tuple file " + file.string());
                    nlohmann::json j;
                    try {
                        in >> j;
                    } catch (const nlohmann::json::exception& e) {
                        throw ConfigError("tuple file " + file.string() + ": " + e.what());
                    }
                    c.tuple = parse_tuple_json(j, cfg.m, cfg.n);
                }
                if (static_cast<int>(c.tuple.size()) != cfg.r) throw ConfigError("case: the tuple must have r entries");
                if (cfg.r < 2) throw ConfigError("case: r must be >= 2");
                const toml::table empty;
                const toml::table& k = root.get("constants") ? as_table(*root.get("constants"), "constants") : empty;
                const int ell = static_cast<int>(int_or(k, "ell", 1));
                const double delta = real_or(k, "delta", 1.0);
                const double slack = real_or(k, "slack", 1.1);
                if (const toml::node* cs = k.get("c")) {
                    c.constants = {cfg.m, cfg.n, cfg.r, ell, delta, lambda_constant(cfg.r, ell, delta), real_list(*cs, "c")};
                    c.constants.validate_structure();
                    c.overridden = true;
                } else {
                    c.constants = recursion_constants(cfg.m, cfg.n, cfg.r, ell, delta, slack);
                }
                cfg.body = std::move(c);
                break;
            }
            case ExperimentKind::affine: {
                AffineConfig c;
                if (cfg.m != 1 || cfg.n != 1) throw ConfigError("affine: only the plane (m = n = 1) is supported");
                c.phi = parse_affine_observable(as_table(need(root, "phi", "affine"), "phi"));
                c.psi = parse_affine_observable(as_table(need(root, "psi", "affine"), "psi"));
                c.w = real_list(need(root, "w", "affine"), "w");
                if (c.w.size() != 2) throw ConfigError("affine: w must have 2 entries");
                c.lengths = real_list(need(root, "L", "affine"), "L");
                if (c.lengths.empty()) throw ConfigError("affine: L must be nonempty");
                c.grid = static_cast<int>(int_or(root, "grid", 64));
                c.fiber_points = static_cast<int>(int_or(root, "fiber_points", 16));
                if (c.grid < 1 || c.fiber_points < 1) throw ConfigError("affine: grid and fiber_points must be positive");
                cfg.body = std::move(c);
                break;
            }
            case ExperimentKind::circle: {
                CircleConfig c;
                c.phi = parse_trigpoly(need(root, "phi", "circle"), "phi");
                c.psi = parse_trigpoly(need(root, "psi", "circle"), "psi");
                c.lengths = real_list(need(root, "L", "circle"), "L");
                if (c.lengths.empty()) throw ConfigError("circle: L must be nonempty");
                for (double l : c.lengths)
                    if (!(l > 0.0)) throw ConfigError("circle: L must be positive");
                cfg.body = std::move(c);
                break;
            }
        }
        return cfg;
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const InvariantError& e) {
        throw ConfigError(e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path(),
                        path.string());
}

}  // namespace latdecor::cli
