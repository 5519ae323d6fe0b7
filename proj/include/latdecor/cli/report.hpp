#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "latdecor/caseplan/caseplan.hpp"
#include "latdecor/cli/config.hpp"
#include "latdecor/montecarlo/affine.hpp"
#include "latdecor/montecarlo/circle.hpp"
#include "latdecor/montecarlo/correlation.hpp"
#include "latdecor/weights/weights.hpp"

namespace latdecor::cli {

using nlohmann::json;

struct ThetaReport {
    int m = 1;
    int n = 1;
    ThetaMode mode = ThetaMode::balanced;
    std::vector<WeightCertificate> rows;
    friend bool operator==(const ThetaReport&, const ThetaReport&) = default;
};

struct SweepReport {
    std::string id;
    SweepResult sweep;
    friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

struct IntegralRow {
    std::string label;
    Estimate estimate;
    std::vector<FlowParam> ts;
    friend bool operator==(const IntegralRow&, const IntegralRow&) = default;
};

struct IntegralReport {
    std::string id;
    IntegralTarget target = IntegralTarget::joint;
    double horizon = 0.0;
    std::optional<IndexSet> set;
    std::vector<IntegralRow> rows;
    friend bool operator==(const IntegralReport&, const IntegralReport&) = default;
};

struct CaseReport {
    std::string id;
    CasePlanConstants constants;
    bool overridden = false;
    std::vector<FlowParam> tuple;
    CaseTrace trace;
    friend bool operator==(const CaseReport&, const CaseReport&) = default;
};

struct AffineRow {
    double length = 0.0;
    AffineResult result;
    friend bool operator==(const AffineRow&, const AffineRow&) = default;
};

struct AffineReport {
    std::string id;
    std::vector<double> w;
    double horizon = 0.0;
    std::vector<AffineRow> rows;
    friend bool operator==(const AffineReport&, const AffineReport&) = default;
};

struct CircleRow {
    double length = 0.0;
    CircleResult result;
    double gap_bound = 0.0;
    double l2_bound = 0.0;
    friend bool operator==(const CircleRow&, const CircleRow&) = default;
};

struct CircleReport {
    std::string id;
    std::vector<CircleRow> rows;
    friend bool operator==(const CircleReport&, const CircleReport&) = default;
};

using Report = std::variant<ThetaReport, SweepReport, IntegralReport, CaseReport, AffineReport, CircleReport>;

// ---------------------------------------------------------------------------
// Formatting helpers

/// Decimal with 17 significant digits; enough to round-trip any double.
inline std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

/// Doubles as JSON numbers; NaN and infinities (never produced except as a
/// missing fit) become null.
inline json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
inline double real(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline json rationals(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(to_fraction_string(q));
    return a;
}
inline std::vector<Rational> rationals(const json& j) {
    std::vector<Rational> v;
    for (const auto& e : j) v.push_back(parse_fraction(e.get<std::string>()));
    return v;
}

inline json indices(const IndexSet& s) {
    json a = json::array();
    for (int i : s.indices()) a.push_back(i + 1);
    return a;
}
inline IndexSet indices(const json& j, int dim) { return IndexSet::from_one_based(dim, j.get<std::vector<int>>()); }

inline json flows(const std::vector<FlowParam>& ts) {
    json a = json::array();
    for (const auto& t : ts) {
        json v = json::array();
        for (double c : t.coords()) v.push_back(c);
        a.push_back(v);
    }
    return a;
}
inline std::vector<FlowParam> flows(const json& j, int m, int n) {
    std::vector<FlowParam> ts;
    for (const auto& v : j) ts.emplace_back(m, n, v.get<std::vector<double>>());
    return ts;
}

inline json estimate(const Estimate& e) {
    return {{"mean", real(e.mean)},
            {"stderr", real(e.std_error)},
            {"n_samples", e.n_samples},
            {"seed", e.seed},
            {"max_sample", real(e.max_sample)}};
}
inline Estimate estimate(const json& j) {
    Estimate e;
    e.mean = real(j.at("mean"));
    e.std_error = real(j.at("stderr"));
    e.n_samples = j.at("n_samples").get<std::uint64_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.max_sample = real(j.at("max_sample"));
    return e;
}

inline json complex(Complex z) { return json::array({real(z.real()), real(z.imag())}); }
inline Complex complex(const json& j) { return {real(j.at(0)), real(j.at(1))}; }

inline std::string side_name(Side s) { return to_string(s); }
inline Side side_from(const std::string& s) {
    if (s == "case1") return Side::case1;
    if (s == "case2") return Side::case2;
    throw ConfigError("unknown side '" + s + "'");
}

inline CaseTag tag_from(const std::string& s) {
    for (auto t : {CaseTag::one_prime, CaseTag::one_double_prime, CaseTag::two})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown case tag '" + s + "'");
}

inline const char* terminal_name(Terminal t) { return t == Terminal::degenerate ? "degenerate" : "case_1_prime"; }

}  // namespace detail

inline json to_json(const ThetaReport& r) {
    json rows = json::array();
    for (const auto& c : r.rows)
        rows.push_back({{"I1", detail::indices(c.i1)},
                        {"I2", detail::indices(c.i2)},
                        {"theta_star", to_fraction_string(c.theta_star)},
                        {"witness_s", detail::rationals(c.witness_s)},
                        {"witness_t", detail::rationals(c.witness_t)},
                        {"weight", {c.achieving_weight.i + 1, c.achieving_weight.j + 1}},
                        {"side", detail::side_name(c.achieving_side)},
                        {"lp_primal", detail::rationals(c.lp_primal)},
                        {"lp_dual", detail::rationals(c.lp_dual)}});
    return {{"kind", "theta"}, {"m", r.m}, {"n", r.n}, {"mode", to_string(r.mode)}, {"rows", rows}};
}

inline json to_json(const SweepReport& r) {
    json rows = json::array();
    for (const auto& row : r.sweep.rows)
        rows.push_back({{"delta", detail::real(row.delta)},
                        {"gap", detail::real(row.gap)},
                        {"stderr", detail::real(row.std_error)},
                        {"n", row.n},
                        {"seed", row.seed},
                        {"t_vectors", detail::flows(row.ts)},
                        {"max_sample", detail::real(row.max_sample)},
                        {"noise_limited", row.noise_limited()}});
    const auto& f = r.sweep.fit;
    const int m = r.sweep.rows.empty() ? 1 : r.sweep.rows[0].ts[0].m();
    const int n = r.sweep.rows.empty() ? 1 : r.sweep.rows[0].ts[0].n();
    return {{"kind", "sweep"},
            {"id", r.id},
            {"m", m},
            {"n", n},
            {"rows", rows},
            {"fit",
             {{"available", f.available},
              {"fitted_eta", detail::real(f.eta)},
              {"fit_stderr", detail::real(f.std_error)},
              {"intercept", detail::real(f.intercept)},
              {"rows_used", f.rows_used}}}};
}

inline json to_json(const IntegralReport& r) {
    json rows = json::array();
    int m = 1, n = 1;
    for (const auto& row : r.rows) {
        if (!row.ts.empty()) m = row.ts[0].m(), n = row.ts[0].n();
        rows.push_back({{"label", row.label}, {"estimate", detail::estimate(row.estimate)}, {"t_vectors", detail::flows(row.ts)}});
    }
    json j = {{"kind", "integral"},
              {"id", r.id},
              {"target", to_string(r.target)},
              {"m", m},
              {"n", n},
              {"T", detail::real(r.horizon)},
              {"rows", rows}};
    j["set"] = r.set ? detail::indices(*r.set) : json(nullptr);
    return j;
}

inline json to_json(const CaseReport& r) {
    const auto& k = r.constants;
    json steps = json::array();
    for (const auto& s : r.trace.steps) {
        json sets = json::array(), enl = json::array(), factors = json::array();
        for (int f : s.factors) factors.push_back(f + 1);
        for (const auto& i : s.sets) sets.push_back(detail::indices(i));
        for (const auto& i : s.enlargements) enl.push_back(detail::indices(i));
        steps.push_back({{"level", s.level},
                         {"case", to_string(s.tag)},
                         {"factors", factors},
                         {"sets", sets},
                         {"enlargements", enl},
                         {"restart", s.restart},
                         {"multiplier", detail::real(s.multiplier)},
                         {"absorbed", s.absorbed >= 0 ? json(s.absorbed + 1) : json(nullptr)}});
    }
    return {{"kind", "case"},
            {"id", r.id},
            {"constants",
             {{"m", k.m}, {"n", k.n}, {"r", k.r}, {"ell", k.ell}, {"delta", detail::real(k.delta)},
              {"lambda", detail::real(k.lambda)}, {"c", k.c}, {"overridden", r.overridden}}},
            {"tuple", detail::flows(r.tuple)},
            {"trace",
             {{"delta", detail::real(r.trace.delta)},
              {"terminal", detail::terminal_name(r.trace.terminal)},
              {"terminal_level", r.trace.terminal_level},
              {"max_restarts", r.trace.max_restarts},
              {"steps", steps}}}};
}

inline json to_json(const AffineReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"L", detail::real(row.length)},
                        {"correlation", detail::estimate(row.result.correlation)},
                        {"main_term", detail::estimate(row.result.main_term)},
                        {"gap", detail::estimate(row.result.gap)},
                        {"scale", detail::real(row.result.scale)}});
    return {{"kind", "affine"}, {"id", r.id}, {"w", r.w}, {"T", detail::real(r.horizon)}, {"rows", rows}};
}

inline json to_json(const CircleReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"L", detail::real(row.length)},
                        {"value", detail::complex(row.result.value)},
                        {"main_term", detail::complex(row.result.main_term)},
                        {"gap", detail::complex(row.result.gap)},
                        {"gap_bound", detail::real(row.gap_bound)},
                        {"l2_bound", detail::real(row.l2_bound)}});
    return {{"kind", "circle"}, {"id", r.id}, {"rows", rows}};
}

inline json to_json(const Report& r) {
    return std::visit([](const auto& x) { return to_json(x); }, r);
}

/// Inverse of to_json. Throws ConfigError on unknown kinds or missing fields.
inline Report report_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "theta") {
            ThetaReport r;
            r.m = j.at("m").get<int>();
            r.n = j.at("n").get<int>();
            r.mode = j.at("mode").get<std::string>() == "balanced" ? ThetaMode::balanced : ThetaMode::unbalanced;
            const int d = r.m + r.n;
            for (const auto& e : j.at("rows")) {
                WeightCertificate c;
                c.m = r.m;
                c.n = r.n;
                c.mode = r.mode;
                c.i1 = detail::indices(e.at("I1"), d);
                c.i2 = detail::indices(e.at("I2"), d);
                c.theta_star = parse_fraction(e.at("theta_star").get<std::string>());
                c.witness_s = detail::rationals(e.at("witness_s"));
                c.witness_t = detail::rationals(e.at("witness_t"));
                c.achieving_weight = {e.at("weight").at(0).get<int>() - 1, e.at("weight").at(1).get<int>() - 1};
                c.achieving_side = detail::side_from(e.at("side").get<std::string>());
                c.lp_primal = detail::rationals(e.at("lp_primal"));
                c.lp_dual = detail::rationals(e.at("lp_dual"));
                r.rows.push_back(std::move(c));
            }
            return r;
        }
        if (kind == "sweep") {
            SweepReport r;
            r.id = j.at("id").get<std::string>();
            const int m = j.at("m").get<int>(), n = j.at("n").get<int>();
            for (const auto& e : j.at("rows")) {
                SweepRow row;
                row.delta = detail::real(e.at("delta"));
                row.gap = detail::real(e.at("gap"));
                row.std_error = detail::real(e.at("stderr"));
                row.n = e.at("n").get<std::uint64_t>();
                row.seed = e.at("seed").get<std::uint64_t>();
                row.ts = detail::flows(e.at("t_vectors"), m, n);
                row.max_sample = detail::real(e.at("max_sample"));
                r.sweep.rows.push_back(std::move(row));
            }
            const auto& f = j.at("fit");
            r.sweep.fit.available = f.at("available").get<bool>();
            r.sweep.fit.eta = detail::real(f.at("fitted_eta"));
            r.sweep.fit.std_error = detail::real(f.at("fit_stderr"));
            r.sweep.fit.intercept = detail::real(f.at("intercept"));
            r.sweep.fit.rows_used = f.at("rows_used").get<int>();
            return r;
        }
        if (kind == "integral") {
            IntegralReport r;
            r.id = j.at("id").get<std::string>();
            const std::string target = j.at("target").get<std::string>();
            r.target = target == "joint" ? IntegralTarget::joint
                       : target == "muI" ? IntegralTarget::muI
                                         : IntegralTarget::haar;
            r.horizon = detail::real(j.at("T"));
            const int m = j.at("m").get<int>(), n = j.at("n").get<int>();
            if (!j.at("set").is_null()) r.set = detail::indices(j.at("set"), m + n);
            for (const auto& e : j.at("rows"))
                r.rows.push_back({e.at("label").get<std::string>(), detail::estimate(e.at("estimate")),
                                  detail::flows(e.at("t_vectors"), m, n)});
            return r;
        }
        if (kind == "case") {
            CaseReport r;
            r.id = j.at("id").get<std::string>();
            const auto& k = j.at("constants");
            r.constants.m = k.at("m").get<int>();
            r.constants.n = k.at("n").get<int>();
            r.constants.r = k.at("r").get<int>();
            r.constants.ell = k.at("ell").get<int>();
            r.constants.delta = detail::real(k.at("delta"));
            r.constants.lambda = detail::real(k.at("lambda"));
            r.constants.c = k.at("c").get<std::vector<double>>();
            r.overridden = k.at("overridden").get<bool>();
            const int m = r.constants.m, n = r.constants.n, d = m + n;
            r.tuple = detail::flows(j.at("tuple"), m, n);
            const auto& t = j.at("trace");
            r.trace.delta = detail::real(t.at("delta"));
            r.trace.terminal = t.at("terminal").get<std::string>() == "degenerate" ? Terminal::degenerate
                                                                                  : Terminal::case_one_prime;
            r.trace.terminal_level = t.at("terminal_level").get<int>();
            r.trace.max_restarts = t.at("max_restarts").get<int>();
            for (const auto& e : t.at("steps")) {
                CaseStep s;
                s.level = e.at("level").get<int>();
                s.tag = detail::tag_from(e.at("case").get<std::string>());
                for (const auto& f : e.at("factors")) s.factors.push_back(f.get<int>() - 1);
                for (const auto& i : e.at("sets")) s.sets.push_back(detail::indices(i, d));
                for (const auto& i : e.at("enlargements")) s.enlargements.push_back(detail::indices(i, d));
                s.restart = e.at("restart").get<int>();
                s.multiplier = detail::real(e.at("multiplier"));
                s.absorbed = e.at("absorbed").is_null() ? -1 : e.at("absorbed").get<int>() - 1;
                r.trace.steps.push_back(std::move(s));
            }
            return r;
        }
        if (kind == "affine") {
            AffineReport r;
            r.id = j.at("id").get<std::string>();
            r.w = j.at("w").get<std::vector<double>>();
            r.horizon = detail::real(j.at("T"));
            for (const auto& e : j.at("rows")) {
                AffineRow row;
                row.length = detail::real(e.at("L"));
                row.result.correlation = detail::estimate(e.at("correlation"));
                row.result.main_term = detail::estimate(e.at("main_term"));
                row.result.gap = detail::estimate(e.at("gap"));
                row.result.scale = detail::real(e.at("scale"));
                r.rows.push_back(row);
            }
            return r;
        }
        if (kind == "circle") {
            CircleReport r;
            r.id = j.at("id").get<std::string>();
            for (const auto& e : j.at("rows")) {
                CircleRow row;
                row.length = detail::real(e.at("L"));
                row.result.value = detail::complex(e.at("value"));
                row.result.main_term = detail::complex(e.at("main_term"));
                row.result.gap = detail::complex(e.at("gap"));
                row.gap_bound = detail::real(e.at("gap_bound"));
                row.l2_bound = detail::real(e.at("l2_bound"));
                r.rows.push_back(row);
            }
            return r;
        }
        throw ConfigError("unknown report kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report JSON: ") + e.what());
    }
}

namespace detail {

// nlohmann prints the shortest round-trip form; the report format fixes 17
// significant digits, so floats are written here and everything else is
// delegated to dump().
inline void write_json(const json& j, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    if (j.is_number_float()) {
        const double x = j.get<double>();
        out += std::isfinite(x) ? fmt17(x) : "null";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write_json(j[i], indent + 1, out);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += inner;
            write_json(j[i], indent + 1, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "]";
    } else if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += inner + json(it.key()).dump() + ": ";
            write_json(it.value(), indent + 1, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "}";
    } else {
        out += j.dump();
    }
}

}  // namespace detail

/// Pretty JSON with a trailing newline; floats carry 17 significant digits.
inline std::string emit_json(const json& j) {
    std::string out;
    detail::write_json(j, 0, out);
    return out + "\n";
}
inline std::string emit_json(const Report& r) { return emit_json(to_json(r)); }

// ---------------------------------------------------------------------------
// CSV

inline const std::vector<std::string>& theta_csv_header() {
    static const std::vector<std::string> h{"m", "n", "I1", "I2", "theta_star", "witness_s", "witness_t",
                                            "weight_i", "weight_j", "side"};
    return h;
}
inline const std::vector<std::string>& sweep_csv_header() {
    static const std::vector<std::string> h{"experiment_id", "delta", "gap", "stderr", "n", "seed", "t_vectors",
                                            "max_sample"};
    return h;
}
inline const std::vector<std::string>& integral_csv_header() {
    static const std::vector<std::string> h{"experiment_id", "target", "label", "mean", "stderr", "n", "seed",
                                            "t_vectors", "max_sample"};
    return h;
}
inline const std::vector<std::string>& case_csv_header() {
    static const std::vector<std::string> h{"experiment_id", "step", "level", "case", "restart", "multiplier",
                                            "factors", "sets", "enlargements", "absorbed"};
    return h;
}
inline const std::vector<std::string>& affine_csv_header() {
    static const std::vector<std::string> h{"experiment_id", "L", "w_norm", "correlation", "correlation_stderr",
                                            "main_term", "main_term_stderr", "gap", "gap_stderr", "scale", "n",
                                            "seed"};
    return h;
}
inline const std::vector<std::string>& circle_csv_header() {
    static const std::vector<std::string> h{"experiment_id", "L", "value_re", "value_im", "main_re", "main_im",
                                            "gap_re", "gap_im", "gap_bound", "l2_bound"};
    return h;
}

namespace detail {

inline std::string flows_text(const std::vector<FlowParam>& ts) {
    std::string s = "[";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) s += ",";
        s += "[";
        const auto c = ts[i].coords();
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k) s += ",";
            s += fmt17(c[k]);
        }
        s += "]";
    }
    return s + "]";
}

inline std::string rationals_text(const std::vector<Rational>& v) { return rationals(v).dump(); }

inline std::string sets_text(const std::vector<IndexSet>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i].to_string();
    return s;
}

}  // namespace detail

inline std::string emit_csv(const ThetaReport& r) {
    std::string out = csv_line(theta_csv_header());
    for (const auto& c : r.rows)
        out += csv_line({std::to_string(c.m), std::to_string(c.n), c.i1.to_string(), c.i2.to_string(),
                         to_fraction_string(c.theta_star), detail::rationals_text(c.witness_s),
                         detail::rationals_text(c.witness_t), std::to_string(c.achieving_weight.i + 1),
                         std::to_string(c.achieving_weight.j + 1), to_string(c.achieving_side)});
    return out;
}

inline std::string emit_csv(const SweepReport& r) {
    std::string out = csv_line(sweep_csv_header());
    for (const auto& row : r.sweep.rows)
        out += csv_line({r.id, fmt17(row.delta), fmt17(row.gap), fmt17(row.std_error), std::to_string(row.n),
                         std::to_string(row.seed), detail::flows_text(row.ts), fmt17(row.max_sample)});
    return out;
}

inline std::string emit_csv(const IntegralReport& r) {
    std::string out = csv_line(integral_csv_header());
    for (const auto& row : r.rows)
        out += csv_line({r.id, to_string(r.target), row.label, fmt17(row.estimate.mean),
                         fmt17(row.estimate.std_error), std::to_string(row.estimate.n_samples),
                         std::to_string(row.estimate.seed), detail::flows_text(row.ts),
                         fmt17(row.estimate.max_sample)});
    return out;
}

inline std::string emit_csv(const CaseReport& r) {
    std::string out = csv_line(case_csv_header());
    for (std::size_t i = 0; i < r.trace.steps.size(); ++i) {
        const auto& s = r.trace.steps[i];
        std::string factors;
        for (std::size_t k = 0; k < s.factors.size(); ++k) factors += (k ? " " : "") + std::to_string(s.factors[k] + 1);
        out += csv_line({r.id, std::to_string(i + 1), std::to_string(s.level), to_string(s.tag),
                         std::to_string(s.restart), fmt17(s.multiplier), factors, detail::sets_text(s.sets),
                         detail::sets_text(s.enlargements), s.absorbed >= 0 ? std::to_string(s.absorbed + 1) : ""});
    }
    return out;
}

inline std::string emit_csv(const AffineReport& r) {
    std::string out = csv_line(affine_csv_header());
    const double wn = std::hypot(r.w.at(0), r.w.at(1));
    for (const auto& row : r.rows) {
        const auto& x = row.result;
        out += csv_line({r.id, fmt17(row.length), fmt17(wn), fmt17(x.correlation.mean), fmt17(x.correlation.std_error),
                         fmt17(x.main_term.mean), fmt17(x.main_term.std_error), fmt17(x.gap.mean),
                         fmt17(x.gap.std_error), fmt17(x.scale), std::to_string(x.gap.n_samples),
                         std::to_string(x.gap.seed)});
    }
    return out;
}

inline std::string emit_csv(const CircleReport& r) {
    std::string out = csv_line(circle_csv_header());
    for (const auto& row : r.rows) {
        const auto& x = row.result;
        out += csv_line({r.id, fmt17(row.length), fmt17(x.value.real()), fmt17(x.value.imag()),
                         fmt17(x.main_term.real()), fmt17(x.main_term.imag()), fmt17(x.gap.real()),
                         fmt17(x.gap.imag()), fmt17(row.gap_bound), fmt17(row.l2_bound)});
    }
    return out;
}

inline std::string emit_csv(const Report& r) {
    return std::visit([](const auto& x) { return emit_csv(x); }, r);
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

}  // namespace detail

/// Log-linear plot of |gap| against delta with 3-stderr whiskers and the fitted
/// line. Points whose |gap| underflows the axis are drawn on its floor.
inline std::string emit_svg(const SweepReport& r) {
    const auto& rows = r.sweep.rows;
    if (rows.empty()) throw DomainError("emit_svg: empty sweep");
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
    double xmin = rows.front().delta, xmax = rows.back().delta;
    if (xmax <= xmin) xmax = xmin + 1;
    double ymax = -INFINITY, ymin = INFINITY;
    for (const auto& row : rows) {
        const double hi = std::abs(row.gap) + 3 * row.std_error;
        if (hi > 0) ymax = std::max(ymax, std::log10(hi));
        if (std::abs(row.gap) > 0) ymin = std::min(ymin, std::log10(std::abs(row.gap)));
        const double lo = std::abs(row.gap) - 3 * row.std_error;
        if (lo > 0) ymin = std::min(ymin, std::log10(lo));
    }
    if (!std::isfinite(ymax)) ymax = 0;
    if (!std::isfinite(ymin)) ymin = ymax - 1;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double v) {
        const double lv = v > 0 ? std::max(ymin, std::log10(v)) : ymin;
        return T + (ymax - std::min(lv, ymax)) / (ymax - ymin) * (H - T - B);
    };
    using detail::num;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\">\n";
    s << "<title>" << r.id << ": |gap| vs delta</title>\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    s << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
    s << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e)
        s << "<text x=\"" << L - 6 << "\" y=\"" << num(py(std::pow(10.0, e)) + 4) << "\" text-anchor=\"end\">1e" << e
          << "</text>\n";
    for (const auto& row : rows)
        s << "<text x=\"" << num(px(row.delta)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
          << fmt17(row.delta) << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">delta</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">|gap|</text>\n</g>\n";
    s << "<g class=\"whiskers\" stroke=\"gray\">\n";
    for (const auto& row : rows) {
        const double x = px(row.delta);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(std::abs(row.gap) - 3 * row.std_error)) << "\" x2=\""
          << num(x) << "\" y2=\"" << num(py(std::abs(row.gap) + 3 * row.std_error)) << "\"/>\n";
    }
    s << "</g>\n<g class=\"points\">\n";
    for (const auto& row : rows)
        s << "<circle class=\"point\" cx=\"" << num(px(row.delta)) << "\" cy=\"" << num(py(std::abs(row.gap)))
          << "\" r=\"3.5\" fill=\"" << (row.noise_limited() ? "white" : "black") << "\" stroke=\"black\"/>\n";
    s << "</g>\n";
    const auto& f = r.sweep.fit;
    if (f.available) {
        s << "<polyline class=\"fit\" fill=\"none\" stroke=\"crimson\" points=\"";
        constexpr int kSteps = 32;
        for (int i = 0; i <= kSteps; ++i) {
            const double x = xmin + (xmax - xmin) * i / kSteps;
            s << (i ? " " : "") << num(px(x)) << ',' << num(py(std::exp(f.intercept - f.eta * x)));
        }
        s << "\"/>\n";
        s << "<text x=\"" << W - R << "\" y=\"" << T - 10 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"12\">fitted eta = " << num(f.eta) << " +/- " << num(f.std_error) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// Plain-text rendering of a case trace.
inline std::string render_trace(const CaseReport& r) {
    std::ostringstream s;
    s << "case trace " << r.id << ": r=" << r.constants.r << " m=" << r.constants.m << " n=" << r.constants.n
      << " delta=" << fmt17(r.trace.delta) << "\n";
    s << "  lambda=" << fmt17(r.constants.lambda) << " c=[";
    for (std::size_t i = 0; i < r.constants.c.size(); ++i) s << (i ? ", " : "") << fmt17(r.constants.c[i]);
    s << "]" << (r.overridden ? " (overridden)" : "") << "\n";
    for (const auto& st : r.trace.steps) {
        s << "  level " << st.level << " restart " << st.restart << ": Case " << to_string(st.tag) << "_" << st.level;
        if (st.tag == CaseTag::two) {
            s << ", absorb factor " << st.absorbed + 1 << "\n";
            continue;
        }
        s << ", multiplier " << fmt17(st.multiplier) << "\n";
        for (std::size_t a = 0; a < st.factors.size(); ++a) {
            s << "    factor " << st.factors[a] + 1 << ": I = " << st.sets[a].to_string();
            if (a < st.enlargements.size()) s << ", J = " << st.enlargements[a].to_string();
            s << "\n";
        }
    }
    if (r.trace.terminal == Terminal::degenerate) s << "  terminal: degenerate (delta = 0)\n";
    else s << "  terminal: Case 1'_" << r.trace.terminal_level << "\n";
    return s.str();
}

}  // namespace latdecor::cli
