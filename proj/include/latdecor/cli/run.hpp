#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "latdecor/cli/config.hpp"
#include "latdecor/cli/report.hpp"
#include "latdecor/montecarlo/affine.hpp"
#include "latdecor/montecarlo/circle.hpp"
#include "latdecor/montecarlo/correlation.hpp"
#include "latdecor/weights/weights.hpp"

namespace latdecor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline ThetaReport compute_theta(int m, int n, ThetaMode mode) {
    if (m < 1 || n < 1 || m + n > kMaxDim) throw ConfigError("theta: need m, n >= 1");
    ThetaReport r{m, n, mode, theta_table(m, n, mode)};
    if (r.rows.empty())
        throw ConfigError("theta: (m, n) = (" + std::to_string(m) + ", " + std::to_string(n) +
                          ") has a single admissible set, so there is no pair to separate");
    return r;
}

/// Runs the computation named by the config. Nothing is written.
inline Report compute(const ExperimentConfig& cfg) {
    return std::visit(
        [&](const auto& body) -> Report {
            using B = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<B, ThetaConfig>) {
                return compute_theta(cfg.m, cfg.n, body.mode);
            } else if constexpr (std::is_same_v<B, SweepConfig>) {
                return SweepReport{cfg.id, decay_sweep(body.observables, body.base, body.directions, body.grid,
                                                       cfg.n_samples, *cfg.seed)};
            } else if constexpr (std::is_same_v<B, IntegralConfig>) {
                IntegralReport r;
                r.id = cfg.id;
                r.target = body.target;
                if (body.target == IntegralTarget::joint) {
                    r.rows.push_back({"joint",
                                      estimate_joint_correlation(body.observables, body.flows, cfg.n_samples, *cfg.seed),
                                      body.flows});
                    return r;
                }
                r.horizon = cfg.horizon;
                r.set = body.set->members();
                // Row i reads stream tag i, so the rows are independent estimates.
                for (std::size_t i = 0; i < body.observables.size(); ++i) {
                    auto e = estimate_muI_integral(body.observables[i], *body.set, cfg.horizon, cfg.n_samples,
                                                   *cfg.seed, i);
                    r.rows.push_back({"obs" + std::to_string(i + 1), e.estimate, {e.t}});
                }
                return r;
            } else if constexpr (std::is_same_v<B, CaseConfig>) {
                return CaseReport{cfg.id, body.constants, body.overridden, body.tuple,
                                  classify_case(body.tuple, body.constants)};
            } else if constexpr (std::is_same_v<B, AffineConfig>) {
                AffineReport r;
                r.id = cfg.id;
                r.w = body.w;
                r.horizon = cfg.horizon;
                Vector w(2);
                w << body.w[0], body.w[1];
                for (std::size_t i = 0; i < body.lengths.size(); ++i) {
                    AffineOptions opt;
                    opt.grid = body.grid;
                    opt.fiber_points = body.fiber_points;
                    opt.horizon = cfg.horizon;
                    opt.tag = i;
                    r.rows.push_back({body.lengths[i], affine_mean_decorrelation(body.phi, body.psi, w, body.lengths[i],
                                                                                 cfg.n_samples, *cfg.seed, opt)});
                }
                return r;
            } else {
                CircleReport r;
                r.id = cfg.id;
                for (double l : body.lengths)
                    r.rows.push_back({l, circle_mean_decorrelation(body.phi, body.psi, l),
                                      circle_gap_bound(body.phi, body.psi, l), circle_l2_bound(body.phi, body.psi, l)});
                return r;
            }
        },
        cfg.body);
}

inline std::string render(const Report& r, const std::string& format) {
    if (format == "csv") return emit_csv(r);
    if (format == "json") return emit_json(r);
    if (format == "svg") {
        if (const auto* s = std::get_if<SweepReport>(&r)) return emit_svg(*s);
        throw ConfigError("svg output is only available for sweeps");
    }
    throw ConfigError("unknown format '" + format + "'");
}

/// Writes every artifact to a temporary sibling first and renames only once
/// all of them are complete, so a failure leaves no partial output.
inline std::vector<std::filesystem::path> write_artifacts(const Report& r, const std::string& id,
                                                          const std::filesystem::path& dir,
                                                          const std::vector<std::string>& formats) {
    namespace fs = std::filesystem;
    std::vector<std::pair<fs::path, std::string>> files;
    for (const auto& f : formats) files.emplace_back(dir / (id + "." + f), render(r, f));

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<fs::path> temps;
    auto cleanup = [&] {
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [path, text] : files) {
        fs::path tmp = path;
        tmp.replace_filename("." + path.filename().string() + ".tmp");
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.close();
        if (!out) {
            cleanup();
            throw ConfigError("cannot write " + tmp.string());
        }
    }
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < files.size(); ++i) {
        fs::rename(temps[i], files[i].first, ec);
        if (ec) {
            cleanup();
            throw ConfigError("cannot rename " + temps[i].string() + ": " + ec.message());
        }
        written.push_back(files[i].first);
    }
    return written;
}

/// Maps library exceptions to exit codes: 2 for configuration and domain
/// errors, 3 for numerical and internal failures.
template <class Fn>
int guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvariantError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::bad_alloc&) {
        err << "numerical failure: out of memory\n";
        return kExitNumerical;
    }
}

struct RunOptions {
    std::optional<ExperimentKind> expect;       // subcommand restricts the kind
    std::optional<std::filesystem::path> out;   // overrides output_dir
    bool print_json = false;                    // case: JSON on stdout instead of text
};

/// Loads, computes and writes one experiment. Returns the process exit code.
inline int run_experiment(const std::filesystem::path& config_path, const RunOptions& opt = {},
                          std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return guarded(
        [&] {
            const ExperimentConfig cfg = load_config(config_path);
            if (opt.expect && *opt.expect != cfg.kind)
                throw ConfigError("config kind '" + to_string(cfg.kind) + "' does not match subcommand '" +
                                  to_string(*opt.expect) + "'");
            for (const auto& f : cfg.formats)
                if (f == "svg" && cfg.kind != ExperimentKind::sweep)
                    throw ConfigError("svg output is only available for sweeps");
            const Report report = compute(cfg);
            const auto dir = opt.out ? *opt.out : cfg.output_dir;
            const auto written = write_artifacts(report, cfg.id, dir, cfg.formats);
            if (const auto* c = std::get_if<CaseReport>(&report))
                out << (opt.print_json ? emit_json(report) : render_trace(*c));
            for (const auto& p : written) out << "wrote " << p.string() << "\n";
            return kExitOk;
        },
        err);
}

}  // namespace latdecor::cli
