/// @file runner.hpp
/// @brief Benchmark driver: configure a case, run the FETI-DP solve, and emit
///        table rows (CSV, JSON, or pretty text) with the extreme eigenvalue
///        estimates and iteration counts.

#ifndef FETISTOKES_BENCH_RUNNER_HPP
#define FETISTOKES_BENCH_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "../dd/preconditioners.hpp"
#include "../dd/reduced_system.hpp"
#include "../krylov/pcg.hpp"
#include "../verify/oracle.hpp"

namespace fetistokes {

struct RunConfig {
    int dim = 2;
    std::vector<index_t> subs{4, 4};
    index_t ratio = 8;
    PrecondKind precond = PrecondKind::Lumped;
    double alpha = 1.0;
    double tol = 1e-6;
    int max_iters = 500;
    std::string format = "csv"; // csv | json | pretty
    bool verify = false;
    bool parallel_subdomains = false;
};

inline std::string subs_string(const RunConfig& cfg) {
    std::string s;
    for (std::size_t i = 0; i < cfg.subs.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(cfg.subs[i]);
    }
    return s;
}

struct RunRow {
    RunConfig cfg;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int iterations = 0;
    bool converged = false;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    bool has_verify = false;
    Discrepancy verify_result;
    std::string error; // nonempty when the solve failed
    SolveReport report;
};

inline RunRow run_case(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    RunRow row;
    row.cfg = cfg;
    try {
        auto t0 = clock::now();
        BoxMesh mesh = build_mesh(cfg.dim, cfg.subs, cfg.ratio);
        auto part = std::make_shared<const DofPartition>(classify_dofs(mesh));
        ReducedSystem sys = build_reduced(mesh, part, cfg.parallel_subdomains);
        PrecondConfig pc = make_precond_config(cfg.precond, cfg.alpha, mesh);
        HarmonicExtension hext;
        if (cfg.precond == PrecondKind::Dirichlet) hext = build_harmonic(sys);
        auto apply_m = make_preconditioner(pc, sys, &hext);
        ManufacturedCase mc = manufactured_case(cfg.dim);
        RhsBlocks rhs = assemble_rhs(mesh, *part, sys.cob, mc);
        Vector g = build_g(sys, rhs);
        row.setup_seconds = std::chrono::duration<double>(clock::now() - t0).count();

        PcgConfig pcg_cfg;
        pcg_cfg.rel_tol = cfg.tol;
        pcg_cfg.max_iters = cfg.max_iters;
        auto t1 = clock::now();
        auto [x, rep] = pcg([&](const Vector& v) { return apply_G(sys, v); }, apply_m, g, pcg_cfg);
        row.solve_seconds = std::chrono::duration<double>(clock::now() - t1).count();
        row.iterations = rep.iterations;
        row.converged = rep.converged;
        row.lambda_min = rep.lambda_min;
        row.lambda_max = rep.lambda_max;
        row.report = std::move(rep);

        if (cfg.verify) {
            FullSolution sol = back_substitute(sys, rhs, x);
            row.verify_result = compare_fetidp(mesh, mc, sol);
            row.has_verify = true;
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.converged = false;
    }
    return row;
}

inline std::vector<RunRow> run_sweep(const std::vector<RunConfig>& cfgs) {
    std::vector<RunRow> rows;
    rows.reserve(cfgs.size());
    for (const auto& c : cfgs) rows.push_back(run_case(c));
    return rows;
}

inline const char* csv_header() {
    return "H_over_h,subdomains,preconditioner,alpha,lambda_min,lambda_max,iterations,converged";
}

namespace detail {

inline std::string fmt_g(double v, const char* f = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return std::string(buf);
}

} // namespace detail

/// CSV rows carry only deterministic fields (timings are excluded so that
/// identical configs reproduce bitwise-identical output).
inline std::string emit_csv(const std::vector<RunRow>& rows) {
    std::string out = std::string(csv_header());
    bool any_verify = false;
    for (const auto& r : rows) any_verify |= r.has_verify;
    if (any_verify) out += ",verify_velocity_rel,verify_pressure_rel";
    out += "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.cfg.ratio) + "," + subs_string(r.cfg) + "," +
               to_string(r.cfg.precond) + "," + detail::fmt_g(r.cfg.alpha, "%g") + "," +
               detail::fmt_g(r.lambda_min) + "," + detail::fmt_g(r.lambda_max) + "," +
               std::to_string(r.iterations) + "," + (r.converged ? "1" : "0");
        if (any_verify)
            out += "," + (r.has_verify ? detail::fmt_g(r.verify_result.velocity_rel) : "") + "," +
                   (r.has_verify ? detail::fmt_g(r.verify_result.pressure_rel) : "");
        out += "\n";
    }
    return out;
}

inline std::string emit_json(const std::vector<RunRow>& rows) {
    std::string out = "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (i) out += ",";
        out += "{\"H_over_h\":" + std::to_string(r.cfg.ratio) + ",\"subdomains\":\"" +
               subs_string(r.cfg) + "\",\"preconditioner\":\"" + to_string(r.cfg.precond) +
               "\",\"alpha\":" + detail::fmt_g(r.cfg.alpha, "%.12g") +
               ",\"lambda_min\":" + detail::fmt_g(r.lambda_min, "%.12g") +
               ",\"lambda_max\":" + detail::fmt_g(r.lambda_max, "%.12g") +
               ",\"iterations\":" + std::to_string(r.iterations) +
               ",\"converged\":" + (r.converged ? "true" : "false") +
               ",\"setup_seconds\":" + detail::fmt_g(r.setup_seconds, "%.6g") +
               ",\"solve_seconds\":" + detail::fmt_g(r.solve_seconds, "%.6g");
        if (r.has_verify)
            out += ",\"verify_velocity_rel\":" + detail::fmt_g(r.verify_result.velocity_rel, "%.6g") +
                   ",\"verify_pressure_rel\":" + detail::fmt_g(r.verify_result.pressure_rel, "%.6g");
        if (!r.error.empty()) {
            out += ",\"error\":\"";
            for (char c : r.error)
                if (c == '"' || c == '\\') { out += '\\'; out += c; }
                else out += c;
            out += "\"";
        }
        out += "}";
    }
    return out + "]";
}

inline std::string emit_pretty(const std::vector<RunRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "H/h" << std::setw(10) << "#sub" << std::setw(11)
       << "precond" << std::setw(7) << "alpha" << std::setw(12) << "lambda_min" << std::setw(12)
       << "lambda_max" << std::setw(6) << "iter" << std::setw(5) << "conv" << std::setw(10)
       << "solve[s]" << "\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(6) << r.cfg.ratio << std::setw(10) << subs_string(r.cfg)
           << std::setw(11) << to_string(r.cfg.precond) << std::setw(7) << r.cfg.alpha
           << std::setw(12) << detail::fmt_g(r.lambda_min, "%.4g") << std::setw(12)
           << detail::fmt_g(r.lambda_max, "%.4g") << std::setw(6) << r.iterations << std::setw(5)
           << (r.converged ? "yes" : "NO") << std::setw(10)
           << detail::fmt_g(r.solve_seconds, "%.3g") << "\n";
        if (!r.error.empty()) os << "  error: " << r.error << "\n";
    }
    return os.str();
}

inline std::string emit(const std::vector<RunRow>& rows, const std::string& format) {
    if (format == "csv") return emit_csv(rows);
    if (format == "json") return emit_json(rows);
    if (format == "pretty") return emit_pretty(rows);
    throw ConfigError("emit: unknown format '" + format + "'");
}

} // namespace fetistokes

#endif // FETISTOKES_BENCH_RUNNER_HPP
