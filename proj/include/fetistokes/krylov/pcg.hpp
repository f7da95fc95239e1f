/// @file pcg.hpp
/// @brief Preconditioned conjugate gradients with zero initial guess for the
///        semi-definite reduced system, including the Lanczos tridiagonal
///        assembled from the step and improvement coefficients and extreme
///        eigenvalue estimates of the preconditioned operator.

#ifndef FETISTOKES_KRYLOV_PCG_HPP
#define FETISTOKES_KRYLOV_PCG_HPP

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "../core/types.hpp"
#include "../core/vector_ops.hpp"

namespace fetistokes {

struct PcgConfig {
    double rel_tol = 1e-6; // on the unpreconditioned Euclidean residual norm
    int max_iters = 500;
    bool record_lanczos = true;
};

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history; // ||r_0||, ||r_1||, ...
    std::vector<double> lanczos_diag;
    std::vector<double> lanczos_offdiag;
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    double lambda_max = std::numeric_limits<double>::quiet_NaN();
};

/// Extreme eigenvalues of the symmetric tridiagonal Lanczos matrix.
inline std::pair<double, double> lanczos_eigs(const std::vector<double>& diag,
                                              const std::vector<double>& offdiag) {
    const index_t n = static_cast<index_t>(diag.size());
    if (n == 0) throw ConfigError("lanczos_eigs: empty tridiagonal");
    if (n == 1) return {diag[0], diag[0]};
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (index_t i = 0; i < n; ++i) t(i, i) = diag[i];
    for (index_t i = 0; i + 1 < n; ++i) {
        t(i, i + 1) = offdiag[i];
        t(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(n - 1)};
}

inline double estimate_condition(const SolveReport& rep) {
    if (!(rep.lambda_min > 0.0))
        throw ConfigError("estimate_condition: lambda_min estimate not positive");
    return rep.lambda_max / rep.lambda_min;
}

/// Solve A x = b by PCG with zero initial guess. Stops when
/// ||b - A x|| <= rel_tol * ||b||. Throws BreakdownError when the operator
/// curvature or the preconditioner inner product turns non-positive.
template <typename ApplyA, typename ApplyM>
inline std::pair<Vector, SolveReport> pcg(ApplyA&& apply_a, ApplyM&& apply_m, const Vector& b,
                                          const PcgConfig& cfg) {
    const std::size_t n = b.size();
    SolveReport rep;
    Vector x(n, 0.0);
    Vector r = b;
    double r0 = norm2(r);
    rep.residual_history.push_back(r0);
    if (r0 == 0.0) {
        rep.converged = true;
        return {x, rep};
    }
    const double target = cfg.rel_tol * r0;

    Vector z = apply_m(r);
    Vector p = z;
    double gamma = dot(r, z);
    if (!(gamma > 0.0)) throw BreakdownError("pcg: <r, M^-1 r> not positive");
    double alpha_prev = 0.0, beta_prev = 0.0;

    for (int it = 0; it < cfg.max_iters; ++it) {
        Vector q = apply_a(p);
        double pq = dot(p, q);
        if (!(pq > 0.0)) {
            std::ostringstream os;
            os << "pcg: non-positive curvature <p, Ap> = " << pq
               << " (inconsistent right-hand side or non-symmetric operator)";
            throw BreakdownError(os.str());
        }
        double alpha = gamma / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        rep.iterations = it + 1;
        rep.residual_history.push_back(norm2(r));

        if (cfg.record_lanczos) {
            double d = 1.0 / alpha;
            if (it > 0) d += beta_prev / alpha_prev;
            rep.lanczos_diag.push_back(d);
        }

        if (rep.residual_history.back() <= target) {
            rep.converged = true;
            break;
        }

        z = apply_m(r);
        double gamma_new = dot(r, z);
        if (!(gamma_new > 0.0)) throw BreakdownError("pcg: <r, M^-1 r> not positive");
        double beta = gamma_new / gamma;
        if (cfg.record_lanczos) rep.lanczos_offdiag.push_back(std::sqrt(beta) / alpha);
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        gamma = gamma_new;
        alpha_prev = alpha;
        beta_prev = beta;
    }

    if (cfg.record_lanczos && rep.iterations > 0) {
        // keep the tridiagonal square: one fewer off-diagonal than diagonal
        if (rep.lanczos_offdiag.size() >= rep.lanczos_diag.size())
            rep.lanczos_offdiag.resize(rep.lanczos_diag.size() - 1);
        auto [lo, hi] = lanczos_eigs(rep.lanczos_diag, rep.lanczos_offdiag);
        rep.lambda_min = lo;
        rep.lambda_max = hi;
    }
    return {x, rep};
}

/// Residual history as CSV ("iteration,residual").
inline std::string residual_history_csv(const SolveReport& rep) {
    std::ostringstream os;
    os << "iteration,residual\n";
    char buf[64];
    for (std::size_t i = 0; i < rep.residual_history.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", rep.residual_history[i]);
        os << i << "," << buf << "\n";
    }
    return os.str();
}

} // namespace fetistokes

#endif // FETISTOKES_KRYLOV_PCG_HPP
