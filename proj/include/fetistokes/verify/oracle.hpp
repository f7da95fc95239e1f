/// @file oracle.hpp
/// @brief Independent ground truth: monolithic direct solve of the assembled
///        saddle system, discretization-error measurement against the
///        manufactured solutions, inf-sup constant and pressure-mass spectral
///        bounds on dense-feasible meshes.

#ifndef FETISTOKES_VERIFY_ORACLE_HPP
#define FETISTOKES_VERIFY_ORACLE_HPP

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "../core/direct_factor.hpp"
#include "../dd/reduced_system.hpp"
#include "../fem/assemble.hpp"
#include "../fem/manufactured.hpp"

namespace fetistokes {

/// Solve the fully assembled system with the first pressure DOF pinned to
/// zero, then shift the pressure to zero integral mean.
inline FullSolution direct_solve(const BoxMesh& mesh, const ManufacturedCase& mc) {
    GlobalSystem g = assemble_global(mesh);
    const index_t nf = g.num_free;
    const index_t npr = mesh.pressure_nodes();
    const index_t n = nf + npr - 1; // pressure dof 0 pinned

    TripletBuilder t(n, n);
    for (index_t i = 0; i < g.A.rows; ++i)
        for (index_t k = g.A.row_ptr[i]; k < g.A.row_ptr[i + 1]; ++k)
            t.add(i, g.A.col_idx[k], g.A.values[k]);
    for (index_t p = 0; p < npr; ++p) {
        if (p == 0) continue;
        for (index_t k = g.B.row_ptr[p]; k < g.B.row_ptr[p + 1]; ++k) {
            t.add(nf + p - 1, g.B.col_idx[k], g.B.values[k]);
            t.add(g.B.col_idx[k], nf + p - 1, g.B.values[k]);
        }
    }
    DirectFactor lu = factor_sym_indef(t.build());

    Vector load = assemble_global_load(mesh, mc);
    Vector rhs(n, 0.0);
    for (index_t dof = 0; dof < mesh.vel_dofs(); ++dof)
        if (g.free_index[dof] >= 0) rhs[g.free_index[dof]] = load[dof];
    Vector sol = lu.solve(rhs);

    FullSolution out;
    out.velocity.assign(mesh.vel_dofs(), 0.0);
    out.pressure.assign(npr, 0.0);
    for (index_t dof = 0; dof < mesh.vel_dofs(); ++dof)
        if (g.free_index[dof] >= 0) out.velocity[dof] = sol[g.free_index[dof]];
    for (index_t p = 1; p < npr; ++p) out.pressure[p] = sol[nf + p - 1];
    Vector wq = pressure_basis_integrals(mesh);
    double mean = dot(wq, out.pressure);
    for (double& p : out.pressure) p -= mean;
    return out;
}

struct Discrepancy {
    double velocity_rel = 0.0; // max-norm, relative
    double pressure_rel = 0.0; // max-norm after mean alignment, relative
};

/// Max-norm discrepancy between the FETI-DP solution and the monolithic
/// direct solve of the same discrete problem.
inline Discrepancy compare_fetidp(const BoxMesh& mesh, const ManufacturedCase& mc,
                                  const FullSolution& fetidp) {
    FullSolution ref = direct_solve(mesh, mc);
    Discrepancy d;
    double umax = 0.0, udiff = 0.0;
    for (std::size_t i = 0; i < ref.velocity.size(); ++i) {
        umax = std::max(umax, std::abs(ref.velocity[i]));
        udiff = std::max(udiff, std::abs(ref.velocity[i] - fetidp.velocity[i]));
    }
    d.velocity_rel = umax > 0.0 ? udiff / umax : udiff;

    Vector wq = pressure_basis_integrals(mesh);
    Vector diff(ref.pressure.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = fetidp.pressure[i] - ref.pressure[i];
    double dmean = dot(wq, diff);
    double pmax = 0.0, pdiff = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        pmax = std::max(pmax, std::abs(ref.pressure[i]));
        pdiff = std::max(pdiff, std::abs(diff[i] - dmean));
    }
    d.pressure_rel = pmax > 0.0 ? pdiff / pmax : pdiff;
    return d;
}

struct SolutionErrors {
    double velocity_max = 0.0; // nodal max-norm vs exact
    double velocity_h1 = 0.0;  // discrete H1 seminorm of the nodal difference
    double pressure_l2 = 0.0;  // L2 norm of the mean-adjusted nodal difference
};

inline SolutionErrors measure_errors(const BoxMesh& mesh, const ManufacturedCase& mc,
                                     const FullSolution& sol) {
    GlobalSystem g = assemble_global(mesh);
    const int d = mesh.dim;
    SolutionErrors err;
    Vector e(mesh.vel_dofs(), 0.0);
    for (index_t node = 0; node < mesh.vel_nodes(); ++node) {
        auto u = mc.velocity(mesh.vel_node_pos(node));
        for (int c = 0; c < d; ++c) {
            double diff = sol.velocity[node * d + c] - u[c];
            e[node * d + c] = diff;
            err.velocity_max = std::max(err.velocity_max, std::abs(diff));
        }
    }
    Vector ef(g.num_free, 0.0);
    for (index_t dof = 0; dof < mesh.vel_dofs(); ++dof)
        if (g.free_index[dof] >= 0) ef[g.free_index[dof]] = e[dof];
    err.velocity_h1 = std::sqrt(std::max(0.0, dot(ef, spmv(g.A, ef))));

    Vector ep(mesh.pressure_nodes());
    for (index_t p = 0; p < mesh.pressure_nodes(); ++p)
        ep[p] = sol.pressure[p] - mc.pressure(mesh.pressure_node_pos(p));
    Vector wq = pressure_basis_integrals(mesh);
    double mean = dot(wq, ep);
    for (double& v : ep) v -= mean;
    err.pressure_l2 = std::sqrt(std::max(0.0, dot(ep, spmv(g.Z, ep))));
    return err;
}

/// Inf-sup constant: beta^2 is the smallest nonzero eigenvalue of
/// B A^{-1} B^T q = mu Z q (the zero eigenvector is the constant pressure).
/// Dense computation, small meshes only.
inline double estimate_infsup(const BoxMesh& mesh) {
    GlobalSystem g = assemble_global(mesh);
    Eigen::MatrixXd a = Eigen::MatrixXd(to_eigen(g.A));
    Eigen::MatrixXd b = Eigen::MatrixXd(to_eigen(g.B));
    Eigen::MatrixXd z = Eigen::MatrixXd(to_eigen(g.Z));
    Eigen::MatrixXd s = b * a.llt().solve(b.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s, z);
    const auto& ev = es.eigenvalues();
    double tol = 1e-10 * std::max(1.0, ev(ev.size() - 1));
    for (index_t i = 0; i < ev.size(); ++i)
        if (ev(i) > tol) return std::sqrt(ev(i));
    return 0.0;
}

/// Extreme eigenvalues of the pressure mass matrix divided by h^dim.
inline std::pair<double, double> mass_spectral_bounds(const BoxMesh& mesh) {
    GlobalSystem g = assemble_global(mesh);
    Eigen::MatrixXd z = Eigen::MatrixXd(to_eigen(g.Z));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0) / mesh.cell_volume,
            es.eigenvalues()(z.rows() - 1) / mesh.cell_volume};
}

struct VerificationReport {
    SolutionErrors errors;
    Discrepancy fetidp_vs_direct;
    double infsup_beta = 0.0;
    double mass_bound_lo = 0.0;
    double mass_bound_hi = 0.0;
};

inline std::string to_json(const VerificationReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"velocity_max_error\":%.12g,\"velocity_h1_error\":%.12g,"
                  "\"pressure_l2_error\":%.12g,\"fetidp_velocity_rel\":%.12g,"
                  "\"fetidp_pressure_rel\":%.12g,\"infsup_beta\":%.12g,"
                  "\"mass_bound_lo\":%.12g,\"mass_bound_hi\":%.12g}",
                  r.errors.velocity_max, r.errors.velocity_h1, r.errors.pressure_l2,
                  r.fetidp_vs_direct.velocity_rel, r.fetidp_vs_direct.pressure_rel,
                  r.infsup_beta, r.mass_bound_lo, r.mass_bound_hi);
    return std::string(buf);
}

} // namespace fetistokes

#endif // FETISTOKES_VERIFY_ORACLE_HPP
