/// @file reduced_system.hpp
/// @brief The partially assembled FETI-DP operator: factored subdomain
///        saddle blocks A_rr, the coarse Schur complement S_Pi, the reduced
///        operator G = B_C Atilde^{-1} B_C^T on (p_Gamma, lambda), its
///        right-hand side g, the known null vector, and back substitution.
///
/// Vectors on the reduced space X = Q_Gamma + Lambda store the interface
/// pressure first and the multipliers second.

#ifndef FETISTOKES_DD_REDUCED_SYSTEM_HPP
#define FETISTOKES_DD_REDUCED_SYSTEM_HPP

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "../core/direct_factor.hpp"
#include "../core/parallel.hpp"
#include "../core/sparse_matrix.hpp"
#include "../core/vector_ops.hpp"
#include "../fem/assemble.hpp"
#include "../mesh/interface_jump.hpp"
#include "change_of_basis.hpp"

namespace fetistokes {

/// A vector in the partially assembled space (u_I, p_I, u_Delta per
/// subdomain; u_Pi assembled), also used for right-hand sides.
struct TildeVec {
    std::vector<Vector> u_I;
    std::vector<Vector> p_I;
    std::vector<Vector> u_D;
    Vector u_Pi;
};

struct FullSolution {
    Vector velocity; // all velocity dofs, zero on the Dirichlet boundary
    Vector pressure; // all pressure nodes, zero integral mean
};

class ReducedSystem {
public:
    BoxMesh mesh;
    std::shared_ptr<const DofPartition> part;
    ChangeOfBasis cob;
    InterfaceJump jump;
    std::vector<SubdomainBlocks> blocks; // transformed basis
    std::vector<DirectFactor> Arr;       // per-subdomain saddle factor
    std::vector<SparseMat> ArP;          // [A_IP; B_IP; A_DP]
    std::vector<Eigen::MatrixXd> Kr;     // A_rr^{-1} A_rP, retained columns
    Eigen::MatrixXd S_Pi;
    DirectFactor S_Pi_factor;
    index_t n_pgamma = 0, n_lambda = 0, n_primal = 0;
    bool parallel = false;

    index_t num_sub() const { return static_cast<index_t>(blocks.size()); }
    index_t x_size() const { return n_pgamma + n_lambda; }

    TildeVec make_tilde() const {
        TildeVec v;
        v.u_I.resize(num_sub());
        v.p_I.resize(num_sub());
        v.u_D.resize(num_sub());
        for (index_t s = 0; s < num_sub(); ++s) {
            v.u_I[s].assign(blocks[s].ni, 0.0);
            v.p_I[s].assign(blocks[s].npi, 0.0);
            v.u_D[s].assign(blocks[s].nd, 0.0);
        }
        v.u_Pi.assign(n_primal, 0.0);
        return v;
    }

    Vector gather_pgamma(index_t s, const Vector& x) const {
        const auto& gp = part->sub[s].pressure_gamma;
        Vector out(gp.size());
        for (std::size_t i = 0; i < gp.size(); ++i) out[i] = x[gp[i]];
        return out;
    }

    Vector gather_primal(index_t s, const Vector& u_pi) const {
        const auto& pl = part->sub[s].primal;
        Vector out(pl.size());
        for (std::size_t i = 0; i < pl.size(); ++i) out[i] = u_pi[pl[i]];
        return out;
    }
};

/// A_rr = [[A_II, B_II^T, A_ID], [B_II, 0, B_ID], [A_DI, B_ID^T, A_DD]].
inline SparseMat assemble_arr(const SubdomainBlocks& b) {
    const index_t oi = 0, op = b.ni, od = b.ni + b.npi;
    const index_t nr = b.ni + b.npi + b.nd;
    TripletBuilder t(nr, nr);
    auto scatter = [&t](const SparseMat& m, index_t ro, index_t co, bool mirror) {
        for (index_t i = 0; i < m.rows; ++i)
            for (index_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
                t.add(ro + i, co + m.col_idx[k], m.values[k]);
                if (mirror) t.add(co + m.col_idx[k], ro + i, m.values[k]);
            }
    };
    scatter(b.A_II, oi, oi, false);
    scatter(b.A_ID, oi, od, true);
    scatter(b.B_II, op, oi, true);
    scatter(b.B_ID, op, od, true);
    scatter(b.A_DD, od, od, false);
    return t.build();
}

/// A_rP = [A_IP; B_IP; A_DP].
inline SparseMat assemble_arp(const SubdomainBlocks& b) {
    const index_t nr = b.ni + b.npi + b.nd;
    TripletBuilder t(nr, b.np);
    auto scatter = [&t](const SparseMat& m, index_t ro) {
        for (index_t i = 0; i < m.rows; ++i)
            for (index_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
                t.add(ro + i, m.col_idx[k], m.values[k]);
    };
    scatter(b.A_IP, 0);
    scatter(b.B_IP, b.ni);
    scatter(b.A_DP, b.ni + b.npi);
    return t.build();
}

inline ReducedSystem build_reduced(const BoxMesh& mesh,
                                   std::shared_ptr<const DofPartition> part,
                                   bool parallel = false) {
    ReducedSystem sys;
    sys.mesh = mesh;
    sys.part = std::move(part);
    sys.parallel = parallel;
    sys.cob = build_change_of_basis(*sys.part);
    sys.jump = build_jump(*sys.part);
    sys.n_pgamma = sys.part->num_qgamma();
    sys.n_lambda = sys.jump.num_multipliers();
    sys.n_primal = sys.part->num_primal();

    const index_t nsub = mesh.num_subdomains();
    sys.blocks.resize(nsub);
    sys.Arr.resize(nsub);
    sys.ArP.resize(nsub);
    sys.Kr.resize(nsub);
    std::vector<Eigen::MatrixXd> coarse(nsub);

    for_each_subdomain(nsub, parallel, [&](index_t s) {
        LocalSystem ls = assemble_local(mesh, *sys.part, s);
        ls.A = sys.cob.transform_stiffness(s, ls.A);
        ls.B = sys.cob.transform_divergence(s, ls.B);
        SubdomainBlocks b = split_blocks(ls, *sys.part, true);

        const index_t nr = b.ni + b.npi + b.nd;
        sys.ArP[s] = assemble_arp(b);
        sys.Arr[s] = factor_sym_indef(assemble_arr(b));
        Eigen::MatrixXd arp = Eigen::MatrixXd::Zero(nr, b.np);
        for (index_t i = 0; i < nr; ++i)
            for (index_t k = sys.ArP[s].row_ptr[i]; k < sys.ArP[s].row_ptr[i + 1]; ++k)
                arp(i, sys.ArP[s].col_idx[k]) = sys.ArP[s].values[k];
        sys.Kr[s] = sys.Arr[s].solve_dense(arp);

        Eigen::MatrixXd app = Eigen::MatrixXd::Zero(b.np, b.np);
        for (index_t i = 0; i < b.np; ++i)
            for (index_t k = b.A_PP.row_ptr[i]; k < b.A_PP.row_ptr[i + 1]; ++k)
                app(i, b.A_PP.col_idx[k]) = b.A_PP.values[k];
        coarse[s] = app - arp.transpose() * sys.Kr[s];
        sys.blocks[s] = std::move(b);
    });

    sys.S_Pi = Eigen::MatrixXd::Zero(sys.n_primal, sys.n_primal);
    for (index_t s = 0; s < nsub; ++s) {
        const auto& pl = sys.part->sub[s].primal;
        for (std::size_t i = 0; i < pl.size(); ++i)
            for (std::size_t j = 0; j < pl.size(); ++j)
                sys.S_Pi(pl[i], pl[j]) += coarse[s](i, j);
    }
    if (sys.n_primal > 0) {
        try {
            sys.S_Pi_factor = dense_factor_spd(sys.S_Pi);
        } catch (const NotPositiveDefinite&) {
            throw NotPositiveDefinite(
                "build_reduced: coarse matrix S_Pi is not SPD (primal space too small?)", -1);
        }
    }
    return sys;
}

/// x = Atilde^{-1} f: per-subdomain saddle solves, one coarse solve, and the
/// correction sweep. Subdomain solves are independent.
inline TildeVec apply_Atilde_inv(const ReducedSystem& sys, const TildeVec& f) {
    const index_t nsub = sys.num_sub();
    std::vector<Vector> x1(nsub);
    for_each_subdomain(nsub, sys.parallel, [&](index_t s) {
        const auto& b = sys.blocks[s];
        Vector r(b.ni + b.npi + b.nd);
        for (index_t i = 0; i < b.ni; ++i) r[i] = f.u_I[s][i];
        for (index_t i = 0; i < b.npi; ++i) r[b.ni + i] = f.p_I[s][i];
        for (index_t i = 0; i < b.nd; ++i) r[b.ni + b.npi + i] = f.u_D[s][i];
        x1[s] = sys.Arr[s].solve(r);
    });

    Vector d_pi = f.u_Pi;
    for (index_t s = 0; s < nsub; ++s) {
        Vector y = spmv_transpose(sys.ArP[s], x1[s]);
        const auto& pl = sys.part->sub[s].primal;
        for (std::size_t i = 0; i < pl.size(); ++i) d_pi[pl[i]] -= y[i];
    }

    TildeVec out = sys.make_tilde();
    if (sys.n_primal > 0) sys.S_Pi_factor.solve(d_pi, out.u_Pi);

    for_each_subdomain(nsub, sys.parallel, [&](index_t s) {
        const auto& b = sys.blocks[s];
        Vector upl = sys.gather_primal(s, out.u_Pi);
        Eigen::Map<const Eigen::VectorXd> up(upl.data(), upl.size());
        Eigen::Map<Eigen::VectorXd> xr(x1[s].data(), x1[s].size());
        if (b.np > 0) xr -= sys.Kr[s] * up;
        for (index_t i = 0; i < b.ni; ++i) out.u_I[s][i] = x1[s][i];
        for (index_t i = 0; i < b.npi; ++i) out.p_I[s][i] = x1[s][b.ni + i];
        for (index_t i = 0; i < b.nd; ++i) out.u_D[s][i] = x1[s][b.ni + b.npi + i];
    });
    return out;
}

/// y = Atilde x (tests and energy identities).
inline TildeVec apply_Atilde(const ReducedSystem& sys, const TildeVec& v) {
    TildeVec out = sys.make_tilde();
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector upl = sys.gather_primal(s, v.u_Pi);
        Vector& oi = out.u_I[s];
        spmv_add(b.A_II, v.u_I[s], oi);
        spmv_transpose_add(b.B_II, v.p_I[s], oi);
        spmv_add(b.A_ID, v.u_D[s], oi);
        spmv_add(b.A_IP, upl, oi);
        Vector& op = out.p_I[s];
        spmv_add(b.B_II, v.u_I[s], op);
        spmv_add(b.B_ID, v.u_D[s], op);
        spmv_add(b.B_IP, upl, op);
        Vector& od = out.u_D[s];
        spmv_transpose_add(b.A_ID, v.u_I[s], od);
        spmv_transpose_add(b.B_ID, v.p_I[s], od);
        spmv_add(b.A_DD, v.u_D[s], od);
        spmv_add(b.A_DP, upl, od);
        Vector opi(b.np, 0.0);
        spmv_transpose_add(b.A_IP, v.u_I[s], opi);
        spmv_transpose_add(b.B_IP, v.p_I[s], opi);
        spmv_transpose_add(b.A_DP, v.u_D[s], opi);
        spmv_add(b.A_PP, upl, opi);
        const auto& pl = sys.part->sub[s].primal;
        for (std::size_t i = 0; i < pl.size(); ++i) out.u_Pi[pl[i]] += opi[i];
    }
    return out;
}

inline double tilde_dot(const TildeVec& a, const TildeVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.u_I.size(); ++i)
        s += dot(a.u_I[i], b.u_I[i]) + dot(a.p_I[i], b.p_I[i]) + dot(a.u_D[i], b.u_D[i]);
    return s + dot(a.u_Pi, b.u_Pi);
}

/// Subdomain-wise velocity stiffness quadratic form (discrete H1 seminorm
/// squared of the velocity component of v).
inline double velocity_energy(const ReducedSystem& sys, const TildeVec& v) {
    double total = 0.0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector upl = sys.gather_primal(s, v.u_Pi);
        total += dot(v.u_I[s], spmv(b.A_II, v.u_I[s]));
        total += 2.0 * dot(v.u_I[s], spmv(b.A_ID, v.u_D[s]));
        total += 2.0 * dot(v.u_I[s], spmv(b.A_IP, upl));
        total += dot(v.u_D[s], spmv(b.A_DD, v.u_D[s]));
        total += 2.0 * dot(v.u_D[s], spmv(b.A_DP, upl));
        total += dot(upl, spmv(b.A_PP, upl));
    }
    return total;
}

/// y = B_C v: interface-pressure residual rows and multiplier rows.
inline Vector apply_BC(const ReducedSystem& sys, const TildeVec& v) {
    Vector y(sys.x_size(), 0.0);
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector upl = sys.gather_primal(s, v.u_Pi);
        Vector yp(b.npg, 0.0);
        spmv_add(b.B_GI, v.u_I[s], yp);
        spmv_add(b.B_GD, v.u_D[s], yp);
        spmv_add(b.B_GP, upl, yp);
        const auto& gp = sys.part->sub[s].pressure_gamma;
        for (std::size_t i = 0; i < gp.size(); ++i) y[gp[i]] += yp[i];
    }
    Vector lam(sys.n_lambda, 0.0);
    for (index_t s = 0; s < sys.num_sub(); ++s) sys.jump.add_Bdelta(s, v.u_D[s], lam);
    for (index_t i = 0; i < sys.n_lambda; ++i) y[sys.n_pgamma + i] = lam[i];
    return y;
}

/// f = B_C^T x as a partially assembled right-hand side.
inline TildeVec apply_BCt(const ReducedSystem& sys, const Vector& x) {
    TildeVec f = sys.make_tilde();
    Vector lam(x.begin() + sys.n_pgamma, x.end());
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector pg = sys.gather_pgamma(s, x);
        spmv_transpose_add(b.B_GI, pg, f.u_I[s]);
        Vector w;
        sys.jump.apply_BdeltaT(s, lam, w);
        spmv_transpose_add(b.B_GD, pg, w);
        f.u_D[s] = std::move(w);
        Vector fp(b.np, 0.0);
        spmv_transpose_add(b.B_GP, pg, fp);
        const auto& pl = sys.part->sub[s].primal;
        for (std::size_t i = 0; i < pl.size(); ++i) f.u_Pi[pl[i]] += fp[i];
    }
    return f;
}

/// y = G x with G = B_C Atilde^{-1} B_C^T.
inline Vector apply_G(const ReducedSystem& sys, const Vector& x) {
    if (static_cast<index_t>(x.size()) != sys.x_size())
        throw DimensionMismatch("apply_G: size(x) != n_pgamma + n_lambda");
    TildeVec f = apply_BCt(sys, x);
    TildeVec w = apply_Atilde_inv(sys, f);
    return apply_BC(sys, w);
}

inline TildeVec rhs_to_tilde(const ReducedSystem& sys, const RhsBlocks& rhs) {
    TildeVec f = sys.make_tilde();
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        f.u_I[s] = rhs.f_I[s];
        f.u_D[s] = rhs.f_D[s];
    }
    f.u_Pi = rhs.f_Pi;
    return f;
}

/// g = B_C Atilde^{-1} (f_I, 0, f_Delta, f_Pi).
inline Vector build_g(const ReducedSystem& sys, const RhsBlocks& rhs) {
    return apply_BC(sys, apply_Atilde_inv(sys, rhs_to_tilde(sys, rhs)));
}

/// The null vector (1_{p_Gamma}, -B_{Delta,D} [B_ID^T B_GD^T] (1_{p_I}; 1_{p_Gamma}))
/// spanning the constant-pressure kernel of G.
inline Vector null_vector(const ReducedSystem& sys) {
    Vector n(sys.x_size(), 0.0);
    for (index_t i = 0; i < sys.n_pgamma; ++i) n[i] = 1.0;
    Vector lam(sys.n_lambda, 0.0);
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector ones_pi(b.npi, 1.0), ones_pg(b.npg, 1.0);
        Vector w(b.nd, 0.0);
        spmv_transpose_add(b.B_ID, ones_pi, w);
        spmv_transpose_add(b.B_GD, ones_pg, w);
        sys.jump.add_BdeltaD(s, w, lam);
    }
    for (index_t i = 0; i < sys.n_lambda; ++i) n[sys.n_pgamma + i] = -lam[i];
    return n;
}

/// Recover the full solution from the reduced unknowns, average the dual
/// interface copies, and shift the pressure to zero integral mean.
inline FullSolution back_substitute(const ReducedSystem& sys, const RhsBlocks& rhs,
                                    const Vector& x) {
    TildeVec f = rhs_to_tilde(sys, rhs);
    TildeVec bc = apply_BCt(sys, x);
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        axpy(-1.0, bc.u_I[s], f.u_I[s]);
        axpy(-1.0, bc.u_D[s], f.u_D[s]);
    }
    axpy(-1.0, bc.u_Pi, f.u_Pi);
    TildeVec w = apply_Atilde_inv(sys, f);

    const BoxMesh& mesh = sys.mesh;
    const DofPartition& part = *sys.part;
    const int d = mesh.dim;
    FullSolution sol;
    sol.velocity.assign(mesh.vel_dofs(), 0.0);
    sol.pressure.assign(mesh.pressure_nodes(), 0.0);

    std::vector<index_t> ipos, dpos, ppos;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& sd = part.sub[s];
        index_t nd, np;
        detail::slot_roles(part, s, true, ipos, dpos, ppos, nd, np);
        Vector coords(ipos.size(), 0.0);
        for (std::size_t g = 0; g < coords.size(); ++g) {
            if (ipos[g] >= 0) coords[g] = w.u_I[s][ipos[g]];
            else if (dpos[g] >= 0) coords[g] = w.u_D[s][dpos[g]];
            else coords[g] = w.u_Pi[sd.primal[ppos[g]]];
        }
        sys.cob.to_nodal(s, coords);
        const index_t ni = sd.num_interior();
        for (index_t i = 0; i < ni; ++i) sol.velocity[sd.vel_interior[i]] = coords[i];
        for (std::size_t gi = 0; gi < sd.interface_nodes.size(); ++gi) {
            index_t node = sd.interface_nodes[gi];
            double wgt = 1.0 / static_cast<double>(part.nshare[node]);
            for (int c = 0; c < d; ++c)
                sol.velocity[node * d + c] += wgt * coords[ni + gi * d + c];
        }
        for (std::size_t i = 0; i < sd.pressure_interior.size(); ++i)
            sol.pressure[sd.pressure_interior[i]] = w.p_I[s][i];
    }
    for (index_t i = 0; i < sys.n_pgamma; ++i) sol.pressure[part.qgamma[i]] = x[i];

    Vector wq = pressure_basis_integrals(mesh);
    double mean = dot(wq, sol.pressure); // |Omega| = 1
    for (double& p : sol.pressure) p -= mean;
    return sol;
}

} // namespace fetistokes

#endif // FETISTOKES_DD_REDUCED_SYSTEM_HPP
