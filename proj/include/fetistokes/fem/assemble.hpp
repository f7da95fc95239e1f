/// @file assemble.hpp
/// @brief Subdomain and global assembly of the Q2-Q1 Stokes blocks on the box
///        mesh. Dirichlet velocity rows/columns are eliminated; all pressure
///        DOFs are kept and the saddle structure stays singular.

#ifndef FETISTOKES_FEM_ASSEMBLE_HPP
#define FETISTOKES_FEM_ASSEMBLE_HPP

#include <array>
#include <vector>

#include "../core/sparse_matrix.hpp"
#include "../dd/change_of_basis.hpp"
#include "../mesh/box_mesh.hpp"
#include "../mesh/dof_partition.hpp"
#include "element.hpp"
#include "manufactured.hpp"

namespace fetistokes {

/// One subdomain's assembled Stokes operator in the nodal basis.
/// Velocity slots: [interior dofs asc | interface nodes asc x components].
/// Pressure rows: [interior asc | interface asc].
struct LocalSystem {
    index_t sub = 0;
    index_t ni = 0;  // interior velocity dofs
    index_t ng = 0;  // interface velocity slots
    index_t npi = 0; // interior pressure
    index_t npg = 0; // interface pressure (local)
    SparseMat A;     // (ni+ng)^2
    SparseMat B;     // (npi+npg) x (ni+ng)
};

namespace detail {

inline index_t sorted_pos(const std::vector<index_t>& v, index_t key) {
    auto it = std::lower_bound(v.begin(), v.end(), key);
    if (it == v.end() || *it != key) return -1;
    return static_cast<index_t>(it - v.begin());
}

/// Local velocity slot of (node, comp) in subdomain s, -1 for boundary nodes.
inline index_t local_vel_slot(const DofPartition& part, index_t s, index_t node, int comp) {
    NodeClass nc = part.vel_node_class[node];
    if (nc == NodeClass::Boundary) return -1;
    const auto& sd = part.sub[s];
    if (nc == NodeClass::Interior)
        return sorted_pos(sd.vel_interior, node * part.dim + comp);
    index_t p = part.interface_node_pos(s, node);
    if (p < 0) return -1;
    return sd.num_interior() + p * part.dim + comp;
}

inline index_t local_pressure_row(const DofPartition& part, index_t s, index_t node) {
    const auto& sd = part.sub[s];
    index_t q = part.qgamma_pos[node];
    if (q < 0) return sorted_pos(sd.pressure_interior, node);
    index_t p = sorted_pos(sd.pressure_gamma, q);
    return p < 0 ? -1 : static_cast<index_t>(sd.pressure_interior.size()) + p;
}

/// Gather the global node ids of one element.
inline void element_nodes(const BoxMesh& m, index_t ex, index_t ey, index_t ez,
                          std::vector<index_t>& vel, std::vector<index_t>& pres) {
    const int d = m.dim;
    vel.clear();
    pres.clear();
    const int nz2 = d == 3 ? 3 : 1, nz1 = d == 3 ? 2 : 1;
    for (int dk = 0; dk < nz2; ++dk)
        for (int dj = 0; dj < 3; ++dj)
            for (int di = 0; di < 3; ++di)
                vel.push_back(m.vel_node_id(2 * ex + di, 2 * ey + dj, 2 * ez + dk));
    for (int dk = 0; dk < nz1; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di)
                pres.push_back(m.pressure_node_id(ex + di, ey + dj, ez + dk));
}

} // namespace detail

inline LocalSystem assemble_local(const BoxMesh& mesh, const DofPartition& part, index_t s) {
    const int d = mesh.dim;
    const auto& sd = part.sub[s];
    LocalSystem ls;
    ls.sub = s;
    ls.ni = sd.num_interior();
    ls.ng = static_cast<index_t>(sd.interface_nodes.size()) * d;
    ls.npi = static_cast<index_t>(sd.pressure_interior.size());
    ls.npg = static_cast<index_t>(sd.pressure_gamma.size());

    const Eigen::MatrixXd ke = element_stiffness(d, mesh.hs);
    const Eigen::MatrixXd be = element_divergence(d, mesh.hs);
    const int nq2 = q2_nodes_per_elem(d), nq1 = q1_nodes_per_elem(d);

    TripletBuilder ta(ls.ni + ls.ng, ls.ni + ls.ng);
    TripletBuilder tb(ls.npi + ls.npg, ls.ni + ls.ng);
    auto sijk = mesh.sub_ijk(s);
    std::vector<index_t> vn, pn, vslot(nq2 * d), prow(nq1);
    const index_t r = mesh.ratio;
    const index_t ez_hi = d == 3 ? r : 1;
    for (index_t ez = 0; ez < ez_hi; ++ez)
        for (index_t ey = 0; ey < r; ++ey)
            for (index_t ex = 0; ex < r; ++ex) {
                detail::element_nodes(mesh, sijk[0] * r + ex, sijk[1] * r + ey,
                                      d == 3 ? sijk[2] * r + ez : 0, vn, pn);
                for (int a = 0; a < nq2; ++a)
                    for (int c = 0; c < d; ++c)
                        vslot[a * d + c] = detail::local_vel_slot(part, s, vn[a], c);
                for (int q = 0; q < nq1; ++q)
                    prow[q] = detail::local_pressure_row(part, s, pn[q]);
                for (int a = 0; a < nq2; ++a) {
                    for (int b = 0; b < nq2; ++b) {
                        double v = ke(a, b);
                        if (v == 0.0) continue;
                        for (int c = 0; c < d; ++c) {
                            index_t ia = vslot[a * d + c], ib = vslot[b * d + c];
                            if (ia >= 0 && ib >= 0) ta.add(ia, ib, v);
                        }
                    }
                }
                for (int q = 0; q < nq1; ++q)
                    for (int a = 0; a < nq2 * d; ++a) {
                        index_t ia = vslot[a];
                        if (ia >= 0) tb.add(prow[q], ia, be(q, a));
                    }
            }
    ls.A = ta.build();
    ls.B = tb.build();
    return ls;
}

/// The twelve named blocks of one subdomain's contribution to the big system.
/// I: interior velocity, D: dual interface velocity, P: primal velocity
/// (local columns), and pressure rows split into interior (I) and interface
/// (G, local rows).
struct SubdomainBlocks {
    SparseMat A_II, A_ID, A_IP, A_DD, A_DP, A_PP;
    SparseMat B_II, B_ID, B_IP, B_GI, B_GD, B_GP;
    index_t ni = 0, nd = 0, np = 0, npi = 0, npg = 0;
};

namespace detail {

/// Velocity slot roles; `transformed` uses the final dual/primal classification
/// (edge averages primal), otherwise the nodal one (vertices primal only).
inline void slot_roles(const DofPartition& part, index_t s, bool transformed,
                       std::vector<index_t>& ipos, std::vector<index_t>& dpos,
                       std::vector<index_t>& ppos, index_t& nd, index_t& np) {
    const auto& sd = part.sub[s];
    const int d = part.dim;
    const index_t ni = sd.num_interior();
    const index_t nvloc = ni + static_cast<index_t>(sd.interface_nodes.size()) * d;
    ipos.assign(nvloc, -1);
    dpos.assign(nvloc, -1);
    ppos.assign(nvloc, -1);
    for (index_t i = 0; i < ni; ++i) ipos[i] = i;
    nd = np = 0;
    for (std::size_t gi = 0; gi < sd.interface_nodes.size(); ++gi) {
        index_t node = sd.interface_nodes[gi];
        for (int c = 0; c < d; ++c) {
            index_t slot = ni + static_cast<index_t>(gi) * d + c;
            bool primal = transformed
                              ? sd.slot_primal_pos[gi * d + c] >= 0
                              : part.vel_node_class[node] == NodeClass::Vertex;
            if (primal)
                ppos[slot] = np++;
            else
                dpos[slot] = nd++;
        }
    }
}

} // namespace detail

inline SubdomainBlocks split_blocks(const LocalSystem& ls, const DofPartition& part,
                                    bool transformed) {
    SubdomainBlocks b;
    std::vector<index_t> ipos, dpos, ppos;
    detail::slot_roles(part, ls.sub, transformed, ipos, dpos, ppos, b.nd, b.np);
    b.ni = ls.ni;
    b.npi = ls.npi;
    b.npg = ls.npg;
    b.A_II = extract_block(ls.A, ipos, b.ni, ipos, b.ni);
    b.A_ID = extract_block(ls.A, ipos, b.ni, dpos, b.nd);
    b.A_IP = extract_block(ls.A, ipos, b.ni, ppos, b.np);
    b.A_DD = extract_block(ls.A, dpos, b.nd, dpos, b.nd);
    b.A_DP = extract_block(ls.A, dpos, b.nd, ppos, b.np);
    b.A_PP = extract_block(ls.A, ppos, b.np, ppos, b.np);
    std::vector<index_t> pi(ls.npi + ls.npg, -1), pg(ls.npi + ls.npg, -1);
    for (index_t i = 0; i < ls.npi; ++i) pi[i] = i;
    for (index_t i = 0; i < ls.npg; ++i) pg[ls.npi + i] = i;
    b.B_II = extract_block(ls.B, pi, ls.npi, ipos, b.ni);
    b.B_ID = extract_block(ls.B, pi, ls.npi, dpos, b.nd);
    b.B_IP = extract_block(ls.B, pi, ls.npi, ppos, b.np);
    b.B_GI = extract_block(ls.B, pg, ls.npg, ipos, b.ni);
    b.B_GD = extract_block(ls.B, pg, ls.npg, dpos, b.nd);
    b.B_GP = extract_block(ls.B, pg, ls.npg, ppos, b.np);
    return b;
}

/// Nodal-basis blocks of one subdomain (vertex DOFs primal; edge-interior and
/// face nodes dual). The edge-average change of basis is applied downstream.
inline SubdomainBlocks assemble_subdomain(const BoxMesh& mesh, const DofPartition& part,
                                          index_t s) {
    return split_blocks(assemble_local(mesh, part, s), part, false);
}

/// Right-hand side of the big system: per-subdomain interior and dual loads
/// (transformed basis) and the assembled primal load.
struct RhsBlocks {
    std::vector<Vector> f_I;
    std::vector<Vector> f_D;
    Vector f_Pi;
};

/// Per-subdomain nodal load vector over local velocity slots.
inline Vector assemble_local_load(const BoxMesh& mesh, const DofPartition& part, index_t s,
                                  const ManufacturedCase& mc) {
    const int d = mesh.dim;
    const auto& sd = part.sub[s];
    const index_t nvloc = sd.num_interior() + static_cast<index_t>(sd.interface_nodes.size()) * d;
    Vector f(nvloc, 0.0);
    const auto quad = element_quadrature(d, mesh.hs);
    const int nq2 = q2_nodes_per_elem(d);
    auto sijk = mesh.sub_ijk(s);
    std::vector<index_t> vn, pn;
    const index_t r = mesh.ratio;
    const index_t ez_hi = d == 3 ? r : 1;
    for (index_t ez = 0; ez < ez_hi; ++ez)
        for (index_t ey = 0; ey < r; ++ey)
            for (index_t ex = 0; ex < r; ++ex) {
                index_t gx = sijk[0] * r + ex, gy = sijk[1] * r + ey,
                        gz = d == 3 ? sijk[2] * r + ez : 0;
                detail::element_nodes(mesh, gx, gy, gz, vn, pn);
                for (const auto& qp : quad) {
                    std::array<double, 3> x{(gx + qp.pos_ref[0]) * mesh.hs[0],
                                            (gy + qp.pos_ref[1]) * mesh.hs[1],
                                            d == 3 ? (gz + qp.pos_ref[2]) * mesh.hs[2] : 0.0};
                    auto fv = mc.body_force(x);
                    for (int a = 0; a < nq2; ++a)
                        for (int c = 0; c < d; ++c) {
                            index_t slot = detail::local_vel_slot(part, s, vn[a], c);
                            if (slot >= 0) f[slot] += qp.weight * qp.q2[a] * fv[c];
                        }
                }
            }
    return f;
}

inline RhsBlocks assemble_rhs(const BoxMesh& mesh, const DofPartition& part,
                              const ChangeOfBasis& cob, const ManufacturedCase& mc) {
    if (mc.dim != mesh.dim) throw ConfigError("assemble_rhs: case dimension mismatch");
    const index_t nsub = mesh.num_subdomains();
    RhsBlocks rhs;
    rhs.f_I.resize(nsub);
    rhs.f_D.resize(nsub);
    rhs.f_Pi.assign(part.num_primal(), 0.0);
    std::vector<index_t> ipos, dpos, ppos;
    for (index_t s = 0; s < nsub; ++s) {
        Vector f = assemble_local_load(mesh, part, s, mc);
        cob.to_coord_load(s, f);
        index_t nd, np;
        detail::slot_roles(part, s, true, ipos, dpos, ppos, nd, np);
        rhs.f_I[s].assign(part.sub[s].num_interior(), 0.0);
        rhs.f_D[s].assign(nd, 0.0);
        for (std::size_t g = 0; g < f.size(); ++g) {
            if (ipos[g] >= 0) rhs.f_I[s][ipos[g]] = f[g];
            else if (dpos[g] >= 0) rhs.f_D[s][dpos[g]] = f[g];
            else rhs.f_Pi[part.sub[s].primal[ppos[g]]] += f[g];
        }
    }
    return rhs;
}

/// Monolithic assembly over the whole mesh (used by the verification oracle
/// and tests). Velocity is numbered over free (non-Dirichlet) dofs.
struct GlobalSystem {
    SparseMat A; // free velocity stiffness
    SparseMat B; // all pressure x free velocity
    SparseMat Z; // pressure mass
    std::vector<index_t> free_index; // per velocity dof: free position or -1
    index_t num_free = 0;
};

inline GlobalSystem assemble_global(const BoxMesh& mesh) {
    const int d = mesh.dim;
    GlobalSystem g;
    g.free_index.assign(mesh.vel_dofs(), -1);
    for (index_t n = 0; n < mesh.vel_nodes(); ++n)
        if (!mesh.vel_node_on_boundary(n))
            for (int c = 0; c < d; ++c) g.free_index[n * d + c] = g.num_free++;

    const Eigen::MatrixXd ke = element_stiffness(d, mesh.hs);
    const Eigen::MatrixXd be = element_divergence(d, mesh.hs);
    const Eigen::MatrixXd ze = pressure_mass(d, mesh.hs);
    const int nq2 = q2_nodes_per_elem(d), nq1 = q1_nodes_per_elem(d);
    TripletBuilder ta(g.num_free, g.num_free);
    TripletBuilder tb(mesh.pressure_nodes(), g.num_free);
    TripletBuilder tz(mesh.pressure_nodes(), mesh.pressure_nodes());
    std::vector<index_t> vn, pn;
    const index_t ez_hi = d == 3 ? mesh.elems[2] : 1;
    for (index_t ez = 0; ez < ez_hi; ++ez)
        for (index_t ey = 0; ey < mesh.elems[1]; ++ey)
            for (index_t ex = 0; ex < mesh.elems[0]; ++ex) {
                detail::element_nodes(mesh, ex, ey, ez, vn, pn);
                for (int a = 0; a < nq2; ++a)
                    for (int b = 0; b < nq2; ++b) {
                        double v = ke(a, b);
                        if (v == 0.0) continue;
                        for (int c = 0; c < d; ++c) {
                            index_t ia = g.free_index[vn[a] * d + c];
                            index_t ib = g.free_index[vn[b] * d + c];
                            if (ia >= 0 && ib >= 0) ta.add(ia, ib, v);
                        }
                    }
                for (int q = 0; q < nq1; ++q) {
                    for (int a = 0; a < nq2; ++a)
                        for (int c = 0; c < d; ++c) {
                            index_t ia = g.free_index[vn[a] * d + c];
                            if (ia >= 0) tb.add(pn[q], ia, be(q, a * d + c));
                        }
                    for (int q2i = 0; q2i < nq1; ++q2i) tz.add(pn[q], pn[q2i], ze(q, q2i));
                }
            }
    g.A = ta.build();
    g.B = tb.build();
    g.Z = tz.build();
    return g;
}

/// Load vector over every velocity dof (including boundary nodes).
inline Vector assemble_global_load(const BoxMesh& mesh, const ManufacturedCase& mc) {
    const int d = mesh.dim;
    Vector f(mesh.vel_dofs(), 0.0);
    const auto quad = element_quadrature(d, mesh.hs);
    const int nq2 = q2_nodes_per_elem(d);
    std::vector<index_t> vn, pn;
    const index_t ez_hi = d == 3 ? mesh.elems[2] : 1;
    for (index_t ez = 0; ez < ez_hi; ++ez)
        for (index_t ey = 0; ey < mesh.elems[1]; ++ey)
            for (index_t ex = 0; ex < mesh.elems[0]; ++ex) {
                detail::element_nodes(mesh, ex, ey, ez, vn, pn);
                for (const auto& qp : quad) {
                    std::array<double, 3> x{(ex + qp.pos_ref[0]) * mesh.hs[0],
                                            (ey + qp.pos_ref[1]) * mesh.hs[1],
                                            d == 3 ? (ez + qp.pos_ref[2]) * mesh.hs[2] : 0.0};
                    auto fv = mc.body_force(x);
                    for (int a = 0; a < nq2; ++a)
                        for (int c = 0; c < d; ++c)
                            f[vn[a] * d + c] += qp.weight * qp.q2[a] * fv[c];
                }
            }
    return f;
}

/// Integral of each pressure basis function (row sums of the mass matrix).
inline Vector pressure_basis_integrals(const BoxMesh& mesh) {
    const int d = mesh.dim;
    Vector w(mesh.pressure_nodes(), 0.0);
    const Eigen::MatrixXd ze = pressure_mass(d, mesh.hs);
    const int nq1 = q1_nodes_per_elem(d);
    std::vector<index_t> vn, pn;
    const index_t ez_hi = d == 3 ? mesh.elems[2] : 1;
    for (index_t ez = 0; ez < ez_hi; ++ez)
        for (index_t ey = 0; ey < mesh.elems[1]; ++ey)
            for (index_t ex = 0; ex < mesh.elems[0]; ++ex) {
                detail::element_nodes(mesh, ex, ey, ez, vn, pn);
                for (int q = 0; q < nq1; ++q)
                    for (int q2i = 0; q2i < nq1; ++q2i) w[pn[q]] += ze(q, q2i);
            }
    return w;
}

} // namespace fetistokes

#endif // FETISTOKES_FEM_ASSEMBLE_HPP
