/// @file change_of_basis.hpp
/// @brief Per-subdomain change of velocity basis that turns each interface
///        edge (3D) into one explicit edge-average coordinate plus zero-average
///        deviations. Identity in the 2D vertex-only configuration.
///
/// For an edge with interior nodes n_0 < n_1 < ... < n_{m-1} and a component
/// c, the transform T maps coordinates (avg, d_1, ..., d_{m-1}) to nodal
/// values: w(n_0) = avg - sum_k d_k and w(n_k) = avg + d_k. The column for
/// avg is the constant cutoff function; the deviation columns have zero edge
/// average, so they vanish at the primal degree of freedom.

#ifndef FETISTOKES_DD_CHANGE_OF_BASIS_HPP
#define FETISTOKES_DD_CHANGE_OF_BASIS_HPP

#include <vector>

#include "../core/sparse_matrix.hpp"
#include "../mesh/dof_partition.hpp"

namespace fetistokes {

struct ChangeOfBasis {
    bool is_identity = true;
    std::vector<SparseMat> T; // per subdomain, over local velocity slots; empty if identity

    /// nodal <- coordinates
    void to_nodal(index_t s, Vector& x) const {
        if (is_identity) return;
        x = spmv(T[s], x);
    }
    /// coordinate loads <- nodal loads
    void to_coord_load(index_t s, Vector& f) const {
        if (is_identity) return;
        f = spmv_transpose(T[s], f);
    }
    /// A -> T^T A T over local velocity slots
    SparseMat transform_stiffness(index_t s, const SparseMat& a) const {
        if (is_identity) return a;
        return mat_mult(transpose(T[s]), mat_mult(a, T[s]));
    }
    /// B -> B T (velocity columns only)
    SparseMat transform_divergence(index_t s, const SparseMat& b) const {
        if (is_identity) return b;
        return mat_mult(b, T[s]);
    }
};

inline ChangeOfBasis build_change_of_basis(const DofPartition& part) {
    ChangeOfBasis cob;
    if (part.dim == 2 || part.edges.empty()) {
        cob.is_identity = true;
        return cob;
    }
    cob.is_identity = false;
    const int d = part.dim;
    cob.T.resize(part.sub.size());
    for (index_t s = 0; s < static_cast<index_t>(part.sub.size()); ++s) {
        const auto& sd = part.sub[s];
        const index_t ni = sd.num_interior();
        const index_t nvloc = ni + static_cast<index_t>(sd.interface_nodes.size()) * d;
        std::vector<bool> plain(nvloc, true);
        TripletBuilder t(nvloc, nvloc);
        for (index_t e : sd.edge_ids) {
            const auto& nodes = part.edges[e].nodes;
            for (int c = 0; c < d; ++c) {
                std::vector<index_t> slots(nodes.size());
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    slots[k] = ni + part.interface_node_pos(s, nodes[k]) * d + c;
                    plain[slots[k]] = false;
                }
                // avg column: constant 1 on the edge
                for (index_t g : slots) t.add(g, slots[0], 1.0);
                // deviation columns
                for (std::size_t k = 1; k < slots.size(); ++k) {
                    t.add(slots[0], slots[k], -1.0);
                    t.add(slots[k], slots[k], 1.0);
                }
            }
        }
        for (index_t g = 0; g < nvloc; ++g)
            if (plain[g]) t.add(g, g, 1.0);
        cob.T[s] = t.build();
    }
    return cob;
}

} // namespace fetistokes

#endif // FETISTOKES_DD_CHANGE_OF_BASIS_HPP
