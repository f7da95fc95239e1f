/// @file interface_jump.hpp
/// @brief Fully redundant Lagrange multipliers: the signed incidence maps
///        B_Delta per subdomain, the 1/N_x scaling D_Delta, and the
///        projection onto range(B_Delta).
///
/// Every dual coordinate shared by N subdomains generates one multiplier per
/// unordered subdomain pair, N(N-1)/2 in total, with entries +1 on the
/// lexicographically smaller subdomain and -1 on the larger.

#ifndef FETISTOKES_MESH_INTERFACE_JUMP_HPP
#define FETISTOKES_MESH_INTERFACE_JUMP_HPP

#include <vector>

#include "../core/types.hpp"
#include "../core/vector_ops.hpp"
#include "dof_partition.hpp"

namespace fetistokes {

struct InterfaceJump {
    struct Multiplier {
        index_t node;
        int comp;
        index_t sub_plus;  // +1 entry
        index_t sub_minus; // -1 entry
    };
    std::vector<Multiplier> multipliers;
    std::vector<double> delta_dagger; // per multiplier, 1/N_x of its node

    struct Entry {
        index_t mult;
        double sign;
    };
    // per subdomain, per local dual slot: the multipliers touching it
    std::vector<std::vector<std::vector<Entry>>> slots;

    index_t num_multipliers() const { return static_cast<index_t>(multipliers.size()); }

    /// w = B_Delta^(s)^T lambda
    void apply_BdeltaT(index_t s, const Vector& lam, Vector& w) const {
        const auto& sl = slots[s];
        w.assign(sl.size(), 0.0);
        for (std::size_t d = 0; d < sl.size(); ++d)
            for (const Entry& e : sl[d]) w[d] += e.sign * lam[e.mult];
    }

    /// w = B_{Delta,D}^(s)^T lambda
    void apply_BdeltaDT(index_t s, const Vector& lam, Vector& w) const {
        const auto& sl = slots[s];
        w.assign(sl.size(), 0.0);
        for (std::size_t d = 0; d < sl.size(); ++d)
            for (const Entry& e : sl[d]) w[d] += e.sign * delta_dagger[e.mult] * lam[e.mult];
    }

    /// out += B_Delta^(s) w
    void add_Bdelta(index_t s, const Vector& w, Vector& out) const {
        const auto& sl = slots[s];
        for (std::size_t d = 0; d < sl.size(); ++d)
            for (const Entry& e : sl[d]) out[e.mult] += e.sign * w[d];
    }

    /// out += B_{Delta,D}^(s) w
    void add_BdeltaD(index_t s, const Vector& w, Vector& out) const {
        const auto& sl = slots[s];
        for (std::size_t d = 0; d < sl.size(); ++d)
            for (const Entry& e : sl[d]) out[e.mult] += e.sign * delta_dagger[e.mult] * w[d];
    }

    /// lambda = B_Delta w for per-subdomain dual vectors w
    Vector assemble_jump(const std::vector<Vector>& w) const {
        Vector out(num_multipliers(), 0.0);
        for (index_t s = 0; s < static_cast<index_t>(slots.size()); ++s)
            add_Bdelta(s, w[s], out);
        return out;
    }
};

inline InterfaceJump build_jump(const DofPartition& part) {
    InterfaceJump j;
    const BoxMesh& mesh = part.mesh;
    const int d = part.dim;
    j.slots.resize(part.sub.size());
    for (std::size_t s = 0; s < part.sub.size(); ++s)
        j.slots[s].resize(part.sub[s].dual.size());

    std::vector<index_t> sharers;
    for (index_t n = 0; n < mesh.vel_nodes(); ++n) {
        NodeClass nc = part.vel_node_class[n];
        bool is_dual_node = (nc == NodeClass::Face) ||
                            (nc == NodeClass::Edge &&
                             n != part.edges[part.edge_of_node[n]].nodes[0]);
        if (!is_dual_node) continue;
        detail::sharing_subs(mesh, n, sharers);
        const double dd = 1.0 / static_cast<double>(sharers.size());
        for (int c = 0; c < d; ++c) {
            for (std::size_t a = 0; a < sharers.size(); ++a)
                for (std::size_t b = a + 1; b < sharers.size(); ++b) {
                    index_t si = sharers[a], sj = sharers[b];
                    index_t mid = j.num_multipliers();
                    j.multipliers.push_back({n, c, si, sj});
                    j.delta_dagger.push_back(dd);
                    j.slots[si][part.dual_index(si, n, c)].push_back({mid, +1.0});
                    j.slots[sj][part.dual_index(sj, n, c)].push_back({mid, -1.0});
                }
        }
    }
    return j;
}

/// Orthogonal projection onto range(B_Delta): P = B_Delta B_{Delta,D}^T.
/// Fixes range elements and annihilates null(B_Delta^T).
inline Vector range_project(const InterfaceJump& jump, const Vector& lam) {
    Vector out(lam.size(), 0.0);
    Vector w;
    for (index_t s = 0; s < static_cast<index_t>(jump.slots.size()); ++s) {
        jump.apply_BdeltaDT(s, lam, w);
        jump.add_Bdelta(s, w, out);
    }
    return out;
}

} // namespace fetistokes

#endif // FETISTOKES_MESH_INTERFACE_JUMP_HPP
