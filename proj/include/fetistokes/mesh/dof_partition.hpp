/// @file dof_partition.hpp
/// @brief Interior/dual/primal classification of velocity DOFs, interior/
///        interface split of pressure DOFs, and the subdomain index maps the
///        rest of the solver is built on.
///
/// Velocity nodes on the subdomain interface are classified geometrically:
/// one shared subdomain plane -> face, two -> edge (3D) or vertex (2D),
/// three -> vertex (3D). Subdomain vertices are primal. In 3D each interface
/// edge additionally contributes one primal average per velocity component;
/// the edge's first interior node hosts the average coordinate after the
/// change of basis and the remaining edge nodes host zero-average deviations,
/// which stay dual.

#ifndef FETISTOKES_MESH_DOF_PARTITION_HPP
#define FETISTOKES_MESH_DOF_PARTITION_HPP

#include <algorithm>
#include <array>
#include <vector>

#include "../core/types.hpp"
#include "box_mesh.hpp"

namespace fetistokes {

enum class PrimalSpec { Vertices, VerticesEdges };
enum class NodeClass : unsigned char { Boundary, Interior, Face, Edge, Vertex };

struct DofPartition {
    int dim = 2;
    BoxMesh mesh;
    PrimalSpec primal_spec = PrimalSpec::Vertices;

    std::vector<NodeClass> vel_node_class; // per velocity node
    std::vector<int> nshare;               // subdomains sharing the node (0 on boundary)
    std::vector<index_t> edge_of_node;     // interface-edge id per velocity node, -1 if none

    struct Edge {
        std::vector<index_t> subs;  // sharing subdomains, ascending
        std::vector<index_t> nodes; // interior velocity nodes of the edge, ascending
    };
    std::vector<Edge> edges;

    struct PrimalDof {
        index_t node; // vertex node, or first edge node hosting the average slot
        int comp;
        index_t edge; // -1 for vertex nodal primal
    };
    std::vector<PrimalDof> primal_dofs; // global primal numbering

    struct DualSlot {
        index_t node;
        int comp;
        index_t edge; // -1 for a plain nodal (face) slot, else deviation slot
    };

    struct Subdomain {
        std::vector<index_t> vel_interior;    // global velocity dof ids, ascending
        std::vector<index_t> interface_nodes; // free interface nodes, ascending
        std::vector<DualSlot> dual;           // final dual coordinates, slot order
        std::vector<index_t> primal;          // global primal ids, slot order
        std::vector<index_t> edge_ids;        // interface edges touching this subdomain
        std::vector<index_t> pressure_interior; // global pressure node ids, ascending
        std::vector<index_t> pressure_gamma;    // positions into qgamma, ascending
        // per interface slot (interface_nodes x comp): dual position or -1
        std::vector<index_t> slot_dual_pos;
        // per interface slot: local primal position or -1
        std::vector<index_t> slot_primal_pos;

        index_t num_interior() const { return static_cast<index_t>(vel_interior.size()); }
        index_t num_dual() const { return static_cast<index_t>(dual.size()); }
        index_t num_primal_loc() const { return static_cast<index_t>(primal.size()); }
    };
    std::vector<Subdomain> sub;

    std::vector<index_t> qgamma;     // interface pressure nodes, ascending
    std::vector<index_t> qgamma_pos; // per pressure node: position in qgamma or -1

    index_t num_primal() const { return static_cast<index_t>(primal_dofs.size()); }
    index_t num_qgamma() const { return static_cast<index_t>(qgamma.size()); }

    /// Position of a free interface node within sub.interface_nodes, -1 if absent.
    index_t interface_node_pos(index_t s, index_t node) const {
        const auto& v = sub[s].interface_nodes;
        auto it = std::lower_bound(v.begin(), v.end(), node);
        if (it == v.end() || *it != node) return -1;
        return static_cast<index_t>(it - v.begin());
    }

    /// Local dual index of the coordinate hosted at (node, comp) in subdomain s.
    index_t dual_index(index_t s, index_t node, int comp) const {
        index_t p = interface_node_pos(s, node);
        if (p < 0) return -1;
        return sub[s].slot_dual_pos[p * dim + comp];
    }
};

namespace detail {

inline void sharing_subs(const BoxMesh& m, index_t node, std::vector<index_t>& out) {
    out.clear();
    auto ijk = m.vel_node_ijk(node);
    std::array<index_t, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) m.vel_sub_range(a, ijk[a], lo[a], hi[a]);
    for (index_t sz = lo[2]; sz <= hi[2]; ++sz)
        for (index_t sy = lo[1]; sy <= hi[1]; ++sy)
            for (index_t sx = lo[0]; sx <= hi[0]; ++sx)
                out.push_back(m.sub_id(sx, sy, sz));
}

} // namespace detail

inline DofPartition classify_dofs(const BoxMesh& mesh, PrimalSpec spec) {
    if (mesh.dim == 2 && spec != PrimalSpec::Vertices)
        throw ConfigError("classify_dofs: 2D supports the vertex primal space only");
    if (mesh.dim == 3 && spec != PrimalSpec::VerticesEdges)
        throw ConfigError("classify_dofs: 3D requires vertex plus edge-average primal space");

    DofPartition p;
    p.dim = mesh.dim;
    p.mesh = mesh;
    p.primal_spec = spec;
    const int d = mesh.dim;
    const index_t nnodes = mesh.vel_nodes();
    const index_t nsub = mesh.num_subdomains();
    p.vel_node_class.assign(nnodes, NodeClass::Interior);
    p.nshare.assign(nnodes, 0);
    p.edge_of_node.assign(nnodes, -1);
    p.sub.resize(nsub);

    // classify velocity nodes
    std::vector<index_t> sharers;
    for (index_t n = 0; n < nnodes; ++n) {
        if (mesh.vel_node_on_boundary(n)) {
            p.vel_node_class[n] = NodeClass::Boundary;
            continue;
        }
        auto ijk = mesh.vel_node_ijk(n);
        int shared_axes = 0;
        for (int a = 0; a < d; ++a) {
            index_t lo, hi;
            mesh.vel_sub_range(a, ijk[a], lo, hi);
            if (hi > lo) ++shared_axes;
        }
        detail::sharing_subs(mesh, n, sharers);
        p.nshare[n] = static_cast<int>(sharers.size());
        if (shared_axes == 0) {
            p.vel_node_class[n] = NodeClass::Interior;
            for (int c = 0; c < d; ++c)
                p.sub[sharers[0]].vel_interior.push_back(n * d + c);
        } else if (shared_axes == 1) {
            p.vel_node_class[n] = NodeClass::Face;
        } else if (shared_axes == 2 && d == 3) {
            p.vel_node_class[n] = NodeClass::Edge;
        } else {
            p.vel_node_class[n] = NodeClass::Vertex;
        }
        if (shared_axes > 0)
            for (index_t s : sharers) p.sub[s].interface_nodes.push_back(n);
    }

    // interface edges (3D): maximal straight runs of Edge nodes between
    // subdomain lattice vertices, enumerated axis-major
    if (d == 3) {
        const index_t r = mesh.ratio;
        for (int a = 0; a < 3; ++a) {
            int e1 = (a + 1) % 3, e2 = (a + 2) % 3;
            if (e1 > e2) std::swap(e1, e2);
            for (index_t p2 = 1; p2 < mesh.subs[e2]; ++p2)
                for (index_t p1 = 1; p1 < mesh.subs[e1]; ++p1)
                    for (index_t seg = 0; seg < mesh.subs[a]; ++seg) {
                        DofPartition::Edge edge;
                        for (index_t t = 1; t < 2 * r; ++t) {
                            std::array<index_t, 3> ijk{};
                            ijk[a] = 2 * r * seg + t;
                            ijk[e1] = 2 * r * p1;
                            ijk[e2] = 2 * r * p2;
                            edge.nodes.push_back(mesh.vel_node_id(ijk[0], ijk[1], ijk[2]));
                        }
                        std::sort(edge.nodes.begin(), edge.nodes.end());
                        detail::sharing_subs(mesh, edge.nodes[0], edge.subs);
                        index_t eid = static_cast<index_t>(p.edges.size());
                        for (index_t n : edge.nodes) p.edge_of_node[n] = eid;
                        for (index_t s : edge.subs) p.sub[s].edge_ids.push_back(eid);
                        p.edges.push_back(std::move(edge));
                    }
        }
    }

    // global primal numbering: vertex nodal dofs first, then edge averages
    std::vector<index_t> vertex_primal_base(nnodes, -1);
    for (index_t n = 0; n < nnodes; ++n)
        if (p.vel_node_class[n] == NodeClass::Vertex) {
            vertex_primal_base[n] = static_cast<index_t>(p.primal_dofs.size());
            for (int c = 0; c < d; ++c) p.primal_dofs.push_back({n, c, -1});
        }
    std::vector<index_t> edge_primal_base(p.edges.size(), -1);
    for (index_t e = 0; e < static_cast<index_t>(p.edges.size()); ++e) {
        edge_primal_base[e] = static_cast<index_t>(p.primal_dofs.size());
        for (int c = 0; c < d; ++c)
            p.primal_dofs.push_back({p.edges[e].nodes[0], c, e});
    }

    // per-subdomain slot roles
    for (index_t s = 0; s < nsub; ++s) {
        auto& sd = p.sub[s];
        std::sort(sd.vel_interior.begin(), sd.vel_interior.end());
        std::sort(sd.interface_nodes.begin(), sd.interface_nodes.end());
        const index_t ng = static_cast<index_t>(sd.interface_nodes.size());
        sd.slot_dual_pos.assign(ng * d, -1);
        sd.slot_primal_pos.assign(ng * d, -1);
        for (index_t gi = 0; gi < ng; ++gi) {
            index_t n = sd.interface_nodes[gi];
            NodeClass nc = p.vel_node_class[n];
            index_t e = p.edge_of_node[n];
            for (int c = 0; c < d; ++c) {
                index_t slot = gi * d + c;
                if (nc == NodeClass::Vertex) {
                    sd.slot_primal_pos[slot] = static_cast<index_t>(sd.primal.size());
                    sd.primal.push_back(vertex_primal_base[n] + c);
                } else if (nc == NodeClass::Edge && n == p.edges[e].nodes[0]) {
                    sd.slot_primal_pos[slot] = static_cast<index_t>(sd.primal.size());
                    sd.primal.push_back(edge_primal_base[e] + c);
                } else {
                    sd.slot_dual_pos[slot] = static_cast<index_t>(sd.dual.size());
                    sd.dual.push_back({n, c, nc == NodeClass::Edge ? e : index_t(-1)});
                }
            }
        }
    }

    // pressure split
    const index_t npn = mesh.pressure_nodes();
    p.qgamma_pos.assign(npn, -1);
    for (index_t n = 0; n < npn; ++n) {
        auto ijk = mesh.pressure_node_ijk(n);
        std::array<index_t, 3> lo{}, hi{};
        int shared_axes = 0;
        for (int a = 0; a < 3; ++a) {
            mesh.pressure_sub_range(a, ijk[a], lo[a], hi[a]);
            if (hi[a] > lo[a]) ++shared_axes;
        }
        if (shared_axes == 0) {
            p.sub[mesh.sub_id(lo[0], lo[1], lo[2])].pressure_interior.push_back(n);
        } else {
            index_t qpos = static_cast<index_t>(p.qgamma.size());
            p.qgamma_pos[n] = qpos;
            p.qgamma.push_back(n);
            for (index_t sz = lo[2]; sz <= hi[2]; ++sz)
                for (index_t sy = lo[1]; sy <= hi[1]; ++sy)
                    for (index_t sx = lo[0]; sx <= hi[0]; ++sx)
                        p.sub[mesh.sub_id(sx, sy, sz)].pressure_gamma.push_back(qpos);
        }
    }
    return p;
}

inline DofPartition classify_dofs(const BoxMesh& mesh) {
    return classify_dofs(mesh, mesh.dim == 2 ? PrimalSpec::Vertices : PrimalSpec::VerticesEdges);
}

/// Per-subdomain class counts as a JSON string (test and debugging aid).
inline std::string partition_summary_json(const DofPartition& p) {
    std::string out = "{\"num_primal\":" + std::to_string(p.num_primal()) +
                      ",\"num_qgamma\":" + std::to_string(p.num_qgamma()) + ",\"subdomains\":[";
    for (std::size_t s = 0; s < p.sub.size(); ++s) {
        const auto& sd = p.sub[s];
        if (s) out += ",";
        out += "{\"interior\":" + std::to_string(sd.num_interior()) +
               ",\"dual\":" + std::to_string(sd.num_dual()) +
               ",\"primal\":" + std::to_string(sd.num_primal_loc()) +
               ",\"pressure_interior\":" + std::to_string(sd.pressure_interior.size()) +
               ",\"pressure_gamma\":" + std::to_string(sd.pressure_gamma.size()) + "}";
    }
    return out + "]}";
}

} // namespace fetistokes

#endif // FETISTOKES_MESH_DOF_PARTITION_HPP
