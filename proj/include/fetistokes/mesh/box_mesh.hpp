/// @file box_mesh.hpp
/// @brief Structured Q2-Q1 box mesh on the unit square/cube with a regular
///        subdomain decomposition.

#ifndef FETISTOKES_MESH_BOX_MESH_HPP
#define FETISTOKES_MESH_BOX_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "../core/types.hpp"

namespace fetistokes {

/// Uniform mesh of [0,1]^dim split into subs[a] subdomains per axis, each
/// subdomain holding ratio^dim elements (ratio = H/h). Velocity nodes live on
/// the Q2 grid (spacing h/2), pressure nodes on the Q1 grid (spacing h).
/// Unused axes (a >= dim) have extent 1 so that index arithmetic stays
/// three-dimensional.
struct BoxMesh {
    int dim = 2;
    std::array<index_t, 3> subs{1, 1, 1};
    index_t ratio = 2;
    std::array<index_t, 3> elems{1, 1, 1};
    std::array<double, 3> hs{1.0, 1.0, 1.0};
    double h = 1.0;           // element width along axis 0
    double cell_volume = 1.0; // product of element widths
    std::array<index_t, 3> nv{1, 1, 1}; // velocity grid points per axis
    std::array<index_t, 3> np{1, 1, 1}; // pressure grid points per axis

    index_t num_subdomains() const { return subs[0] * subs[1] * subs[2]; }
    index_t num_elements() const { return elems[0] * elems[1] * elems[2]; }
    index_t vel_nodes() const { return nv[0] * nv[1] * nv[2]; }
    index_t pressure_nodes() const { return np[0] * np[1] * np[2]; }
    index_t vel_dofs() const { return vel_nodes() * dim; }

    index_t vel_node_id(index_t i, index_t j, index_t k) const {
        return i + nv[0] * (j + nv[1] * k);
    }
    std::array<index_t, 3> vel_node_ijk(index_t id) const {
        return {id % nv[0], (id / nv[0]) % nv[1], id / (nv[0] * nv[1])};
    }
    std::array<double, 3> vel_node_pos(index_t id) const {
        auto ijk = vel_node_ijk(id);
        return {ijk[0] * hs[0] / 2.0, ijk[1] * hs[1] / 2.0, ijk[2] * hs[2] / 2.0};
    }
    bool vel_node_on_boundary(index_t id) const {
        auto ijk = vel_node_ijk(id);
        for (int a = 0; a < dim; ++a)
            if (ijk[a] == 0 || ijk[a] == nv[a] - 1) return true;
        return false;
    }

    index_t pressure_node_id(index_t i, index_t j, index_t k) const {
        return i + np[0] * (j + np[1] * k);
    }
    std::array<index_t, 3> pressure_node_ijk(index_t id) const {
        return {id % np[0], (id / np[0]) % np[1], id / (np[0] * np[1])};
    }
    std::array<double, 3> pressure_node_pos(index_t id) const {
        auto ijk = pressure_node_ijk(id);
        return {ijk[0] * hs[0], ijk[1] * hs[1], ijk[2] * hs[2]};
    }

    index_t sub_id(index_t sx, index_t sy, index_t sz) const {
        return sx + subs[0] * (sy + subs[1] * sz);
    }
    std::array<index_t, 3> sub_ijk(index_t s) const {
        return {s % subs[0], (s / subs[0]) % subs[1], s / (subs[0] * subs[1])};
    }

    index_t elem_id(index_t ex, index_t ey, index_t ez) const {
        return ex + elems[0] * (ey + elems[1] * ez);
    }

    /// Subdomain range [lo, hi] sharing velocity grid index i along axis a.
    void vel_sub_range(int a, index_t i, index_t& lo, index_t& hi) const {
        if (a >= dim) {
            lo = hi = 0;
            return;
        }
        index_t q = i / (2 * ratio), r = i % (2 * ratio);
        if (r == 0 && q > 0 && q < subs[a]) {
            lo = q - 1;
            hi = q;
        } else {
            lo = hi = (q < subs[a]) ? q : subs[a] - 1;
        }
    }
    void pressure_sub_range(int a, index_t i, index_t& lo, index_t& hi) const {
        if (a >= dim) {
            lo = hi = 0;
            return;
        }
        index_t q = i / ratio, r = i % ratio;
        if (r == 0 && q > 0 && q < subs[a]) {
            lo = q - 1;
            hi = q;
        } else {
            lo = hi = (q < subs[a]) ? q : subs[a] - 1;
        }
    }
};

inline BoxMesh build_mesh(int dim, const std::vector<index_t>& subs_per_axis, index_t ratio) {
    if (dim != 2 && dim != 3)
        throw ConfigError("build_mesh: dim must be 2 or 3");
    if (static_cast<int>(subs_per_axis.size()) != dim)
        throw ConfigError("build_mesh: need one subdomain count per axis");
    if (ratio < 2)
        throw ConfigError("build_mesh: ratio H/h must be >= 2 (interior pressure node needed)");
    for (index_t s : subs_per_axis)
        if (s < 1) throw ConfigError("build_mesh: subdomain counts must be >= 1");

    BoxMesh m;
    m.dim = dim;
    m.ratio = ratio;
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            m.subs[a] = subs_per_axis[a];
            m.elems[a] = m.subs[a] * ratio;
            m.hs[a] = 1.0 / static_cast<double>(m.elems[a]);
            m.nv[a] = 2 * m.elems[a] + 1;
            m.np[a] = m.elems[a] + 1;
        } else {
            m.subs[a] = 1;
            m.elems[a] = 1;
            m.hs[a] = 1.0;
            m.nv[a] = 1;
            m.np[a] = 1;
        }
    }
    m.h = m.hs[0];
    m.cell_volume = 1.0;
    for (int a = 0; a < dim; ++a) m.cell_volume *= m.hs[a];
    return m;
}

} // namespace fetistokes

#endif // FETISTOKES_MESH_BOX_MESH_HPP
