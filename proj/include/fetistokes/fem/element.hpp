/// @file element.hpp
/// @brief Q2-Q1 Taylor-Hood element matrices on axis-aligned boxes via tensor
///        Gauss quadrature. The 3-point rule is exact for every Q2-Q1
///        integrand appearing in the stiffness, divergence, and mass forms.

#ifndef FETISTOKES_FEM_ELEMENT_HPP
#define FETISTOKES_FEM_ELEMENT_HPP

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "../core/types.hpp"

namespace fetistokes {

/// Gauss-Legendre rule on [0,1], n in {3,4,5}.
inline void gauss_rule(int n, std::vector<double>& pts, std::vector<double>& wts) {
    switch (n) {
        case 3: {
            const double a = 0.5 * std::sqrt(3.0 / 5.0);
            pts = {0.5 - a, 0.5, 0.5 + a};
            wts = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
            return;
        }
        case 4: {
            const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
            const double wa = (18.0 + std::sqrt(30.0)) / 72.0;
            const double wb = (18.0 - std::sqrt(30.0)) / 72.0;
            pts = {0.5 - b / 2, 0.5 - a / 2, 0.5 + a / 2, 0.5 + b / 2};
            wts = {wb, wa, wa, wb};
            return;
        }
        case 5: {
            const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            const double w0 = 128.0 / 225.0 / 2.0;
            const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0 / 2.0;
            const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0 / 2.0;
            pts = {0.5 - b / 2, 0.5 - a / 2, 0.5, 0.5 + a / 2, 0.5 + b / 2};
            wts = {wb, wa, w0, wa, wb};
            return;
        }
        default: throw ConfigError("gauss_rule: supported point counts are 3, 4, 5");
    }
}

/// 1D quadratic shape functions on [0,1], nodes {0, 1/2, 1}.
inline void shape_q2(double t, std::array<double, 3>& v, std::array<double, 3>& dv) {
    v[0] = (2.0 * t - 1.0) * (t - 1.0);
    v[1] = 4.0 * t * (1.0 - t);
    v[2] = t * (2.0 * t - 1.0);
    dv[0] = 4.0 * t - 3.0;
    dv[1] = 4.0 - 8.0 * t;
    dv[2] = 4.0 * t - 1.0;
}

/// 1D linear shape functions on [0,1], nodes {0, 1}.
inline void shape_q1(double t, std::array<double, 2>& v, std::array<double, 2>& dv) {
    v[0] = 1.0 - t;
    v[1] = t;
    dv[0] = -1.0;
    dv[1] = 1.0;
}

/// Values and physical gradients of all Q2/Q1 basis functions of one box
/// element at one quadrature point (reference coordinates), plus the weight
/// scaled by the element volume.
struct ElementQuadPoint {
    std::array<double, 3> pos_ref;   // reference coordinates in [0,1]^dim
    double weight = 0.0;             // includes the element Jacobian
    std::vector<double> q2;          // Q2 value per velocity node
    std::vector<std::array<double, 3>> q2_grad;
    std::vector<double> q1;          // Q1 value per pressure node
};

inline int q2_nodes_per_elem(int dim) { return dim == 2 ? 9 : 27; }
inline int q1_nodes_per_elem(int dim) { return dim == 2 ? 4 : 8; }

/// Tabulate the tensor Gauss rule on a box with widths hs.
inline std::vector<ElementQuadPoint> element_quadrature(int dim, const std::array<double, 3>& hs,
                                                        int points_per_axis = 3) {
    std::vector<double> pts, wts;
    gauss_rule(points_per_axis, pts, wts);
    const int nzq = (dim == 3) ? points_per_axis : 1;
    const int nq2 = q2_nodes_per_elem(dim);
    const int nq1 = q1_nodes_per_elem(dim);
    double vol = hs[0] * hs[1] * (dim == 3 ? hs[2] : 1.0);

    std::vector<ElementQuadPoint> out;
    for (int kz = 0; kz < nzq; ++kz)
        for (int ky = 0; ky < points_per_axis; ++ky)
            for (int kx = 0; kx < points_per_axis; ++kx) {
                ElementQuadPoint qp;
                std::array<double, 3> t{pts[kx], pts[ky], dim == 3 ? pts[kz] : 0.0};
                qp.pos_ref = t;
                qp.weight = wts[kx] * wts[ky] * (dim == 3 ? wts[kz] : 1.0) * vol;
                std::array<std::array<double, 3>, 3> n2, dn2;
                std::array<std::array<double, 2>, 3> n1, dn1;
                for (int a = 0; a < dim; ++a) {
                    shape_q2(t[a], n2[a], dn2[a]);
                    shape_q1(t[a], n1[a], dn1[a]);
                }
                qp.q2.resize(nq2);
                qp.q2_grad.resize(nq2);
                for (int a = 0; a < nq2; ++a) {
                    int dx = a % 3, dy = (a / 3) % 3, dz = a / 9;
                    double vx = n2[0][dx], vy = n2[1][dy], vz = dim == 3 ? n2[2][dz] : 1.0;
                    qp.q2[a] = vx * vy * vz;
                    qp.q2_grad[a] = {dn2[0][dx] / hs[0] * vy * vz, vx * dn2[1][dy] / hs[1] * vz,
                                     dim == 3 ? vx * vy * dn2[2][dz] / hs[2] : 0.0};
                }
                qp.q1.resize(nq1);
                for (int r = 0; r < nq1; ++r) {
                    int dx = r % 2, dy = (r / 2) % 2, dz = r / 4;
                    qp.q1[r] = n1[0][dx] * n1[1][dy] * (dim == 3 ? n1[2][dz] : 1.0);
                }
                out.push_back(std::move(qp));
            }
    return out;
}

/// Scalar Laplacian stiffness of one Q2 component: K[a][b] = int grad(phi_a).grad(phi_b).
inline Eigen::MatrixXd element_stiffness(int dim, const std::array<double, 3>& hs,
                                         int points_per_axis = 3) {
    const int n = q2_nodes_per_elem(dim);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (const auto& qp : element_quadrature(dim, hs, points_per_axis))
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double s = 0.0;
                for (int c = 0; c < dim; ++c) s += qp.q2_grad[a][c] * qp.q2_grad[b][c];
                k(a, b) += qp.weight * s;
            }
    return k;
}

/// Divergence coupling: B[r][a*dim+c] = -int (d phi_a / d x_c) q_r.
inline Eigen::MatrixXd element_divergence(int dim, const std::array<double, 3>& hs,
                                          int points_per_axis = 3) {
    const int nv = q2_nodes_per_elem(dim), npr = q1_nodes_per_elem(dim);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(npr, nv * dim);
    for (const auto& qp : element_quadrature(dim, hs, points_per_axis))
        for (int r = 0; r < npr; ++r)
            for (int a = 0; a < nv; ++a)
                for (int c = 0; c < dim; ++c)
                    b(r, a * dim + c) -= qp.weight * qp.q2_grad[a][c] * qp.q1[r];
    return b;
}

/// Q1 pressure mass matrix: Z[r][s] = int q_r q_s.
inline Eigen::MatrixXd pressure_mass(int dim, const std::array<double, 3>& hs,
                                     int points_per_axis = 3) {
    const int npr = q1_nodes_per_elem(dim);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(npr, npr);
    for (const auto& qp : element_quadrature(dim, hs, points_per_axis))
        for (int r = 0; r < npr; ++r)
            for (int s = 0; s < npr; ++s) z(r, s) += qp.weight * qp.q1[r] * qp.q1[s];
    return z;
}

} // namespace fetistokes

#endif // FETISTOKES_FEM_ELEMENT_HPP
