#include <catch2/catch_amalgamated.hpp>

#include <fetistokes/fem/assemble.hpp>
#include <fetistokes/fem/element.hpp>
#include <fetistokes/fem/manufactured.hpp>

#include "test_helpers.hpp"

using namespace fetistokes;
using testutil::random_vector;
using testutil::to_dense;

namespace {

std::array<double, 3> zero_force(const std::array<double, 3>&) { return {0.0, 0.0, 0.0}; }
std::array<double, 3> const_force(const std::array<double, 3>&) { return {3.0, -2.0, 1.0}; }

ManufacturedCase with_force(int dim, std::array<double, 3> (*f)(const std::array<double, 3>&)) {
    ManufacturedCase mc = manufactured_case(dim);
    mc.body_force = f;
    return mc;
}

/// Map a local velocity slot of subdomain s to its global velocity dof.
std::vector<index_t> local_to_global(const DofPartition& part, index_t s) {
    const auto& sd = part.sub[s];
    const int d = part.dim;
    std::vector<index_t> map(sd.num_interior() + sd.interface_nodes.size() * d);
    for (index_t i = 0; i < sd.num_interior(); ++i) map[i] = sd.vel_interior[i];
    for (std::size_t g = 0; g < sd.interface_nodes.size(); ++g)
        for (int c = 0; c < d; ++c)
            map[sd.num_interior() + g * d + c] = sd.interface_nodes[g] * d + c;
    return map;
}

} // namespace

TEST_CASE("element stiffness: row sums, symmetry, energy of u = x") {
    for (int dim : {2, 3}) {
        std::array<double, 3> hs{0.25, 0.25, 0.25};
        Eigen::MatrixXd k = element_stiffness(dim, hs);
        for (int a = 0; a < k.rows(); ++a) CHECK(std::abs(k.row(a).sum()) < 1e-14);
        CHECK((k - k.transpose()).norm() == 0.0);

        // interpolate u(x) = x: energy = int |grad u|^2 = h^dim
        Eigen::VectorXd u(k.rows());
        for (int a = 0; a < k.rows(); ++a) {
            int di = a % 3;
            u(a) = di * hs[0] / 2.0;
        }
        double hdim = std::pow(hs[0], dim);
        CHECK(u.dot(k * u) == Catch::Approx(hdim).epsilon(1e-12));
    }
}

TEST_CASE("element stiffness kernel is exactly the constants") {
    for (int dim : {2, 3}) {
        Eigen::MatrixXd k = element_stiffness(dim, {0.5, 0.5, 0.5});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
        int zeros = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()(i)) < 1e-12) ++zeros;
        CHECK(zeros == 1);
        CHECK(es.eigenvalues()(0) > -1e-13);
    }
}

TEST_CASE("element divergence: linear field against constant pressure") {
    for (int dim : {2, 3}) {
        std::array<double, 3> hs{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        Eigen::MatrixXd b = element_divergence(dim, hs);
        // u = (x, 0, 0) interpolated; -int div(u) * 1 = -h^dim
        const int nv = q2_nodes_per_elem(dim);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(nv * dim);
        for (int a = 0; a < nv; ++a) u(a * dim + 0) = (a % 3) * hs[0] / 2.0;
        double total = (b * u).sum(); // sum over pressure rows = test against q = 1
        CHECK(total == Catch::Approx(-std::pow(hs[0], dim)).epsilon(1e-12));
    }
}

TEST_CASE("element matrices match a higher-order quadrature oracle") {
    for (int dim : {2, 3}) {
        std::array<double, 3> hs{0.2, 0.2, 0.2};
        Eigen::MatrixXd b3 = element_divergence(dim, hs, 3);
        Eigen::MatrixXd b5 = element_divergence(dim, hs, 5);
        CHECK((b3 - b5).cwiseAbs().maxCoeff() < 1e-14);
        Eigen::MatrixXd k3 = element_stiffness(dim, hs, 3);
        Eigen::MatrixXd k5 = element_stiffness(dim, hs, 5);
        CHECK((k3 - k5).cwiseAbs().maxCoeff() < 1e-13);
        Eigen::MatrixXd z3 = pressure_mass(dim, hs, 3);
        Eigen::MatrixXd z5 = pressure_mass(dim, hs, 5);
        CHECK((z3 - z5).cwiseAbs().maxCoeff() < 1e-15);

        // b(u, q) at random coefficients agrees with the oracle rule
        for (int trial = 0; trial < 10; ++trial) {
            Vector u = random_vector(b3.cols());
            Vector q = random_vector(b3.rows());
            Eigen::Map<const Eigen::VectorXd> ue(u.data(), u.size());
            Eigen::Map<const Eigen::VectorXd> qe(q.data(), q.size());
            CHECK(qe.dot(b3 * ue) == Catch::Approx(qe.dot(b5 * ue)).margin(1e-13));
        }
    }
}

TEST_CASE("pressure mass: unit domain volume and spectral bounds") {
    {
        BoxMesh m = build_mesh(2, {2, 2}, 3);
        GlobalSystem g = assemble_global(m);
        Vector ones(m.pressure_nodes(), 1.0);
        CHECK(dot(ones, spmv(g.Z, ones)) == Catch::Approx(1.0).epsilon(1e-12));

        Eigen::MatrixXd z = to_dense(g.Z);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z, Eigen::EigenvaluesOnly);
        double h2 = m.h * m.h;
        double c = es.eigenvalues()(0) / h2, C = es.eigenvalues()(z.rows() - 1) / h2;
        CHECK(c > 0.0);
        CHECK(C < 10.0); // observed: c ~ 1/9 ... C ~ 4 for Q1 on squares
        CHECK(c < C);
    }
    {
        BoxMesh m = build_mesh(3, {2, 2, 2}, 2);
        GlobalSystem g = assemble_global(m);
        Vector ones(m.pressure_nodes(), 1.0);
        CHECK(dot(ones, spmv(g.Z, ones)) == Catch::Approx(1.0).epsilon(1e-12));
        Eigen::MatrixXd z = to_dense(g.Z);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z, Eigen::EigenvaluesOnly);
        double h3 = m.h * m.h * m.h;
        CHECK(es.eigenvalues()(0) / h3 > 0.0);
        CHECK(es.eigenvalues()(z.rows() - 1) / h3 < 10.0);
    }
}

TEST_CASE("global divergence rows annihilate constants against free velocity") {
    BoxMesh m = build_mesh(2, {2, 2}, 2);
    GlobalSystem g = assemble_global(m);
    // 1^T B w = -int div(w) = 0 for any w in the zero-trace space
    for (int trial = 0; trial < 5; ++trial) {
        Vector w = random_vector(g.num_free);
        Vector bw = spmv(g.B, w);
        double total = 0.0;
        for (double v : bw) total += v;
        CHECK(std::abs(total) < 1e-12 * norm2(w));
    }
}

TEST_CASE("subdomain quadratic forms sum to the global form") {
    for (int dim : {2, 3}) {
        BoxMesh m = build_mesh(dim, dim == 2 ? std::vector<index_t>{2, 2}
                                             : std::vector<index_t>{2, 2, 2}, 2);
        DofPartition p = classify_dofs(m);
        GlobalSystem g = assemble_global(m);
        Vector wfree = random_vector(g.num_free);
        // continuous nodal field over all dofs
        Vector wall(m.vel_dofs(), 0.0);
        for (index_t dof = 0; dof < m.vel_dofs(); ++dof)
            if (g.free_index[dof] >= 0) wall[dof] = wfree[g.free_index[dof]];

        double global_form = dot(wfree, spmv(g.A, wfree));
        double sum = 0.0;
        for (index_t s = 0; s < m.num_subdomains(); ++s) {
            LocalSystem ls = assemble_local(m, p, s);
            auto map = local_to_global(p, s);
            Vector wloc(map.size());
            for (std::size_t i = 0; i < map.size(); ++i) wloc[i] = wall[map[i]];
            sum += dot(wloc, spmv(ls.A, wloc));
        }
        CHECK(sum == Catch::Approx(global_form).epsilon(1e-12));
    }
}

TEST_CASE("dual blocks are subdomain-local and sized consistently") {
    BoxMesh m = build_mesh(3, {2, 2, 2}, 2);
    DofPartition p = classify_dofs(m);
    for (index_t s = 0; s < m.num_subdomains(); ++s) {
        SubdomainBlocks b = assemble_subdomain(m, p, s);
        // nodal split: dual slots = all interface slots except vertex dofs
        index_t expected = 0;
        for (index_t node : p.sub[s].interface_nodes)
            if (p.vel_node_class[node] != NodeClass::Vertex) expected += m.dim;
        CHECK(b.A_DD.rows == expected);
        CHECK(b.A_DD.cols == expected);
        CHECK(b.A_II.rows == p.sub[s].num_interior());
    }
}

TEST_CASE("subdomain blocks reproduce the monolithic matrices under continuity") {
    for (int dim : {2, 3}) {
        BoxMesh m = build_mesh(dim, dim == 2 ? std::vector<index_t>{3, 2}
                                             : std::vector<index_t>{2, 2, 2}, 2);
        DofPartition p = classify_dofs(m);
        GlobalSystem g = assemble_global(m);

        TripletBuilder ta(g.num_free, g.num_free);
        TripletBuilder tb(m.pressure_nodes(), g.num_free);
        for (index_t s = 0; s < m.num_subdomains(); ++s) {
            LocalSystem ls = assemble_local(m, p, s);
            auto map = local_to_global(p, s);
            for (index_t i = 0; i < ls.A.rows; ++i)
                for (index_t k = ls.A.row_ptr[i]; k < ls.A.row_ptr[i + 1]; ++k)
                    ta.add(g.free_index[map[i]], g.free_index[map[ls.A.col_idx[k]]],
                           ls.A.values[k]);
            const auto& sd = p.sub[s];
            std::vector<index_t> prow(ls.npi + ls.npg);
            for (index_t i = 0; i < ls.npi; ++i) prow[i] = sd.pressure_interior[i];
            for (index_t i = 0; i < ls.npg; ++i) prow[ls.npi + i] = p.qgamma[sd.pressure_gamma[i]];
            for (index_t i = 0; i < ls.B.rows; ++i)
                for (index_t k = ls.B.row_ptr[i]; k < ls.B.row_ptr[i + 1]; ++k)
                    tb.add(prow[i], g.free_index[map[ls.B.col_idx[k]]], ls.B.values[k]);
        }
        SparseMat a2 = ta.build(), b2 = tb.build();
        Eigen::MatrixXd da = to_dense(g.A) - to_dense(a2);
        Eigen::MatrixXd db = to_dense(g.B) - to_dense(b2);
        CHECK(da.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(db.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("assemble_rhs: zero force gives zero load") {
    BoxMesh m = build_mesh(2, {2, 2}, 2);
    DofPartition p = classify_dofs(m);
    ChangeOfBasis cob = build_change_of_basis(p);
    RhsBlocks rhs = assemble_rhs(m, p, cob, with_force(2, zero_force));
    for (index_t s = 0; s < m.num_subdomains(); ++s) {
        CHECK(norm2(rhs.f_I[s]) == 0.0);
        CHECK(norm2(rhs.f_D[s]) == 0.0);
    }
    CHECK(norm2(rhs.f_Pi) == 0.0);
}

TEST_CASE("constant force: loads sum to c |Omega| per component (partition of unity)") {
    for (int dim : {2, 3}) {
        BoxMesh m = build_mesh(dim, dim == 2 ? std::vector<index_t>{2, 2}
                                             : std::vector<index_t>{2, 2, 2}, 2);
        Vector load = assemble_global_load(m, with_force(dim, const_force));
        std::array<double, 3> sums{0.0, 0.0, 0.0};
        for (index_t node = 0; node < m.vel_nodes(); ++node)
            for (int c = 0; c < dim; ++c) sums[c] += load[node * dim + c];
        auto expect = const_force({});
        for (int c = 0; c < dim; ++c)
            CHECK(sums[c] == Catch::Approx(expect[c]).epsilon(1e-12));
    }
}

TEST_CASE("subdomain loads assemble to the global load") {
    BoxMesh m = build_mesh(3, {2, 2, 2}, 2);
    DofPartition p = classify_dofs(m);
    ManufacturedCase mc = manufactured_case(3);
    Vector global = assemble_global_load(m, mc);
    Vector summed(m.vel_dofs(), 0.0);
    for (index_t s = 0; s < m.num_subdomains(); ++s) {
        Vector f = assemble_local_load(m, p, s, mc);
        auto map = local_to_global(p, s);
        for (std::size_t i = 0; i < map.size(); ++i) summed[map[i]] += f[i];
    }
    for (index_t dof = 0; dof < m.vel_dofs(); ++dof)
        if (!m.vel_node_on_boundary(dof / 3))
            CHECK(summed[dof] == Catch::Approx(global[dof]).margin(1e-13));
}

TEST_CASE("exact_eval: special points") {
    ManufacturedCase m2 = manufactured_case(2);
    auto v = exact_eval(m2, {0.5, 0.5, 0.0});
    CHECK(std::abs(v.u[0]) < 1e-15);
    CHECK(std::abs(v.u[1]) < 1e-15);
    CHECK(v.p == 0.0);

    ManufacturedCase m3 = manufactured_case(3);
    CHECK(exact_eval(m3, {0.5, 0.5, 0.5}).p == 0.0);
}

TEST_CASE("exact velocity is divergence free (finite differences)") {
    for (int dim : {2, 3}) {
        ManufacturedCase mc = manufactured_case(dim);
        const double step = 1e-6;
        for (int trial = 0; trial < 100; ++trial) {
            auto x = random_vector(3, 0.05, 0.95);
            std::array<double, 3> pt{x[0], x[1], dim == 3 ? x[2] : 0.0};
            double div = 0.0;
            for (int c = 0; c < dim; ++c) {
                auto xp = pt, xm = pt;
                xp[c] += step;
                xm[c] -= step;
                div += (mc.velocity(xp)[c] - mc.velocity(xm)[c]) / (2.0 * step);
            }
            CHECK(std::abs(div) < 1e-6);
        }
    }
}

TEST_CASE("exact velocity vanishes on the boundary") {
    for (int dim : {2, 3}) {
        ManufacturedCase mc = manufactured_case(dim);
        for (int face = 0; face < 2 * dim; ++face)
            for (int trial = 0; trial < 20; ++trial) {
                auto x = random_vector(3, 0.0, 1.0);
                std::array<double, 3> pt{x[0], x[1], dim == 3 ? x[2] : 0.0};
                pt[face / 2] = face % 2 ? 1.0 : 0.0;
                auto u = mc.velocity(pt);
                for (int c = 0; c < dim; ++c) CHECK(std::abs(u[c]) < 1e-14);
            }
    }
}

TEST_CASE("body force agrees with finite differences of -lap(u) + grad(p)") {
    for (int dim : {2, 3}) {
        ManufacturedCase mc = manufactured_case(dim);
        const double step = 1e-4;
        double max_err = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            auto xr = random_vector(3, 0.01, 0.99);
            std::array<double, 3> x{xr[0], xr[1], dim == 3 ? xr[2] : 0.0};
            auto f = mc.body_force(x);
            for (int c = 0; c < dim; ++c) {
                double lap = 0.0;
                auto uc = mc.velocity(x)[c];
                for (int a = 0; a < dim; ++a) {
                    auto xp = x, xm = x;
                    xp[a] += step;
                    xm[a] -= step;
                    lap += (mc.velocity(xp)[c] - 2.0 * uc + mc.velocity(xm)[c]) / (step * step);
                }
                auto xp = x, xm = x;
                xp[c] += step;
                xm[c] -= step;
                double dp = (mc.pressure(xp) - mc.pressure(xm)) / (2.0 * step);
                max_err = std::max(max_err, std::abs(f[c] - (-lap + dp)));
            }
        }
        CHECK(max_err <= 1e-5);
    }
}
