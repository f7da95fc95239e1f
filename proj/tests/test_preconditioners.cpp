#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include <fetistokes/dd/preconditioners.hpp>
#include <fetistokes/dd/reduced_system.hpp>

#include "test_helpers.hpp"

using namespace fetistokes;
using testutil::random_vector;
using testutil::to_dense;

namespace {

ReducedSystem make_system(int dim, std::vector<index_t> subs, index_t ratio) {
    BoxMesh mesh = build_mesh(dim, subs, ratio);
    auto part = std::make_shared<const DofPartition>(classify_dofs(mesh));
    return build_reduced(mesh, part);
}

Vector random_range_lambda(const ReducedSystem& sys) {
    std::vector<Vector> w(sys.num_sub());
    for (index_t s = 0; s < sys.num_sub(); ++s) w[s] = random_vector(sys.blocks[s].nd);
    return sys.jump.assemble_jump(w);
}

TildeVec random_tilde(const ReducedSystem& sys) {
    TildeVec v = sys.make_tilde();
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        v.u_I[s] = random_vector(v.u_I[s].size());
        v.p_I[s] = random_vector(v.p_I[s].size());
        v.u_D[s] = random_vector(v.u_D[s].size());
    }
    v.u_Pi = random_vector(v.u_Pi.size());
    return v;
}

TildeVec random_v0(const ReducedSystem& sys) {
    TildeVec f = sys.make_tilde();
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        f.u_I[s] = random_vector(f.u_I[s].size());
        f.u_D[s] = random_vector(f.u_D[s].size());
    }
    f.u_Pi = random_vector(f.u_Pi.size());
    return apply_Atilde_inv(sys, f);
}

/// Dense multiplier block of the preconditioner from repeated applications.
Eigen::MatrixXd dense_mlambda(const ReducedSystem& sys, const PrecondConfig& pc,
                              const HarmonicExtension* hext) {
    auto m = make_preconditioner(pc, sys, hext);
    Eigen::MatrixXd out(sys.n_lambda, sys.n_lambda);
    for (index_t j = 0; j < sys.n_lambda; ++j) {
        Vector e(sys.x_size(), 0.0);
        e[sys.n_pgamma + j] = 1.0;
        Vector z = m(e);
        for (index_t i = 0; i < sys.n_lambda; ++i) out(i, j) = z[sys.n_pgamma + i];
    }
    return out;
}

/// Dense B_{Delta,D} (multipliers x stacked dual slots).
Eigen::MatrixXd dense_bdd(const ReducedSystem& sys) {
    index_t nd_total = 0;
    for (index_t s = 0; s < sys.num_sub(); ++s) nd_total += sys.blocks[s].nd;
    Eigen::MatrixXd bdd = Eigen::MatrixXd::Zero(sys.n_lambda, nd_total);
    index_t at = 0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        for (std::size_t d = 0; d < sys.jump.slots[s].size(); ++d)
            for (const auto& e : sys.jump.slots[s][d])
                bdd(e.mult, at + d) = e.sign * sys.jump.delta_dagger[e.mult];
        at += sys.blocks[s].nd;
    }
    return bdd;
}

} // namespace

TEST_CASE("preconditioners: zero in, zero out") {
    ReducedSystem sys = make_system(2, {2, 2}, 2);
    PrecondConfig pc = make_precond_config(PrecondKind::Lumped, 1.0, sys.mesh);
    HarmonicExtension hext = build_harmonic(sys);
    Vector zero(sys.x_size(), 0.0);
    CHECK(norm2(apply_lumped(pc, sys, zero)) == 0.0);
    CHECK(norm2(apply_dirichlet(pc, sys, hext, zero)) == 0.0);
}

TEST_CASE("alpha must be positive") {
    BoxMesh mesh = build_mesh(2, {2, 2}, 2);
    CHECK_THROWS_AS(make_precond_config(PrecondKind::Lumped, 0.0, mesh), ConfigError);
    CHECK_THROWS_AS(make_precond_config(PrecondKind::Lumped, -1.0, mesh), ConfigError);
}

TEST_CASE("multiplier blocks are positive definite on range(B_Delta)") {
    for (int dim : {2, 3}) {
        ReducedSystem sys = make_system(dim, dim == 2 ? std::vector<index_t>{3, 2}
                                                      : std::vector<index_t>{2, 2, 2}, 2);
        PrecondConfig pc = make_precond_config(PrecondKind::Lumped, 1.0, sys.mesh);
        HarmonicExtension hext = build_harmonic(sys);
        for (int trial = 0; trial < 10; ++trial) {
            Vector lam = random_range_lambda(sys);
            REQUIRE(norm2(lam) > 0.0);
            Vector r(sys.x_size(), 0.0);
            for (index_t i = 0; i < sys.n_lambda; ++i) r[sys.n_pgamma + i] = lam[i];
            Vector zl = apply_lumped(pc, sys, r);
            Vector zd = apply_dirichlet(pc, sys, hext, r);
            double ql = 0.0, qd = 0.0;
            for (index_t i = 0; i < sys.n_lambda; ++i) {
                ql += zl[sys.n_pgamma + i] * lam[i];
                qd += zd[sys.n_pgamma + i] * lam[i];
            }
            CHECK(ql > 0.0);
            CHECK(qd > 0.0);
        }
    }
}

TEST_CASE("both preconditioners are symmetric and PD on Q_Gamma + range(B_Delta)") {
    ReducedSystem sys = make_system(3, {2, 2, 2}, 2);
    HarmonicExtension hext = build_harmonic(sys);
    for (auto kind : {PrecondKind::Lumped, PrecondKind::Dirichlet, PrecondKind::Identity}) {
        PrecondConfig pc = make_precond_config(kind, 1.0, sys.mesh);
        auto m = make_preconditioner(pc, sys, &hext);
        for (int trial = 0; trial < 5; ++trial) {
            Vector x = random_vector(sys.x_size());
            Vector y = random_vector(sys.x_size());
            Vector mx = m(x), my = m(y);
            CHECK(std::abs(dot(mx, y) - dot(x, my)) <= 1e-12 * norm2(x) * norm2(y));

            // project the multiplier part into the range before the PD check
            Vector xr = x;
            Vector lam(x.begin() + sys.n_pgamma, x.end());
            Vector plam = range_project(sys.jump, lam);
            for (index_t i = 0; i < sys.n_lambda; ++i) xr[sys.n_pgamma + i] = plam[i];
            if (norm2(xr) > 0.0) CHECK(dot(m(xr), xr) > 0.0);
        }
    }
}

TEST_CASE("pressure block is alpha (h/2)^-dim I") {
    ReducedSystem sys = make_system(2, {2, 2}, 2);
    PrecondConfig pc = make_precond_config(PrecondKind::Lumped, 0.7, sys.mesh);
    Vector r = random_vector(sys.x_size());
    Vector z = apply_lumped(pc, sys, r);
    double scale = 0.7 * std::pow(sys.mesh.h / 2.0, -2);
    for (index_t i = 0; i < sys.n_pgamma; ++i)
        CHECK(z[i] == Catch::Approx(scale * r[i]).margin(1e-12));
}

TEST_CASE("dense lumped block equals B_DD A_DD B_DD^T") {
    ReducedSystem sys = make_system(2, {2, 2}, 2);
    PrecondConfig pc = make_precond_config(PrecondKind::Lumped, 1.0, sys.mesh);
    Eigen::MatrixXd m = dense_mlambda(sys, pc, nullptr);

    Eigen::MatrixXd bdd = dense_bdd(sys);
    index_t nd_total = bdd.cols();
    Eigen::MatrixXd add = Eigen::MatrixXd::Zero(nd_total, nd_total);
    index_t at = 0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        Eigen::MatrixXd a = to_dense(sys.blocks[s].A_DD);
        add.block(at, at, a.rows(), a.cols()) = a;
        at += a.rows();
    }
    Eigen::MatrixXd oracle = bdd * add * bdd.transpose();
    CHECK((m - oracle).cwiseAbs().maxCoeff() <= 1e-12 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("dense Dirichlet block equals B_DD H_Delta B_DD^T") {
    ReducedSystem sys = make_system(2, {2, 2}, 2);
    PrecondConfig pc = make_precond_config(PrecondKind::Dirichlet, 1.0, sys.mesh);
    HarmonicExtension hext = build_harmonic(sys);
    Eigen::MatrixXd m = dense_mlambda(sys, pc, &hext);

    Eigen::MatrixXd bdd = dense_bdd(sys);
    index_t nd_total = bdd.cols();
    Eigen::MatrixXd hd = Eigen::MatrixXd::Zero(nd_total, nd_total);
    index_t at = 0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Eigen::MatrixXd aii = to_dense(b.A_II);
        Eigen::MatrixXd aid = to_dense(b.A_ID);
        Eigen::MatrixXd add = to_dense(b.A_DD);
        Eigen::MatrixXd schur = add - aid.transpose() * aii.llt().solve(aid);
        hd.block(at, at, schur.rows(), schur.cols()) = schur;
        at += schur.rows();
    }
    Eigen::MatrixXd oracle = bdd * hd * bdd.transpose();
    CHECK((m - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("Dirichlet quadratic form equals summed harmonic extension energies") {
    ReducedSystem sys = make_system(3, {2, 2, 2}, 2);
    PrecondConfig pc = make_precond_config(PrecondKind::Dirichlet, 1.0, sys.mesh);
    HarmonicExtension hext = build_harmonic(sys);
    Vector lam = random_range_lambda(sys);
    Vector r(sys.x_size(), 0.0);
    for (index_t i = 0; i < sys.n_lambda; ++i) r[sys.n_pgamma + i] = lam[i];
    Vector z = apply_dirichlet(pc, sys, hext, r);
    double form = 0.0;
    for (index_t i = 0; i < sys.n_lambda; ++i) form += z[sys.n_pgamma + i] * lam[i];

    double energies = 0.0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const auto& b = sys.blocks[s];
        Vector w;
        sys.jump.apply_BdeltaDT(s, lam, w);
        Vector t = spmv(b.A_ID, w);
        scale(-1.0, t);
        Vector ui = hext.A_II[s].solve(t);
        double e = dot(ui, spmv(b.A_II, ui)) + 2.0 * dot(ui, spmv(b.A_ID, w)) +
                   dot(w, spmv(b.A_DD, w));
        energies += e;
        CHECK(e >= -1e-12);
    }
    CHECK(form == Catch::Approx(energies).epsilon(1e-10));
}

TEST_CASE("jump operators annihilate continuous vectors") {
    for (int dim : {2, 3}) {
        ReducedSystem sys = make_system(dim, dim == 2 ? std::vector<index_t>{2, 2}
                                                      : std::vector<index_t>{2, 2, 2}, 2);
        HarmonicExtension hext = build_harmonic(sys);
        // continuous dual data: equal values on every copy of each identity
        TildeVec v = random_tilde(sys);
        Vector vals = random_vector(sys.mesh.vel_nodes() * sys.mesh.dim);
        for (index_t s = 0; s < sys.num_sub(); ++s) {
            const auto& dual = sys.part->sub[s].dual;
            for (std::size_t d = 0; d < dual.size(); ++d)
                v.u_D[s][d] = vals[dual[d].node * sys.mesh.dim + dual[d].comp];
        }
        TildeVec pl = jump_PDL(sys, v);
        TildeVec pd = jump_PDD(sys, hext, v);
        CHECK(std::sqrt(tilde_dot(pl, pl)) == 0.0);
        CHECK(std::sqrt(tilde_dot(pd, pd)) == 0.0);
    }
}

TEST_CASE("jump of the jump: B_Delta R P_DL v = B_Delta R v") {
    ReducedSystem sys = make_system(3, {2, 2, 2}, 2);
    for (int trial = 0; trial < 5; ++trial) {
        TildeVec v = random_tilde(sys);
        TildeVec pv = jump_PDL(sys, v);
        Vector mu1(sys.n_lambda, 0.0), mu2(sys.n_lambda, 0.0);
        for (index_t s = 0; s < sys.num_sub(); ++s) {
            sys.jump.add_Bdelta(s, v.u_D[s], mu1);
            sys.jump.add_Bdelta(s, pv.u_D[s], mu2);
        }
        axpy(-1.0, mu1, mu2);
        CHECK(norm2(mu2) <= 1e-12 * (1.0 + norm2(mu1)));
    }
}

TEST_CASE("nodal jump formula at a face node") {
    ReducedSystem sys = make_system(2, {2, 2}, 2);
    const DofPartition& part = *sys.part;
    // pick some face node and its two sharing subdomains
    index_t node = -1;
    for (index_t n = 0; n < sys.mesh.vel_nodes(); ++n)
        if (part.vel_node_class[n] == NodeClass::Face) {
            node = n;
            break;
        }
    REQUIRE(node >= 0);
    std::vector<index_t> sharers;
    detail::sharing_subs(sys.mesh, node, sharers);
    REQUIRE(sharers.size() == 2);

    TildeVec v = sys.make_tilde();
    const double a = 0.9, b = -0.4; // values of component 0 on the two copies
    v.u_D[sharers[0]][part.dual_index(sharers[0], node, 0)] = a;
    v.u_D[sharers[1]][part.dual_index(sharers[1], node, 0)] = b;
    TildeVec pv = jump_PDL(sys, v);
    double j0 = pv.u_D[sharers[0]][part.dual_index(sharers[0], node, 0)];
    double j1 = pv.u_D[sharers[1]][part.dual_index(sharers[1], node, 0)];
    CHECK(j0 == Catch::Approx(0.5 * (a - b)).margin(1e-14));
    CHECK(j1 == Catch::Approx(0.5 * (b - a)).margin(1e-14));
}

TEST_CASE("harmonic extension minimizes energy among equal-trace extensions") {
    for (int dim : {2, 3}) {
        ReducedSystem sys = make_system(dim, dim == 2 ? std::vector<index_t>{2, 2}
                                                      : std::vector<index_t>{2, 2, 2}, 2);
        HarmonicExtension hext = build_harmonic(sys);
        for (int trial = 0; trial < (dim == 2 ? 100 : 20); ++trial) {
            TildeVec v = random_tilde(sys);
            TildeVec pl = jump_PDL(sys, v);
            TildeVec pd = jump_PDD(sys, hext, v);
            double el = velocity_energy(sys, pl);
            double ed = velocity_energy(sys, pd);
            CHECK(ed <= el * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("P_DD energy equals the H_Delta trace form") {
    ReducedSystem sys = make_system(3, {2, 2, 2}, 2);
    HarmonicExtension hext = build_harmonic(sys);
    TildeVec v = random_tilde(sys);
    TildeVec pd = jump_PDD(sys, hext, v);
    double lhs = tilde_dot(pd, apply_Atilde(sys, pd));
    double rhs = 0.0;
    for (index_t s = 0; s < sys.num_sub(); ++s) {
        const Vector& w = pd.u_D[s];
        rhs += dot(w, apply_HDelta(sys, hext, s, w));
    }
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("jump operator growth is bounded by the predicted rates") {
    // empirical max of <P v, P v>_A / <v, v>_A over random v in V0_tilde; the
    // normalized ratio r/Phi must not grow along the H/h sweep
    auto phi_l = [](double t) { return t * (1.0 + std::log(t)); };
    auto phi_d = [](double t) { return std::pow(1.0 + std::log(t), 2); };
    double prev_l = 0.0, prev_d = 0.0;
    bool first = true;
    for (index_t ratio : {2, 4, 8, 16}) {
        ReducedSystem sys = make_system(2, {2, 2}, ratio);
        HarmonicExtension hext = build_harmonic(sys);
        double max_l = 0.0, max_d = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            TildeVec v = random_v0(sys);
            double ev = velocity_energy(sys, v);
            if (ev <= 0.0) continue;
            max_l = std::max(max_l, velocity_energy(sys, jump_PDL(sys, v)) / ev);
            max_d = std::max(max_d, velocity_energy(sys, jump_PDD(sys, hext, v)) / ev);
        }
        double rl = max_l / phi_l(static_cast<double>(ratio));
        double rd = max_d / phi_d(static_cast<double>(ratio));
        if (!first) {
            CHECK(rl <= 1.1 * prev_l);
            CHECK(rd <= 1.1 * prev_d);
        }
        prev_l = rl;
        prev_d = rd;
        first = false;
    }
}
