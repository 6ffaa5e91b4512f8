#include <cbp/friction.hpp>
#include <cbp/meshgen.hpp>
#include <cbp/potential.hpp>

#include <support/fd.hpp>
#include <support/oracles.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace cbp;
using Catch::Approx;
using testsup::Rng;

namespace {

int find_bvert(const World<2>& w, const Vec2& p)
{
    for (size_t i = 0; i < w.bverts.size(); ++i)
        if ((w.pos[w.bverts[i]] - p).norm() < 1e-9)
            return int(i);
    return -1;
}

// two unit triangles with unit edges, apexes facing across a small gap
World<2> facing_apexes(double gap)
{
    const double h = std::sqrt(3.0) / 2.0;
    MeshInput<2> lower;
    lower.type = ElemType::Tri;
    lower.nodes = {Vec2(0, 0), Vec2(-0.5, -h), Vec2(0.5, -h)};
    lower.elements = {{0, 1, 2}};
    MeshInput<2> upper;
    upper.type = ElemType::Tri;
    upper.nodes = {Vec2(0, gap), Vec2(0.5, gap + h), Vec2(-0.5, gap + h)};
    upper.elements = {{0, 1, 2}};
    World<2> w;
    append_mesh(w, lower);
    append_mesh(w, upper);
    finalize_world(w);
    return w;
}

World<2> two_blocks(double gap, int res = 2)
{
    World<2> w;
    append_mesh(w, meshgen::block(0, 0, 1, 1, res, res));
    append_mesh(w, meshgen::block(1 + gap, 0, 1, 1, res, res));
    finalize_world(w);
    return w;
}

void fill_eps(World<2>& w, double eps)
{
    std::fill(w.eps_vert.begin(), w.eps_vert.end(), eps);
    std::fill(w.eps_edge.begin(), w.eps_edge.end(), eps);
}

} // namespace

TEST_CASE("adaptive localization")
{
    PotentialParams par;
    par.eps_trg = 0.1;
    par.alpha = 0.1;

    SECTION("facing gap shrinks the facing radii to half the gap")
    {
        World<2> w = two_blocks(0.05);
        adapt_epsilon(w, par);
        for (size_t i = 0; i < w.bverts.size(); ++i) {
            const double x = w.rest[w.bverts[i]].x();
            if (std::abs(x - 1.0) < 1e-12 || std::abs(x - 1.05) < 1e-12)
                REQUIRE(w.eps_vert[i] == Approx(0.025));
            REQUIRE(w.eps_vert[i] <= par.eps_trg);
            // the far sides are untouched
            if (std::abs(x - 0.0) < 1e-12 || std::abs(x - 2.05) < 1e-12)
                REQUIRE(w.eps_vert[i] == Approx(par.eps_trg));
        }
        // zero potential and exactly zero gradient at rest
        REQUIRE(contact_energy(w, par) == 0.0);
        Eigen::VectorXd g;
        contact_derivatives(w, par, &g, nullptr, false);
        REQUIRE(g.lpNorm<Eigen::Infinity>() == 0.0);
    }

    SECTION("isolated convex body keeps the target radius")
    {
        World<2> w;
        append_mesh(w, meshgen::block(0, 0, 1, 1, 4, 4));
        finalize_world(w);
        adapt_epsilon(w, par);
        for (double e : w.eps_vert)
            REQUIRE(e == Approx(par.eps_trg));
        REQUIRE(contact_energy(w, par) == 0.0);
    }

    SECTION("slit block carries no rest potential")
    {
        World<2> w;
        append_mesh(w, meshgen::slit_block(2.0, 1.0, 8, 4, 0.5, 0.02, 0.5));
        finalize_world(w);
        adapt_epsilon(w, par);
        REQUIRE(contact_energy(w, par) == 0.0);
        Eigen::VectorXd g;
        contact_derivatives(w, par, &g, nullptr, false);
        REQUIRE(g.lpNorm<Eigen::Infinity>() == 0.0);
    }

    SECTION("edges and faces take the minimum over their vertices")
    {
        World<2> w = two_blocks(0.05);
        adapt_epsilon(w, par);
        for (size_t e = 0; e < w.bedges.size(); ++e)
            REQUIRE(
                w.eps_edge[e]
                == Approx(std::min(
                    w.eps_vert[w.node_to_bvert[w.bedges[e][0]]],
                    w.eps_vert[w.node_to_bvert[w.bedges[e][1]]])));
    }

    SECTION("rest contact is rejected")
    {
        World<2> w = two_blocks(0.05);
        for (int i = 9; i < 18; ++i)
            w.rest[i].x() -= 0.05; // close the gap to zero
        w.pos = w.rest;
        REQUIRE_THROWS_AS(adapt_epsilon(w, par), ContractError);
    }
}

TEST_CASE("term collection")
{
    PotentialParams par;
    par.eps_trg = 0.1;

    SECTION("no pairs inside the radius: empty")
    {
        World<2> w = two_blocks(0.5);
        fill_eps(w, par.eps_trg);
        REQUIRE(collect_terms(w, par).empty());
        REQUIRE(contact_energy(w, par) == 0.0);
    }

    SECTION("single facing vertex pair reproduces the hand value")
    {
        World<2> w = facing_apexes(0.05);
        fill_eps(w, par.eps_trg);
        const auto terms = collect_terms(w, par);
        // the apex-apex pair carries all the energy; apex-edge pairs whose
        // closest point sits at an endpoint are kept with zero mollifier
        int carrying = 0;
        for (const auto& t : terms) {
            if (t.fac.gamma == 0.0) {
                REQUIRE(t.fac.M == 0.0);
                REQUIRE(t.energy == 0.0);
                continue;
            }
            carrying++;
            REQUIRE(t.pair.type == PairType::VV);
            REQUIRE(t.d == Approx(0.05));
            REQUIRE(t.fac.gamma == 1.0);
            REQUIRE(t.weight == Approx(1.0)); // unit length scales
            // kappa * barrier(eps/2) with eps = 0.1, p = 1
            REQUIRE(t.energy == Approx(par.kappa * 5.0));
        }
        REQUIRE(carrying == 1);
        REQUIRE(contact_energy(w, par) == Approx(par.kappa * 5.0));
    }

    SECTION("compressed flat sides contribute nothing")
    {
        World<2> w;
        append_mesh(w, meshgen::block(0, 0, 1, 1, 4, 4));
        finalize_world(w);
        fill_eps(w, 0.3);
        for (auto& p : w.pos)
            p.y() *= 0.4; // strong vertical compression
        par.eps_trg = 0.3;
        for (const auto& t : collect_terms(w, par))
            REQUIRE(t.fac.gamma > 0.0); // only non-filtered terms are kept
        REQUIRE(contact_energy(w, par) == 0.0);
    }
}

TEST_CASE("contact force magnitudes")
{
    PotentialParams par;
    par.eps_trg = 0.1;
    World<2> w = facing_apexes(0.05);
    fill_eps(w, par.eps_trg);
    const auto terms = collect_terms(w, par);
    const auto lambdas = contact_force_magnitudes(w, par, terms);
    REQUIRE(lambdas.size() == terms.size());
    int carrying = 0;
    for (size_t k = 0; k < terms.size(); ++k) {
        REQUIRE(lambdas[k] >= 0.0);
        if (terms[k].fac.gamma == 0.0) {
            REQUIRE(lambdas[k] == 0.0); // inactive pair carries no force
            continue;
        }
        carrying++;
        // analytic derivative of the term energy in the pair distance,
        // holding weight and gamma fixed
        const double h = 1e-7;
        const kernels::BarrierSpec spec(terms[k].eps, par.p);
        const double fd =
            (kernels::barrier(terms[k].d + h, spec) - kernels::barrier(terms[k].d - h, spec))
            / (2 * h);
        REQUIRE(lambdas[k] == Approx(std::abs(par.kappa * terms[k].weight * fd)).epsilon(1e-5));
    }
    REQUIRE(carrying == 1);
}

TEST_CASE("potential localization and barrier growth")
{
    PotentialParams par;
    par.eps_trg = 0.1;

    SECTION("energy grows monotonically along an approach path")
    {
        double prev = 0.0;
        double prev_d = 1.0;
        for (double d : {0.09, 0.05, 0.02, 0.01, 1e-3, 1e-5, 1e-7, 1e-9}) {
            World<2> w = facing_apexes(d);
            fill_eps(w, par.eps_trg);
            const double e = contact_energy(w, par);
            REQUIRE(e > prev);
            prev = e;
            prev_d = d;
        }
    }

    SECTION("log-log slope approaches the barrier exponent")
    {
        // for d << eps, h_eps -> 3/2 B(0) so energy ~ kappa d^-p
        auto energy_at = [&](double d) {
            World<2> w = facing_apexes(d);
            fill_eps(w, par.eps_trg);
            return contact_energy(w, par);
        };
        const double e1 = energy_at(1e-5), e2 = energy_at(1e-6);
        const double slope = (std::log(e2) - std::log(e1)) / (std::log(1e-6) - std::log(1e-5));
        REQUIRE(slope <= -(2 - 1) + 0.1);
    }
}

TEST_CASE("contact gradient and hessian match finite differences")
{
    Rng rng(31);
    PotentialParams par;
    par.eps_trg = 0.12;
    int validated = 0;

    for (int trial = 0; trial < 12; ++trial) {
        World<2> w;
        append_mesh(w, meshgen::block(0, 0, 0.8, 0.8, 2, 2));
        auto blk = meshgen::block(0, 0, 0.8, 0.8, 2, 2);
        meshgen::rotate(blk, rng.uniform(-0.4, 0.4));
        meshgen::translate(blk, Vec2(0.8 + rng.uniform(0.02, 0.1), rng.uniform(-0.2, 0.2)));
        append_mesh(w, blk);
        finalize_world(w);
        fill_eps(w, par.eps_trg);
        if (collect_terms(w, par).empty())
            continue;

        const double step = 1e-6 * w.bbox_diagonal();
        auto energy = [&]() { return contact_energy(w, par); };
        const Eigen::VectorXd fd = testsup::fd_gradient<2>(w, energy, step);
        Eigen::VectorXd g;
        std::vector<Eigen::Triplet<double>> trips;
        contact_derivatives(w, par, &g, &trips, /*project_psd=*/false);
        REQUIRE((g - fd).lpNorm<Eigen::Infinity>() < 1e-5 * g.lpNorm<Eigen::Infinity>());

        auto grad = [&]() {
            Eigen::VectorXd gg;
            contact_derivatives(w, par, &gg, nullptr, false);
            return gg;
        };
        const Eigen::MatrixXd Hfd = testsup::fd_hessian<2>(w, grad, step);
        const Eigen::MatrixXd H = testsup::dense_of(trips, w.num_nodes() * 2);
        REQUIRE((H - Hfd).lpNorm<Eigen::Infinity>() < 1e-3 * H.lpNorm<Eigen::Infinity>());

        // no net self-force
        Eigen::Vector2d net = Eigen::Vector2d::Zero();
        for (int i = 0; i < w.num_nodes(); ++i)
            net += Eigen::Vector2d(g[2 * i], g[2 * i + 1]);
        REQUIRE(net.norm() < 1e-10 * g.norm());
        validated++;
    }
    REQUIRE(validated >= 8);
}

TEST_CASE("rigid invariance of the potential")
{
    PotentialParams par;
    par.eps_trg = 0.1;
    World<2> w = two_blocks(0.05, 3);
    fill_eps(w, par.eps_trg);
    const double before = contact_energy(w, par);
    REQUIRE(before > 0.0);
    Rng rng(13);
    for (int t = 0; t < 5; ++t) {
        rigid_transform<2>(
            w, Eigen::Rotation2Dd(rng.uniform(0, 6.28)).toRotationMatrix(), rng.vec<2>(-3, 3));
        REQUIRE(contact_energy(w, par) == Approx(before).epsilon(1e-12));
    }
}

TEST_CASE("baseline log-barrier energy")
{
    World<2> w = two_blocks(0.05);
    const double dhat = 0.1;
    // spurious rest energy: the geometric potential adapts away, the
    // baseline does not
    REQUIRE(ipc_energy(w, dhat, 1.0) > 0.0);

    PotentialParams par;
    par.eps_trg = dhat;
    par.alpha = 0.1;
    adapt_epsilon(w, par);
    REQUIRE(contact_energy(w, par) == 0.0);

    // baseline gradient matches finite differences
    Eigen::VectorXd g;
    ipc_derivatives(w, dhat, 1.0, &g, nullptr, false);
    auto energy = [&]() { return ipc_energy(w, dhat, 1.0); };
    const Eigen::VectorXd fd = testsup::fd_gradient<2>(w, energy, 1e-7);
    REQUIRE((g - fd).lpNorm<Eigen::Infinity>() < 1e-5 * g.lpNorm<Eigen::Infinity>());
}

TEST_CASE("friction profile")
{
    const double h = 0.01, eps_v = 1e-3;
    const double b = h * eps_v;
    REQUIRE(friction::f1(b, h, eps_v) == 1.0);
    REQUIRE(friction::f1(2 * b, h, eps_v) == 1.0);
    REQUIRE(friction::f1(b / 2, h, eps_v) == Approx(0.75));
    REQUIRE(friction::f0(0.0, h, eps_v) == 0.0);
    // C^1 continuity of f0 at the bound
    const double d = 1e-9 * b;
    const double left = (friction::f0(b, h, eps_v) - friction::f0(b - d, h, eps_v)) / d;
    const double right = (friction::f0(b + d, h, eps_v) - friction::f0(b, h, eps_v)) / d;
    REQUIRE(left == Approx(right).epsilon(1e-6));
    REQUIRE(left == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("friction potential and derivatives")
{
    PotentialParams par;
    par.eps_trg = 0.1;
    World<2> w = facing_apexes(0.05);
    fill_eps(w, par.eps_trg);
    auto lag = lag_friction(w, par);
    REQUIRE(lag.size() == 1);
    REQUIRE(lag[0].lambda > 0.0);

    const double mu = 0.4, eps_v = 1e-3, h = 0.01;
    // no slip, no dissipation
    REQUIRE(friction_energy(w, lag, mu, eps_v, h) == 0.0);

    // tangential displacement dissipates and matches finite differences
    for (int i = 3; i < 6; ++i)
        w.pos[i] += Vec2(2e-4, 0);
    REQUIRE(friction_energy(w, lag, mu, eps_v, h) > 0.0);
    auto energy = [&]() { return friction_energy(w, lag, mu, eps_v, h); };
    Eigen::VectorXd g;
    friction_derivatives(w, lag, mu, eps_v, h, &g, nullptr, false);
    const Eigen::VectorXd fd = testsup::fd_gradient<2>(w, energy, 1e-9);
    REQUIRE((g - fd).lpNorm<Eigen::Infinity>() < 1e-5 * g.lpNorm<Eigen::Infinity>());

    // large slip: |force| saturates at mu lambda
    for (int i = 3; i < 6; ++i)
        w.pos[i] += Vec2(0.05, 0);
    friction_derivatives(w, lag, mu, eps_v, h, &g, nullptr, false);
    double fx = 0;
    for (int i = 3; i < 6; ++i)
        fx += g[2 * i];
    REQUIRE(std::abs(fx) == Approx(mu * lag[0].lambda).epsilon(1e-6));
}
