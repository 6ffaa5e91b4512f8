#pragma once

#include <cbp/dynamics.hpp>
#include <cbp/meshgen.hpp>
#include <cbp/scene.hpp>

namespace testsup {

using namespace cbp;

// two 2D blocks resting with a facing gap smaller than the target radius
inline Scene<2> two_blocks_2d(double gap = 0.05, int res = 4)
{
    Scene<2> s;
    append_mesh(s.world, meshgen::block(0, 0, 1, 1, res, res));
    append_mesh(s.world, meshgen::block(1 + gap, 0, 1, 1, res, res));
    finalize_world(s.world);
    s.material = Material{4e3, 0.2, 100};
    s.gravity = Vec2::Zero();
    s.dt = 0.0047;
    s.params.eps_trg = 0.1;
    s.params.alpha = 0.1;
    return s;
}

inline Scene<3> two_blocks_3d(double gap = 0.02, int res = 2)
{
    Scene<3> s;
    append_mesh(s.world, meshgen::box_tets(Vec3::Zero(), Vec3::Ones(), res, res, res));
    append_mesh(s.world, meshgen::box_tets(Vec3(1 + gap, 0, 0), Vec3::Ones(), res, res, res));
    finalize_world(s.world);
    s.material = Material{1e4, 0.0, 100};
    s.gravity = Vec3::Zero();
    s.dt = 0.0047;
    s.params.eps_trg = 0.025;
    s.params.alpha = 0.1;
    s.params.p = 2;
    return s;
}

inline Scene<2> slit_scene()
{
    Scene<2> s;
    append_mesh(s.world, meshgen::slit_block(2.0, 1.0, 10, 5, 0.6, 0.02, 0.5));
    finalize_world(s.world);
    s.material = Material{4e3, 0.2, 100};
    s.gravity = Vec2::Zero();
    s.dt = 0.0047;
    s.params.eps_trg = 0.1; // much wider than the slit
    s.params.alpha = 0.1;
    return s;
}

// 2D block with scripted top/bottom compression to a target height ratio
inline Scene<2> compression_scene(int res = 6)
{
    Scene<2> s;
    append_mesh(s.world, meshgen::block(0, 0, 1, 1, res, res));
    finalize_world(s.world);
    s.material = Material{1e4, 0.0, 100};
    s.gravity = Vec2::Zero();
    s.dt = 0.01;
    s.params.eps_trg = 0.08;
    s.params.alpha = 0.1;
    s.params.kappa = 1e4;

    DirichletSet<2> bottom, top;
    for (int i = 0; i < s.world.num_nodes(); ++i) {
        if (std::abs(s.world.rest[i].y()) < 1e-12)
            bottom.nodes.push_back(i);
        if (std::abs(s.world.rest[i].y() - 1.0) < 1e-12)
            top.nodes.push_back(i);
    }
    top.fixed = false;
    top.velocity = Vec2(0, -0.957); // reaches 33% height at t = 0.7
    s.dirichlet.push_back(bottom);
    s.dirichlet.push_back(top);
    return s;
}

// annulus whose wall is thinned by scripted radial boundary motion
inline Scene<2> annulus_scene(int nseg = 48, int nlayer = 3)
{
    Scene<2> s;
    append_mesh(s.world, meshgen::annulus(0.75, 1.0, nseg, nlayer));
    finalize_world(s.world);
    s.material = Material{1e4, 0.3, 100};
    s.gravity = Vec2::Zero();
    s.dt = 0.01;
    s.params.eps_trg = 0.1;
    s.params.alpha = 0.5;
    s.params.kappa = 1e3;

    // outer ring fixed, inner ring expands radially node by node
    for (int i = 0; i < s.world.num_nodes(); ++i) {
        const double r = s.world.rest[i].norm();
        if (std::abs(r - 1.0) < 1e-9) {
            DirichletSet<2> set;
            set.nodes = {i};
            s.dirichlet.push_back(set);
        } else if (std::abs(r - 0.75) < 1e-9) {
            DirichletSet<2> set;
            set.nodes = {i};
            set.fixed = false;
            set.velocity = Vec2(0.55 * s.world.rest[i].x() / r, 0.55 * s.world.rest[i].y() / r);
            s.dirichlet.push_back(set);
        }
    }
    return s;
}

// square falling corner-first onto a fixed strip
inline Scene<2> corner_scene(int refine)
{
    Scene<2> s;
    auto square = meshgen::block(-0.5, -0.5, 1, 1, 4 * refine, 4 * refine);
    meshgen::rotate(square, meshgen::kPi / 4.0);
    meshgen::translate(square, Vec2(0, 0.80));
    append_mesh(s.world, square);
    auto ground = meshgen::block(-1.5, -0.25, 3.0, 0.25, 12, 1);
    const int ground_base = s.world.num_nodes();
    append_mesh(s.world, ground);
    finalize_world(s.world);
    s.material = Material{1e5, 0.3, 500};
    s.gravity = Vec2(0, -9.8);
    s.dt = 0.005;
    s.params.eps_trg = 0.05;
    s.params.alpha = 0.5;
    s.params.kappa = 1e4;
    DirichletSet<2> fix;
    for (int i = ground_base; i < s.world.num_nodes(); ++i)
        fix.nodes.push_back(i);
    s.dirichlet.push_back(fix);
    s.velocity0.assign(s.world.num_nodes(), Vec2::Zero());
    for (int i = 0; i < ground_base; ++i)
        s.velocity0[i] = Vec2(0, -0.8);
    return s;
}

inline int corner_tip_node(const Scene<2>& s)
{
    int tip = 0;
    for (int i = 0; i < s.world.num_nodes(); ++i)
        if (s.world.node_mesh[i] == 0 && s.world.rest[i].y() < s.world.rest[tip].y())
            tip = i;
    return tip;
}

// flat ramp with tilted gravity; box friction scene
inline Scene<2> incline_scene(double theta, double mu, double eps_v)
{
    Scene<2> s;
    auto ramp = meshgen::block(-1, -0.2, 4.0, 0.2, 16, 1);
    append_mesh(s.world, ramp);
    const int box_base = s.world.num_nodes();
    auto box = meshgen::block(0, 0.004, 0.5, 0.5, 2, 2);
    append_mesh(s.world, box);
    finalize_world(s.world);
    s.material = Material{1e5, 0.3, 500};
    s.gravity = Vec2(9.8 * std::sin(theta), -9.8 * std::cos(theta));
    s.dt = 0.01;
    s.params.eps_trg = 0.01;
    s.params.kappa = 1e4;
    s.mu_friction = mu;
    s.eps_v = eps_v;
    DirichletSet<2> fix;
    for (int i = 0; i < box_base; ++i)
        fix.nodes.push_back(i);
    s.dirichlet.push_back(fix);
    return s;
}

// deterministic crumpled near-contact scene for pair-count sweeps: two
// blocks with a narrow gap, boundaries rippled so separation directions
// cover a wide range of angles
inline World<2> crumpled_world(int res = 6)
{
    World<2> w;
    append_mesh(w, meshgen::block(0, 0, 1, 1, res, res));
    append_mesh(w, meshgen::block(1.04, 0, 1, 1, res, res));
    finalize_world(w);
    for (auto& p : w.pos)
        p += Vec2(0.015 * std::sin(9 * p.y() + 1) + 0.008 * std::sin(17 * p.y() + p.x()),
                  0.02 * std::sin(6 * p.x()) + 0.008 * std::cos(13 * p.x() + 2 * p.y()));
    return w;
}

template <int N>
void fill_eps(World<N>& w, double eps)
{
    std::fill(w.eps_vert.begin(), w.eps_vert.end(), eps);
    std::fill(w.eps_edge.begin(), w.eps_edge.end(), eps);
    std::fill(w.eps_face.begin(), w.eps_face.end(), eps);
}

} // namespace testsup
