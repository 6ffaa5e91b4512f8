#include <cbp/mesh.hpp>
#include <cbp/meshgen.hpp>
#include <cbp/scene.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace cbp;
using Catch::Approx;

namespace {

World<2> world_of(const MeshInput<2>& m)
{
    World<2> w;
    append_mesh(w, m);
    finalize_world(w);
    return w;
}

MeshInput<2> unit_square()
{
    MeshInput<2> m;
    m.type = ElemType::Tri;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    m.elements = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

} // namespace

TEST_CASE("unit square boundary extraction")
{
    const World<2> w = world_of(unit_square());
    REQUIRE(w.bverts.size() == 4);
    REQUIRE(w.bedges.size() == 4);
    // every boundary vertex has exactly two incident boundary edges
    for (const auto& inc : w.vert_edges)
        REQUIRE(inc.size() == 2);
}

TEST_CASE("single tet boundary extraction")
{
    World<3> w;
    append_mesh(w, meshgen::single_tet());
    finalize_world(w);
    REQUIRE(w.bfaces.size() == 4);
    REQUIRE(w.bedges.size() == 6);
    REQUIRE(w.bverts.size() == 4);
    // manifold: each boundary edge has exactly two incident faces, and those
    // faces contain the edge
    for (size_t e = 0; e < w.bedges.size(); ++e)
        for (int f : w.edge_faces3d[e]) {
            int hits = 0;
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 2; ++j)
                    if (w.bfaces[f][k] == w.bedges[e][j])
                        hits++;
            REQUIRE(hits == 2);
        }
    // outward normals: positive dot with the centroid-to-face direction
    const Vec3 centroid = (w.rest[0] + w.rest[1] + w.rest[2] + w.rest[3]) / 4.0;
    for (const auto& f : w.bfaces) {
        const Vec3 n = (w.rest[f[1]] - w.rest[f[0]]).cross(w.rest[f[2]] - w.rest[f[0]]);
        const Vec3 mid = (w.rest[f[0]] + w.rest[f[1]] + w.rest[f[2]]) / 3.0;
        REQUIRE(n.dot(mid - centroid) > 0.0);
    }
}

TEST_CASE("degenerate element rejected")
{
    MeshInput<2> m;
    m.type = ElemType::Tri;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 0)}; // zero-length edge
    m.elements = {{0, 1, 2}};
    World<2> w;
    append_mesh(w, m);
    REQUIRE_THROWS_AS(finalize_world(w), ContractError);
}

TEST_CASE("inverted orientation rejected")
{
    MeshInput<2> m;
    m.type = ElemType::Tri;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 1)};
    m.elements = {{0, 2, 1}}; // clockwise
    World<2> w;
    append_mesh(w, m);
    REQUIRE_THROWS_AS(finalize_world(w), ContractError);

    MeshInput<3> mt = meshgen::single_tet();
    std::swap(mt.elements[0][0], mt.elements[0][1]);
    World<3> w3;
    append_mesh(w3, mt);
    REQUIRE_THROWS_AS(finalize_world(w3), ContractError);
}

TEST_CASE("non-manifold boundary rejected")
{
    // bowtie: two triangles joined at a single vertex
    MeshInput<2> m;
    m.type = ElemType::Tri;
    m.nodes = {Vec2(0, 0), Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)};
    m.elements = {{0, 1, 2}, {0, 3, 4}};
    World<2> w;
    append_mesh(w, m);
    REQUIRE_THROWS_AS(finalize_world(w), ContractError);
}

TEST_CASE("length scales")
{
    // boundary vertex with incident rest edge lengths 1 and 3
    MeshInput<2> m;
    m.type = ElemType::Tri;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(4, 0), Vec2(0, 1)};
    m.elements = {{0, 1, 3}, {1, 2, 3}};
    const World<2> w = world_of(m);
    const int bv = w.node_to_bvert[1];
    REQUIRE(bv >= 0);
    REQUIRE(w.L_vert[bv] == Approx(2.0));

    // edge L equals its rest length
    for (size_t e = 0; e < w.bedges.size(); ++e)
        REQUIRE(w.L_edge[e] == Approx(w.rest_edge_length(int(e))));

    // uniform grid: every boundary vertex L = h
    const World<2> g = world_of(meshgen::block(0, 0, 1, 1, 4, 4));
    for (double L : g.L_vert)
        REQUIRE(L == Approx(0.25));
}

TEST_CASE("length scales invariant under rigid transform of rest positions")
{
    MeshInput<2> m = unit_square();
    const World<2> w0 = world_of(m);
    meshgen::rotate(m, 1.1, Vec2(0.3, -0.2));
    meshgen::translate(m, Vec2(5, -7));
    const World<2> w1 = world_of(m);
    for (size_t i = 0; i < w0.L_vert.size(); ++i)
        REQUIRE(w0.L_vert[i] == Approx(w1.L_vert[i]).epsilon(1e-12));
}

TEST_CASE("rigid transform of current positions")
{
    World<2> w = world_of(unit_square());

    SECTION("identity")
    {
        rigid_transform<2>(w, Eigen::Matrix2d::Identity(), Vec2::Zero());
        for (int i = 0; i < w.num_nodes(); ++i)
            REQUIRE((w.pos[i] - w.rest[i]).norm() == 0.0);
    }
    SECTION("quarter turn maps (1,0) to (0,1)")
    {
        Eigen::Matrix2d R;
        R << 0, -1, 1, 0;
        rigid_transform<2>(w, R, Vec2::Zero());
        REQUIRE((w.pos[1] - Vec2(0, 1)).norm() < 1e-15);
        // rest untouched
        REQUIRE((w.rest[1] - Vec2(1, 0)).norm() == 0.0);
    }
    SECTION("translation shifts x")
    {
        rigid_transform<2>(w, Eigen::Matrix2d::Identity(), Vec2(5, 0));
        for (int i = 0; i < w.num_nodes(); ++i)
            REQUIRE(w.pos[i].x() == Approx(w.rest[i].x() + 5.0));
    }
    SECTION("non-orthogonal matrix rejected")
    {
        Eigen::Matrix2d S;
        S << 2, 0, 0, 1;
        REQUIRE_THROWS_AS(rigid_transform<2>(w, S, Vec2::Zero()), ContractError);
        Eigen::Matrix2d F; // reflection
        F << 1, 0, 0, -1;
        REQUIRE_THROWS_AS(rigid_transform<2>(w, F, Vec2::Zero()), ContractError);
    }
}

TEST_CASE("scene JSON loading")
{
    nlohmann::json j;
    j["dim"] = 2;
    nlohmann::json jm;
    jm["type"] = "tri";
    jm["nodes"] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    jm["elements"] = {{0, 1, 2}, {0, 2, 3}};
    j["meshes"] = {jm};
    j["material"] = {{"E", 1e4}, {"nu", 0.3}, {"rho", 100.0}};
    j["gravity"] = {0.0, -9.8};
    j["dt"] = 0.01;
    j["dhat"] = 0.1;
    j["dirichlet"] = {{{"nodes", {0, 1}}, {"motion", "fixed"}}};

    auto sv = load_scene_json(j);
    auto& s = std::get<Scene<2>>(sv);
    REQUIRE(s.world.bverts.size() == 4);
    REQUIRE(s.params.eps_trg == Approx(0.1));
    REQUIRE(s.params.p == 1); // n-1 default
    REQUIRE(s.dirichlet.size() == 1);
    REQUIRE(s.material.nu == Approx(0.3));
    REQUIRE(s.params.beta == Approx(0.1));
    REQUIRE(s.params.c == Approx(0.01));

    SECTION("bad schema")
    {
        j.erase("material");
        REQUIRE_THROWS(load_scene_json(j));
    }
    SECTION("degenerate element in file")
    {
        j["meshes"][0]["nodes"][1] = {0.0, 0.0};
        REQUIRE_THROWS_AS(load_scene_json(j), ContractError);
    }
}

TEST_CASE("3D vertex rings are closed and ordered")
{
    World<3> w;
    append_mesh(w, meshgen::box_tets(Vec3::Zero(), Vec3::Ones(), 2, 2, 2));
    finalize_world(w);
    REQUIRE(!w.bverts.empty());
    for (size_t i = 0; i < w.bverts.size(); ++i) {
        const auto& ring = w.vert_ring3d[i];
        REQUIRE(ring.size() >= 3);
        const int v = w.bverts[i];
        // face k contains v and the consecutive ring pair (k, k+1)
        const int m = int(ring.size());
        for (int k = 0; k < m; ++k) {
            const int f = w.vert_faces3d[i][k];
            int hits = 0;
            for (int c = 0; c < 3; ++c)
                if (w.bfaces[f][c] == v || w.bfaces[f][c] == ring[k]
                    || w.bfaces[f][c] == ring[(k + 1) % m])
                    hits++;
            REQUIRE(hits == 3);
        }
    }
}
