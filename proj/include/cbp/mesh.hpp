#pragma once

#include <cbp/common.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <vector>

namespace cbp {

enum class ElemType { Tri, Tet, Shell };

/// All meshes of a scene concatenated into one node array; boundary
/// primitives are extracted per mesh and indexed globally. Immutable after
/// construction except `pos`.
template <int N>
struct World
{
    struct MeshBlock
    {
        ElemType type = ElemType::Tri;
        int nodes_begin = 0, nodes_end = 0;
        std::vector<std::array<int, 4>> elems; // last slot unused for tri/shell
    };

    std::vector<Vec<N>> rest, pos;
    std::vector<int> node_mesh;
    std::vector<MeshBlock> meshes;

    // boundary primitives
    std::vector<int> bverts;               // vertex prim -> node id
    std::vector<std::array<int, 2>> bedges; // oriented
    std::vector<std::array<int, 3>> bfaces; // 3D, outward winding

    // adjacency
    std::vector<int> node_to_bvert;              // node -> vertex prim or -1
    std::vector<std::array<int, 2>> vert_nbr2d;  // per bvert: prev, next node
    std::vector<std::vector<int>> vert_ring3d;   // per bvert: ordered ring nodes
    std::vector<std::vector<int>> vert_edges;    // per bvert: incident bedge ids
    std::vector<std::vector<int>> vert_faces3d;  // per bvert: incident bface ids
    std::vector<std::array<int, 2>> edge_faces3d; // per bedge: incident bfaces
    std::vector<std::array<int, 2>> edge_opp3d;   // per bedge: opposite nodes

    // per-primitive length scales and localization radii
    std::vector<double> L_vert, L_edge;
    std::vector<double> eps_vert, eps_edge, eps_face;

    int num_nodes() const { return int(rest.size()); }

    double rest_edge_length(int e) const
    {
        return (rest[bedges[e][0]] - rest[bedges[e][1]]).norm();
    }
    double edge_length(int e) const
    {
        return (pos[bedges[e][0]] - pos[bedges[e][1]]).norm();
    }
    double face_area(int f) const
    {
        static_assert(N == 3 || N == 2);
        if constexpr (N == 3) {
            const auto& fc = bfaces[f];
            return 0.5 * (pos[fc[1]] - pos[fc[0]]).cross(pos[fc[2]] - pos[fc[0]]).norm();
        }
        return 0.0;
    }

    double bbox_diagonal() const
    {
        Vec<N> lo = Vec<N>::Constant(std::numeric_limits<double>::max());
        Vec<N> hi = Vec<N>::Constant(std::numeric_limits<double>::lowest());
        for (const auto& x : pos) {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
        return (hi - lo).norm();
    }

    bool same_mesh(int node_a, int node_b) const { return node_mesh[node_a] == node_mesh[node_b]; }
};

namespace detail {

inline double tri_area2d(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return 0.5 * cross2<double>(b - a, c - a);
}

inline double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
{
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

} // namespace detail

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

template <int N>
struct MeshInput
{
    ElemType type = ElemType::Tri;
    std::vector<Vec<N>> nodes;
    std::vector<std::vector<int>> elements;
};

template <int N>
void append_mesh(World<N>& w, const MeshInput<N>& in)
{
    const int base = w.num_nodes();
    const int mesh_id = int(w.meshes.size());
    typename World<N>::MeshBlock blk;
    blk.type = in.type;
    blk.nodes_begin = base;
    blk.nodes_end = base + int(in.nodes.size());

    for (const auto& x : in.nodes) {
        w.rest.push_back(x);
        w.pos.push_back(x);
        w.node_mesh.push_back(mesh_id);
    }

    const int elem_size = in.type == ElemType::Tet ? 4 : 3;
    for (const auto& el : in.elements) {
        check(int(el.size()) == elem_size, "mesh: wrong element arity");
        std::array<int, 4> e{-1, -1, -1, -1};
        for (int k = 0; k < elem_size; ++k) {
            check(el[k] >= 0 && el[k] < int(in.nodes.size()), "mesh: element index out of range");
            e[k] = el[k] + base;
        }
        blk.elems.push_back(e);
    }
    check(!blk.elems.empty(), "mesh: no elements");
    w.meshes.push_back(std::move(blk));
}

// Extracts boundary primitives, builds adjacency, validates the mesh
// invariants and assigns rest length scales.
template <int N>
void finalize_world(World<N>& w);

template <>
inline void finalize_world<2>(World<2>& w)
{
    constexpr double kDegenerate = 1e-14;

    // orientation + degeneracy of the area elements
    for (const auto& blk : w.meshes) {
        check(blk.type == ElemType::Tri, "mesh: 2D scenes take triangle meshes");
        for (const auto& e : blk.elems) {
            const double a = detail::tri_area2d(w.rest[e[0]], w.rest[e[1]], w.rest[e[2]]);
            check(std::abs(a) > kDegenerate, "mesh: degenerate element");
            check(a > 0.0, "mesh: inverted orientation");
        }
    }

    // boundary edges: edges used by exactly one triangle, kept in the
    // triangle's winding so the material lies on the left
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& blk : w.meshes)
        for (const auto& e : blk.elems)
            for (int k = 0; k < 3; ++k) {
                const int a = e[k], b = e[(k + 1) % 3];
                edge_count[{std::min(a, b), std::max(a, b)}]++;
            }
    for (const auto& blk : w.meshes)
        for (const auto& e : blk.elems)
            for (int k = 0; k < 3; ++k) {
                const int a = e[k], b = e[(k + 1) % 3];
                const int c = edge_count.at({std::min(a, b), std::max(a, b)});
                check(c == 1 || c == 2, "mesh: non-manifold boundary");
                if (c == 1)
                    w.bedges.push_back({a, b});
            }
    std::sort(w.bedges.begin(), w.bedges.end());

    // boundary vertices: next/prev along orientation
    std::map<int, int> next_of, prev_of; // node -> node
    for (const auto& e : w.bedges) {
        check(!next_of.count(e[0]) && !prev_of.count(e[1]), "mesh: non-manifold boundary");
        next_of[e[0]] = e[1];
        prev_of[e[1]] = e[0];
        check((w.rest[e[0]] - w.rest[e[1]]).norm() > kDegenerate, "mesh: degenerate element");
    }
    w.node_to_bvert.assign(w.num_nodes(), -1);
    for (const auto& [v, nxt] : next_of) {
        check(prev_of.count(v) == 1, "mesh: non-manifold boundary");
        w.node_to_bvert[v] = int(w.bverts.size());
        w.bverts.push_back(v);
        w.vert_nbr2d.push_back({prev_of.at(v), nxt});
    }

    // vertex -> incident boundary edges (prev edge, next edge)
    w.vert_edges.assign(w.bverts.size(), {});
    std::map<std::pair<int, int>, int> edge_id;
    for (int e = 0; e < int(w.bedges.size()); ++e)
        edge_id[{w.bedges[e][0], w.bedges[e][1]}] = e;
    for (int i = 0; i < int(w.bverts.size()); ++i) {
        const int v = w.bverts[i];
        w.vert_edges[i] = {edge_id.at({w.vert_nbr2d[i][0], v}), edge_id.at({v, w.vert_nbr2d[i][1]})};
    }

    // length scales
    w.L_edge.resize(w.bedges.size());
    for (int e = 0; e < int(w.bedges.size()); ++e)
        w.L_edge[e] = w.rest_edge_length(e);
    w.L_vert.resize(w.bverts.size());
    for (int i = 0; i < int(w.bverts.size()); ++i) {
        double sum = 0;
        for (int e : w.vert_edges[i])
            sum += w.L_edge[e];
        w.L_vert[i] = sum / double(w.vert_edges[i].size());
    }
    w.eps_vert.assign(w.bverts.size(), 0.0);
    w.eps_edge.assign(w.bedges.size(), 0.0);
}

template <>
inline void finalize_world<3>(World<3>& w)
{
    constexpr double kDegenerate = 1e-18;

    // collect outward-oriented boundary triangles
    std::vector<std::array<int, 3>> faces;
    for (const auto& blk : w.meshes) {
        if (blk.type == ElemType::Tet) {
            for (const auto& e : blk.elems) {
                const double v =
                    detail::tet_volume(w.rest[e[0]], w.rest[e[1]], w.rest[e[2]], w.rest[e[3]]);
                check(std::abs(v) > kDegenerate, "mesh: degenerate element");
                check(v > 0.0, "mesh: inverted orientation");
            }
            std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> face_count;
            auto key = [](std::array<int, 3> f) {
                std::sort(f.begin(), f.end());
                return f;
            };
            for (const auto& e : blk.elems) {
                const std::array<std::array<int, 3>, 4> fs = {{
                    {e[1], e[2], e[3]}, {e[0], e[3], e[2]}, {e[0], e[1], e[3]}, {e[0], e[2], e[1]},
                }};
                for (const auto& f : fs) {
                    auto& slot = face_count[key(f)];
                    slot.first++;
                    slot.second = f;
                }
            }
            for (const auto& [k, slot] : face_count) {
                check(slot.first <= 2, "mesh: non-manifold boundary");
                if (slot.first == 1)
                    faces.push_back(slot.second);
            }
        } else if (blk.type == ElemType::Shell) {
            double vol = 0;
            for (const auto& e : blk.elems) {
                const std::array<int, 3> f = {e[0], e[1], e[2]};
                vol += w.rest[f[0]].dot(w.rest[f[1]].cross(w.rest[f[2]])) / 6.0;
                faces.push_back(f);
            }
            check(vol > 0.0, "mesh: inverted orientation");
        } else {
            throw ContractError("mesh: 3D scenes take tet or shell meshes");
        }
    }

    for (const auto& f : faces) {
        const double a =
            0.5 * (w.rest[f[1]] - w.rest[f[0]]).cross(w.rest[f[2]] - w.rest[f[0]]).norm();
        check(a > kDegenerate, "mesh: degenerate element");
    }
    w.bfaces = faces;
    std::sort(w.bfaces.begin(), w.bfaces.end());

    // boundary edges with their two incident faces
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < int(w.bfaces.size()); ++f)
        for (int k = 0; k < 3; ++k) {
            const int a = w.bfaces[f][k], b = w.bfaces[f][(k + 1) % 3];
            check((w.rest[a] - w.rest[b]).norm() > 1e-14, "mesh: degenerate element");
            edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
        }
    for (const auto& [e, fs] : edge_faces) {
        check(fs.size() == 2, "mesh: non-manifold boundary");
        w.bedges.push_back({e.first, e.second});
        w.edge_faces3d.push_back({fs[0], fs[1]});
        std::array<int, 2> opp;
        for (int j = 0; j < 2; ++j) {
            const auto& f = w.bfaces[fs[j]];
            opp[j] = f[0] + f[1] + f[2] - e.first - e.second;
        }
        w.edge_opp3d.push_back(opp);
    }

    // boundary vertices with ordered one-rings
    std::map<int, std::vector<int>> vfaces;
    for (int f = 0; f < int(w.bfaces.size()); ++f)
        for (int k = 0; k < 3; ++k)
            vfaces[w.bfaces[f][k]].push_back(f);

    w.node_to_bvert.assign(w.num_nodes(), -1);
    for (const auto& [v, fs] : vfaces) {
        // rotate each face so v is first, then chain by shared edges
        std::map<int, std::pair<int, int>> succ; // first ring nbr -> (second, face)
        for (int f : fs) {
            std::array<int, 3> t = w.bfaces[f];
            while (t[0] != v)
                t = {t[1], t[2], t[0]};
            check(!succ.count(t[1]), "mesh: non-manifold boundary");
            succ[t[1]] = {t[2], f};
        }
        std::vector<int> ring;
        std::vector<int> ring_faces;
        int start = succ.begin()->first;
        int cur = start;
        do {
            check(succ.count(cur) == 1, "mesh: non-manifold boundary");
            ring.push_back(cur);
            ring_faces.push_back(succ.at(cur).second);
            cur = succ.at(cur).first;
        } while (cur != start && int(ring.size()) <= int(fs.size()));
        check(int(ring.size()) == int(fs.size()), "mesh: non-manifold boundary");

        w.node_to_bvert[v] = int(w.bverts.size());
        w.bverts.push_back(v);
        w.vert_ring3d.push_back(ring);
        w.vert_faces3d.push_back(ring_faces);
    }

    // vertex/edge incidence
    w.vert_edges.assign(w.bverts.size(), {});
    for (int e = 0; e < int(w.bedges.size()); ++e)
        for (int j = 0; j < 2; ++j) {
            const int bv = w.node_to_bvert[w.bedges[e][j]];
            check(bv >= 0, "mesh: boundary bookkeeping");
            w.vert_edges[bv].push_back(e);
        }

    // length scales
    w.L_edge.resize(w.bedges.size());
    for (int e = 0; e < int(w.bedges.size()); ++e)
        w.L_edge[e] = w.rest_edge_length(e);
    w.L_vert.resize(w.bverts.size());
    for (int i = 0; i < int(w.bverts.size()); ++i) {
        double sum = 0;
        for (int e : w.vert_edges[i])
            sum += w.L_edge[e];
        check(!w.vert_edges[i].empty(), "mesh: isolated boundary vertex");
        w.L_vert[i] = sum / double(w.vert_edges[i].size());
    }
    w.eps_vert.assign(w.bverts.size(), 0.0);
    w.eps_edge.assign(w.bedges.size(), 0.0);
    w.eps_face.assign(w.bfaces.size(), 0.0);
}

// Applies a rigid transform to the current positions; rest stays put.
template <int N>
void rigid_transform(World<N>& w, const Eigen::Matrix<double, N, N>& R, const Vec<N>& t)
{
    check((R * R.transpose() - Eigen::Matrix<double, N, N>::Identity()).norm() < 1e-10,
          "rigid_transform: rotation must be orthogonal");
    check(R.determinant() > 0.0, "rigid_transform: rotation must not reflect");
    for (auto& x : w.pos)
        x = R * x + t;
}

} // namespace cbp
