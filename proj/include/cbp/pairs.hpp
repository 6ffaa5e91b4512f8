#pragma once

#include <cbp/filter.hpp>
#include <cbp/geometry.hpp>
#include <cbp/mesh.hpp>
#include <cbp/params.hpp>

#include <tuple>
#include <vector>

namespace cbp {

/// A non-adjacent primitive pair. Primitive indices refer to the world's
/// boundary arrays; VV and EE pairs are stored with a < b.
struct PairKey
{
    PairType type = PairType::VV;
    int a = 0, b = 0;

    friend bool operator<(const PairKey& x, const PairKey& y)
    {
        return std::tie(x.type, x.a, x.b) < std::tie(y.type, y.a, y.b);
    }
    friend bool operator==(const PairKey& x, const PairKey& y)
    {
        return x.type == y.type && x.a == y.a && x.b == y.b;
    }
};

struct DirectionalFactor
{
    double g_m_xy = 1, g_m_yx = 1, g_e_xy = 1, g_e_yx = 1, M = 1;
    double gamma = 1;
};

namespace pairs {

template <int N>
void nodes_of(const World<N>& w, PairType type, bool second, int idx, std::vector<int>& out)
{
    const bool is_vert = (type == PairType::VV) || (!second && (type == PairType::EV || type == PairType::VF));
    if (is_vert) {
        out.push_back(w.bverts[idx]);
    } else if (type == PairType::VF && second) {
        for (int k = 0; k < 3; ++k)
            out.push_back(w.bfaces[idx][k]);
    } else {
        out.push_back(w.bedges[idx][0]);
        out.push_back(w.bedges[idx][1]);
    }
}

template <int N>
std::vector<int> pair_nodes(const World<N>& w, const PairKey& key)
{
    std::vector<int> out;
    nodes_of(w, key.type, false, key.a, out);
    nodes_of(w, key.type, true, key.b, out);
    return out;
}

template <int N>
bool shares_vertex(const World<N>& w, const PairKey& key)
{
    std::vector<int> na, nb;
    nodes_of(w, key.type, false, key.a, na);
    nodes_of(w, key.type, true, key.b, nb);
    for (int x : na)
        for (int y : nb)
            if (x == y)
                return true;
    return false;
}

// Nodes whose positions enter the pair's energy: primitive nodes plus the
// neighbors feeding the tangent frames and exterior tests.
template <int N>
void side_stencil(const World<N>& w, PairType type, bool second, int idx, std::vector<int>& out)
{
    const bool is_vert = (type == PairType::VV) || (!second && (type == PairType::EV || type == PairType::VF));
    if (is_vert) {
        const int v = w.bverts[idx];
        out.push_back(v);
        if constexpr (N == 2) {
            out.push_back(w.vert_nbr2d[idx][0]);
            out.push_back(w.vert_nbr2d[idx][1]);
        } else {
            for (int r : w.vert_ring3d[idx])
                out.push_back(r);
        }
    } else if (type == PairType::VF && second) {
        for (int k = 0; k < 3; ++k)
            out.push_back(w.bfaces[idx][k]);
    } else {
        out.push_back(w.bedges[idx][0]);
        out.push_back(w.bedges[idx][1]);
        if constexpr (N == 3) {
            out.push_back(w.edge_opp3d[idx][0]);
            out.push_back(w.edge_opp3d[idx][1]);
        }
    }
}

template <int N>
std::vector<int> pair_stencil(const World<N>& w, const PairKey& key)
{
    std::vector<int> out;
    side_stencil(w, key.type, false, key.a, out);
    side_stencil(w, key.type, true, key.b, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// closest points per pair type (double classification, templated formulas)
// ---------------------------------------------------------------------------

template <typename T, int N>
Vec<N> values(const VecN<T, N>& x)
{
    Vec<N> v;
    for (int k = 0; k < N; ++k)
        v[k] = value_of(x[k]);
    return v;
}

template <typename T, int N>
VecN<T, N> point_edge_closest(const VecN<T, N>& p, const VecN<T, N>& a, const VecN<T, N>& b, const Region& reg)
{
    if (reg.kind == Region::Vertex)
        return reg.index == 0 ? a : b;
    const VecN<T, N> d = b - a;
    const T t = (p - a).dot(d) / d.squaredNorm();
    return a + t * d;
}

template <typename T>
VecN<T, 3> point_triangle_closest(
    const VecN<T, 3>& p, const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& c,
    const Region& reg)
{
    switch (reg.kind) {
    case Region::Interior:
        return geom::triangle_interior_closest<T>(p, a, b, c);
    case Region::Vertex:
        return reg.index == 0 ? a : (reg.index == 1 ? b : c);
    case Region::Edge:
    default: {
        const VecN<T, 3>& u = reg.index == 0 ? a : (reg.index == 1 ? b : c);
        const VecN<T, 3>& w = reg.index == 0 ? b : (reg.index == 1 ? c : a);
        return point_edge_closest<T, 3>(p, u, w, Region::interior());
    }
    }
}

template <typename T, int N>
std::pair<VecN<T, N>, VecN<T, N>> edge_edge_closest(
    const VecN<T, N>& p1, const VecN<T, N>& q1, const VecN<T, N>& p2, const VecN<T, N>& q2,
    const ClosestPointResult<N>& cls)
{
    const bool ia = cls.region_a.is_interior(), ib = cls.region_b.is_interior();
    if (cls.parallel) {
        const double s = cls.bary_a[1];
        const VecN<T, N> x = p1 + T(s) * (q1 - p1);
        return {x, point_edge_closest<T, N>(x, p2, q2, cls.region_b)};
    }
    if (ia && ib) {
        const VecN<T, N> d1 = q1 - p1, d2 = q2 - p2, r12 = p1 - p2;
        const T a = d1.squaredNorm(), e = d2.squaredNorm(), b = d1.dot(d2);
        const T c = d1.dot(r12), f = d2.dot(r12);
        const T det = a * e - b * b;
        const T s = (b * f - c * e) / det;
        const T t = (b * s + f) / e;
        return {p1 + s * d1, p2 + t * d2};
    }
    if (ia) {
        const VecN<T, N>& v = cls.region_b.index == 0 ? p2 : q2;
        return {point_edge_closest<T, N>(v, p1, q1, Region::interior()), v};
    }
    if (ib) {
        const VecN<T, N>& u = cls.region_a.index == 0 ? p1 : q1;
        return {u, point_edge_closest<T, N>(u, p2, q2, Region::interior())};
    }
    return {cls.region_a.index == 0 ? p1 : q1, cls.region_b.index == 0 ? p2 : q2};
}

// ---------------------------------------------------------------------------
// side factors
// ---------------------------------------------------------------------------

// v points toward this side's closest point.
template <typename T, int N, class GetPos>
std::pair<T, T> side_factors(
    const World<N>& w, PairType type, bool second, int idx, const VecN<T, N>& v,
    const PotentialParams& par, GetPos&& X)
{
    using kernels::smooth_step;
    const bool is_vert = (type == PairType::VV) || (!second && (type == PairType::EV || type == PairType::VF));

    T gm(1.0), ge(1.0);
    if (is_vert) {
        const int node = w.bverts[idx];
        const VecN<T, N> y = X(node);
        if constexpr (N == 2) {
            const VecN<T, 2> p = X(w.vert_nbr2d[idx][0]);
            const VecN<T, 2> q = X(w.vert_nbr2d[idx][1]);
            gm = filter::g_m(filter::vertex_frame_2d<T>(y, p, q), v, par.alpha);
            // toward the previous vertex first: satisfies the ordering rule
            const VecN<T, 2> e1 = filter::normalized<T, 2>(p - y);
            const VecN<T, 2> e2 = filter::normalized<T, 2>(q - y);
            ge = smooth_step(filter::phi_e_2d<T>(v, e1, e2), par.beta);
        } else {
            const auto& ring = w.vert_ring3d[idx];
            std::vector<VecN<T, 3>> rp;
            rp.reserve(ring.size());
            for (int r : ring)
                rp.push_back(X(r));
            gm = filter::g_m(filter::vertex_frame_3d<T>(y, rp), v, par.alpha);
            std::vector<VecN<T, 3>> normals;
            normals.reserve(ring.size());
            const int m = int(ring.size());
            for (int i = 0; i < m; ++i)
                normals.push_back(
                    filter::normalized<T, 3>((rp[i] - y).cross(rp[(i + 1) % m] - y)));
            ge = filter::g_e_normals<T>(v, normals, par.beta);
        }
    } else if (type == PairType::VF && second) {
        if constexpr (N == 3) {
            const auto& f = w.bfaces[idx];
            const VecN<T, 3> a = X(f[0]), b = X(f[1]), c = X(f[2]);
            const VecN<T, 3> n = filter::normalized<T, 3>((b - a).cross(c - a));
            ge = filter::g_e_normals<T>(v, {n}, par.beta);
            // face-interior closest point: no local-minimum terms survive
        }
    } else {
        const VecN<T, N> a = X(w.bedges[idx][0]);
        const VecN<T, N> b = X(w.bedges[idx][1]);
        if constexpr (N == 2) {
            // straight-line cone at an edge-interior point
            const VecN<T, 2> e2 = filter::normalized<T, 2>(b - a);
            const VecN<T, 2> e1 = -e2;
            ge = smooth_step(filter::phi_e_2d<T>(v, e1, e2), par.beta);
            // the along-edge minimum terms are automatically satisfied
        } else {
            const VecN<T, 3> o0 = X(w.edge_opp3d[idx][0]);
            const VecN<T, 3> o1 = X(w.edge_opp3d[idx][1]);
            filter::TangentFrame<T, 3> frame;
            frame.patches.push_back({filter::edge_t3_direction<T>(a, b, o0)});
            frame.patches.push_back({filter::edge_t3_direction<T>(a, b, o1)});
            gm = filter::g_m(frame, v, par.alpha);
            const auto& f0 = w.bfaces[w.edge_faces3d[idx][0]];
            const VecN<T, 3> n0 = filter::normalized<T, 3>(
                (X(f0[1]) - X(f0[0])).cross(X(f0[2]) - X(f0[0])));
            ge = smooth_step(filter::phi_e_edge_3d<T>(v, a, b, o0, o1, n0), par.beta);
        }
    }
    return {gm, ge};
}

// ---------------------------------------------------------------------------
// full pair evaluation
// ---------------------------------------------------------------------------

template <typename T, int N>
struct PairValue
{
    T d{0.0};
    T gamma{0.0};     // g^PS(x,y) g^PS(y,x) M
    T gamma_dir{0.0}; // without M
    T M{1.0};
    T weight{0.0};    // L-powers times current measures
    DirectionalFactor fac;
    Region region_a, region_b;
    VecN<T, N> cp_a, cp_b;
};

template <typename T, int N, class GetPos>
PairValue<T, N> eval_pair(
    const World<N>& w, const PairKey& key, const PotentialParams& par, GetPos&& X)
{
    using std::sqrt;
    PairValue<T, N> out;

    // closest points
    VecN<T, N> cp_a, cp_b;
    switch (key.type) {
    case PairType::VV: {
        cp_a = X(w.bverts[key.a]);
        cp_b = X(w.bverts[key.b]);
        out.region_a = out.region_b = Region::vertex(0);
        break;
    }
    case PairType::EV: {
        const VecN<T, N> p = X(w.bverts[key.a]);
        const VecN<T, N> a = X(w.bedges[key.b][0]);
        const VecN<T, N> b = X(w.bedges[key.b][1]);
        const auto cls = geom::closest_point_edge<N>(values<T, N>(p), values<T, N>(a), values<T, N>(b));
        cp_a = p;
        cp_b = point_edge_closest<T, N>(p, a, b, cls.region_b);
        out.region_a = cls.region_a;
        out.region_b = cls.region_b;
        break;
    }
    case PairType::VF: {
        if constexpr (N == 3) {
            const VecN<T, 3> p = X(w.bverts[key.a]);
            const VecN<T, 3> a = X(w.bfaces[key.b][0]);
            const VecN<T, 3> b = X(w.bfaces[key.b][1]);
            const VecN<T, 3> c = X(w.bfaces[key.b][2]);
            const auto cls = geom::closest_point_triangle(
                values<T, 3>(p), values<T, 3>(a), values<T, 3>(b), values<T, 3>(c));
            cp_a = p;
            cp_b = point_triangle_closest<T>(p, a, b, c, cls.region_b);
            out.region_a = cls.region_a;
            out.region_b = cls.region_b;
        }
        break;
    }
    case PairType::EE: {
        const VecN<T, N> p1 = X(w.bedges[key.a][0]), q1 = X(w.bedges[key.a][1]);
        const VecN<T, N> p2 = X(w.bedges[key.b][0]), q2 = X(w.bedges[key.b][1]);
        const auto cls = geom::closest_edge_edge<N>(
            values<T, N>(p1), values<T, N>(q1), values<T, N>(p2), values<T, N>(q2));
        auto [x, y] = edge_edge_closest<T, N>(p1, q1, p2, q2, cls);
        cp_a = x;
        cp_b = y;
        out.region_a = cls.region_a;
        out.region_b = cls.region_b;
        break;
    }
    }
    out.cp_a = cp_a;
    out.cp_b = cp_b;

    const T d = sqrt((cp_b - cp_a).squaredNorm());
    out.d = d;
    check(value_of(d) > 0.0, "eval_pair: zero distance (collision missed upstream)");
    const VecN<T, N> v = (cp_b - cp_a) / d;

    // directional factors: g^PS at side b with +v, at side a with -v
    auto [gm_xy, ge_xy] = side_factors<T, N>(w, key.type, true, key.b, v, par, X);
    auto [gm_yx, ge_yx] = side_factors<T, N>(w, key.type, false, key.a, VecN<T, N>(-v), par, X);
    out.gamma_dir = gm_xy * ge_xy * gm_yx * ge_yx;

    // closest-point mollifier
    T M(1.0);
    switch (key.type) {
    case PairType::VV:
        break;
    case PairType::EV:
        M = filter::mollifier_ev<T, N>(
            X(w.bverts[key.a]), X(w.bedges[key.b][0]), X(w.bedges[key.b][1]), d, par.c);
        break;
    case PairType::VF:
        if constexpr (N == 3)
            M = filter::mollifier_fv<T>(
                X(w.bverts[key.a]), X(w.bfaces[key.b][0]), X(w.bfaces[key.b][1]),
                X(w.bfaces[key.b][2]), d, par.c);
        break;
    case PairType::EE:
        M = filter::mollifier_ee<T, N>(
            X(w.bedges[key.a][0]), X(w.bedges[key.a][1]),
            X(w.bedges[key.b][0]), X(w.bedges[key.b][1]), d, par.c);
        break;
    }
    out.M = M;
    out.gamma = out.gamma_dir * M;

    // weight: per primitive, rest-L to its codimension times current measure
    auto prim_weight = [&](bool second, int idx) -> T {
        const bool is_vert =
            (key.type == PairType::VV) || (!second && (key.type == PairType::EV || key.type == PairType::VF));
        if (is_vert) {
            double lw = 1.0;
            for (int k = 0; k < N - 1; ++k)
                lw *= w.L_vert[idx];
            return T(lw);
        }
        if (key.type == PairType::VF && second) {
            const auto& f = w.bfaces[idx];
            if constexpr (N == 3) {
                const VecN<T, 3> ab = X(f[1]) - X(f[0]), ac = X(f[2]) - X(f[0]);
                return T(0.5) * sqrt(ab.cross(ac).squaredNorm());
            }
            return T(1.0);
        }
        // edge: rest-L^{N-2} times current length
        const VecN<T, N> e = X(w.bedges[idx][1]) - X(w.bedges[idx][0]);
        T m = sqrt(e.squaredNorm());
        if constexpr (N == 3)
            m = m * T(w.L_edge[idx]);
        return m;
    };
    out.weight = prim_weight(false, key.a) * prim_weight(true, key.b);

    out.fac.g_m_xy = value_of(gm_xy);
    out.fac.g_e_xy = value_of(ge_xy);
    out.fac.g_m_yx = value_of(gm_yx);
    out.fac.g_e_yx = value_of(ge_yx);
    out.fac.M = value_of(M);
    out.fac.gamma = value_of(out.gamma);
    return out;
}

} // namespace pairs
} // namespace cbp
