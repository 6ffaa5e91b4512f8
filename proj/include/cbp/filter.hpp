#pragma once

#include <cbp/geometry.hpp>
#include <cbp/kernels.hpp>

#include <vector>

namespace cbp {
namespace filter {

// Unit tangent directions constraining the local-minimum test, grouped by
// incident patch. For piecewise-linear geometry a patch contributes its two
// boundary directions plus the in-patch bisector.
template <typename T, int N>
struct TangentFrame
{
    std::vector<std::vector<VecN<T, N>>> patches;

    std::vector<VecN<T, N>> flat() const
    {
        std::vector<VecN<T, N>> out;
        for (const auto& p : patches)
            out.insert(out.end(), p.begin(), p.end());
        return out;
    }
};

template <typename T, int N>
VecN<T, N> normalized(const VecN<T, N>& v)
{
    using std::sqrt;
    return v / sqrt(v.squaredNorm());
}

// Frame at a 2D boundary vertex: one direction per incident edge curve,
// pointing away from the vertex.
template <typename T>
TangentFrame<T, 2> vertex_frame_2d(const VecN<T, 2>& y, const VecN<T, 2>& prev, const VecN<T, 2>& next)
{
    TangentFrame<T, 2> f;
    f.patches.push_back({normalized<T, 2>(prev - y)});
    f.patches.push_back({normalized<T, 2>(next - y)});
    return f;
}

// Frame at a 3D boundary vertex: per incident face, the two ring directions
// and their angle bisector.
template <typename T>
TangentFrame<T, 3> vertex_frame_3d(const VecN<T, 3>& y, const std::vector<VecN<T, 3>>& ring)
{
    TangentFrame<T, 3> f;
    const int m = int(ring.size());
    check(m >= 3, "vertex_frame_3d: ring too small");
    for (int i = 0; i < m; ++i) {
        const VecN<T, 3> t1 = normalized<T, 3>(ring[i] - y);
        const VecN<T, 3> t2 = normalized<T, 3>(ring[(i + 1) % m] - y);
        const VecN<T, 3> s = t1 + t2;
        check(value_of(s.squaredNorm()) > 1e-20, "vertex_frame_3d: degenerate corner");
        f.patches.push_back({t1, t2, normalized<T, 3>(s)});
    }
    return f;
}

// In-face perpendicular of an edge, pointing into the face holding `opp`.
// This is the degenerate-bisector direction at edge-interior points.
template <typename T>
VecN<T, 3> edge_t3_direction(
    const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& opp)
{
    const VecN<T, 3> e = normalized<T, 3>(b - a);
    const VecN<T, 3> w = opp - a;
    const VecN<T, 3> perp = w - e * w.dot(e);
    check(value_of(perp.squaredNorm()) > 1e-24, "edge_t3_direction: degenerate face");
    return normalized<T, 3>(perp);
}

// Frame at a point interior to a 3D mesh edge: per incident face, the two
// (opposite) edge directions and the in-face perpendicular.
template <typename T>
TangentFrame<T, 3> edge_frame_3d(
    const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& opp0, const VecN<T, 3>& opp1)
{
    TangentFrame<T, 3> f;
    const VecN<T, 3> e = normalized<T, 3>(b - a);
    f.patches.push_back({e, -e, edge_t3_direction(a, b, opp0)});
    f.patches.push_back({e, -e, edge_t3_direction(a, b, opp1)});
    return f;
}

// Local-minimum factor: product of smoothed steps of the tangent dot
// products. `v` is the unit separation direction pointing toward the frame's
// side, per the sign convention of the constraint.
template <typename T, int N>
T g_m(const TangentFrame<T, N>& frame, const VecN<T, N>& v, double alpha)
{
    T g(1.0);
    for (const auto& patch : frame.patches)
        for (const auto& t : patch) {
            g = g * kernels::smooth_step(t.dot(v), alpha);
            if (value_of(g) == 0.0)
                return T(0.0);
        }
    return g;
}

// 2D cone test: positive iff v points strictly between e1 and e2 into the
// material, zero iff collinear with either. Callers order (e1, e2) so the
// first satisfies the cross-product condition with its outward normal.
template <typename T>
T phi_e_2d(const VecN<T, 2>& v, const VecN<T, 2>& e1, const VecN<T, 2>& e2)
{
    return cross2<T>(v - e1, v - e2);
}

// Signed area in the plane perpendicular to `axis`.
template <typename T>
T cross_about(const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& axis)
{
    return a.cross(b).dot(axis);
}

// Exterior test for a point interior to a 3D edge: project onto the plane
// perpendicular to the edge and apply the 2D test. `n0` is the outward
// normal of the face holding opp0. A direction parallel to the edge is
// treated as interior.
template <typename T>
T phi_e_edge_3d(
    const VecN<T, 3>& v,
    const VecN<T, 3>& a, const VecN<T, 3>& b,
    const VecN<T, 3>& opp0, const VecN<T, 3>& opp1,
    const VecN<T, 3>& n0)
{
    const VecN<T, 3> e = normalized<T, 3>(b - a);
    const VecN<T, 3> vperp = v - e * v.dot(e);
    if (value_of(vperp.squaredNorm()) < 1e-20)
        return T(1.0);
    const VecN<T, 3> vt = normalized<T, 3>(vperp);
    VecN<T, 3> t0 = edge_t3_direction<T>(a, b, opp0);
    VecN<T, 3> t1 = edge_t3_direction<T>(a, b, opp1);
    // order so that cross(e1, n1) is positive about the edge axis
    const double s = value_of(cross_about<T>(t0, n0, e));
    const VecN<T, 3>& e1 = s > 0.0 ? t0 : t1;
    const VecN<T, 3>& e2 = s > 0.0 ? t1 : t0;
    return cross_about<T>(vt - e1, vt - e2, e);
}

// Mollified exterior factor at a vertex (or face point, with one normal):
// 1 as soon as v opposes one incident normal, 0 once it aligns with all of
// them beyond beta.
template <typename T>
T g_e_normals(const VecN<T, 3>& v, const std::vector<VecN<T, 3>>& normals, double beta)
{
    T sum(0.0);
    for (const auto& n : normals) {
        sum = sum + kernels::smooth_step(-n.dot(v), beta);
        if (value_of(sum) >= 1.0)
            return T(1.0);
    }
    return kernels::smooth_step(sum - T(1.0), 1.0);
}

// ---------------------------------------------------------------------------
// Exact cone-inside test (oracle; not differentiable)
// ---------------------------------------------------------------------------

namespace cone {

inline Vec3 project_unit(const Vec3& a, const Vec3& b)
{
    const Vec3 p = a - (a.dot(b) / b.squaredNorm()) * b;
    return p.normalized();
}

inline double edge_closest_distance(const Vec3& v, const Vec3& e)
{
    const double w = std::max(v.dot(e) / e.squaredNorm(), 0.0);
    return (v - w * e).norm();
}

// Closest point to v on the planar sector spanned by rays a and b.
// `on_boundary` is set when the minimizer lies on a bounding ray or apex.
inline Vec3 sector_closest(const Vec3& v, const Vec3& a, const Vec3& b, bool& on_boundary)
{
    const double aa = a.squaredNorm(), bb = b.squaredNorm(), ab = a.dot(b);
    const double det = aa * bb - ab * ab;
    check(det > 1e-16 * aa * bb, "determine_inside_3d: degenerate ring");
    const double ra = a.dot(v), rb = b.dot(v);
    const double s = (ra * bb - rb * ab) / det;
    const double t = (rb * aa - ra * ab) / det;
    if (s > 0.0 && t > 0.0) {
        on_boundary = false;
        return s * a + t * b;
    }
    on_boundary = true;
    const double wa = std::max(ra / aa, 0.0);
    const double wb = std::max(rb / bb, 0.0);
    const Vec3 pa = wa * a, pb = wb * b;
    return (v - pa).squaredNorm() <= (v - pb).squaredNorm() ? pa : pb;
}

} // namespace cone

// Exact inside test for a direction v against the cone spanned by the
// ordered 1-ring rays {e_i}, with n_i the outward normal of the face spanned
// by (e_{i-1}, e_i).
inline bool determine_inside_3d(
    const Vec3& v, const std::vector<Vec3>& e, const std::vector<Vec3>& n, int depth = 0)
{
    const int m = int(e.size());
    check(m >= 3 && int(n.size()) == m, "determine_inside_3d: bad ring");
    check(depth < 2, "determine_inside_3d: malformed input (double apex case)");

    int best = -1;
    bool best_boundary = false;
    double best_d2 = std::numeric_limits<double>::max();
    Vec3 best_p = Vec3::Zero();
    for (int i = 0; i < m; ++i) {
        bool on_boundary = false;
        const Vec3 p = cone::sector_closest(v, e[(i + m - 1) % m], e[i], on_boundary);
        const double d2 = (v - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
            best_boundary = on_boundary;
            best_p = p;
        }
    }

    if (best_p.squaredNorm() < 1e-24) { // apex is the closest point
        bool coplanar = true;
        for (int i = 1; i < m && coplanar; ++i)
            coplanar = (n[i] - n[0]).norm() < 1e-9;
        if (coplanar)
            return -v.dot(n[0]) > 0.0;
        // The whole cone lies in the closed hemisphere opposite v, so the
        // hemisphere around v is crossing-free: classify a direction on its
        // equator closest in angle to the cone instead. (Flipping to -v is
        // not sound here: -v can land on the same side as v.)
        const Vec3 vn = v.normalized();
        int best_ray = 0;
        double best_dot = -std::numeric_limits<double>::max();
        for (int i = 0; i < m; ++i) {
            const double dot = vn.dot(e[i].normalized());
            if (dot > best_dot) {
                best_dot = dot;
                best_ray = i;
            }
        }
        const Vec3 d = e[best_ray].normalized() - best_dot * vn;
        check(d.norm() > 1e-12, "determine_inside_3d: degenerate apex configuration");
        return determine_inside_3d(d.normalized(), e, n, depth + 1);
    }

    if (!best_boundary)
        return -v.dot(n[best]) > 0.0;

    // closest point on a ring ray: reduce to the projected 2D sector
    int j = 0;
    double dmin = std::numeric_limits<double>::max();
    for (int i = 0; i < m; ++i) {
        const double d = cone::edge_closest_distance(v, e[i]);
        if (d < dmin) {
            dmin = d;
            j = i;
        }
    }
    const Vec3 e1 = cone::project_unit(e[(j + m - 1) % m], e[j]);
    const Vec3 e2 = cone::project_unit(e[(j + 1) % m], e[j]);
    const Vec3 vt = cone::project_unit(v, e[j]);
    return (vt - e1).cross(vt - e2).dot(e[j]) < 0.0;
}

// ---------------------------------------------------------------------------
// Closest-point mollifiers
// ---------------------------------------------------------------------------

template <typename T>
T inverse_or_check(const T& dist)
{
    check(value_of(dist) > 0.0, "mollifier: zero pair distance");
    return T(1.0) / dist;
}

// Edge-vertex: vanishes as the closest point reaches an endpoint.
template <typename T, int N>
T mollifier_ev(
    const VecN<T, N>& p, const VecN<T, N>& a, const VecN<T, N>& b, const T& dist, double c)
{
    using kernels::mollify_hc;
    const T inv = inverse_or_check(dist);
    return mollify_hc(geom::point_point_distance<T, N>(a, p) * inv, c)
        * mollify_hc(geom::point_point_distance<T, N>(b, p) * inv, c);
}

// Face-vertex: vanishes as the closest point reaches the triangle boundary.
template <typename T>
T mollifier_fv(
    const VecN<T, 3>& p, const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& c3,
    const T& dist, double c)
{
    using kernels::mollify_hc;
    const T inv = inverse_or_check(dist);
    return mollify_hc(geom::point_edge_distance<T, 3>(p, a, b) * inv, c)
        * mollify_hc(geom::point_edge_distance<T, 3>(p, a, c3) * inv, c)
        * mollify_hc(geom::point_edge_distance<T, 3>(p, b, c3) * inv, c);
}

// Edge-edge: vanishes when either closest point reaches an endpoint,
// including the parallel configuration.
template <typename T, int N>
T mollifier_ee(
    const VecN<T, N>& a, const VecN<T, N>& b, const VecN<T, N>& c2, const VecN<T, N>& d2,
    const T& dist, double c)
{
    using kernels::mollify_hc;
    const T inv = inverse_or_check(dist);
    return mollify_hc(geom::point_edge_distance<T, N>(a, c2, d2) * inv, c)
        * mollify_hc(geom::point_edge_distance<T, N>(b, c2, d2) * inv, c)
        * mollify_hc(geom::point_edge_distance<T, N>(c2, a, b) * inv, c)
        * mollify_hc(geom::point_edge_distance<T, N>(d2, a, b) * inv, c);
}

} // namespace filter
} // namespace cbp
