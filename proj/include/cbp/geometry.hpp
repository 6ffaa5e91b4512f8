#pragma once

#include <cbp/autodiff.hpp>
#include <cbp/common.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace cbp {

enum class PairType { VV, EV, VF, EE };

inline const char* pair_type_name(PairType t)
{
    switch (t) {
    case PairType::VV: return "VV";
    case PairType::EV: return "EV";
    case PairType::VF: return "VF";
    case PairType::EE: return "EE";
    }
    return "?";
}

/// Sub-simplex holding the minimizer of the distance over a primitive.
struct Region
{
    enum Kind { Interior, Vertex, Edge } kind = Interior;
    int index = 0; // local vertex/edge index within the primitive

    static Region interior() { return {Interior, 0}; }
    static Region vertex(int k) { return {Vertex, k}; }
    static Region edge(int k) { return {Edge, k}; }

    bool is_interior() const { return kind == Interior; }
    bool operator==(const Region& o) const { return kind == o.kind && index == o.index; }
};

template <int N>
struct ClosestPointResult
{
    PairType type = PairType::VV;
    Vec<N> point_a = Vec<N>::Zero();
    Vec<N> point_b = Vec<N>::Zero();
    Eigen::Vector3d bary_a = Eigen::Vector3d::Zero(); // padded barycentrics
    Eigen::Vector3d bary_b = Eigen::Vector3d::Zero();
    double d = 0.0;
    Region region_a, region_b;
    bool parallel = false; // edge-edge degenerate pair
};

namespace geom {

constexpr double kParallelTol = 1e-10; // on sin^2 of the edge-edge angle

// ---------------------------------------------------------------------------
// double-level queries with region classification
// ---------------------------------------------------------------------------

template <int N>
ClosestPointResult<N> closest_point_point(const Vec<N>& a, const Vec<N>& b)
{
    ClosestPointResult<N> r;
    r.type = PairType::VV;
    r.point_a = a;
    r.point_b = b;
    r.bary_a[0] = r.bary_b[0] = 1.0;
    r.d = (a - b).norm();
    r.region_a = r.region_b = Region::vertex(0);
    return r;
}

// Closest point on segment [a, b] to p; primitive A is the point.
template <int N>
ClosestPointResult<N> closest_point_edge(const Vec<N>& p, const Vec<N>& a, const Vec<N>& b)
{
    const Vec<N> d = b - a;
    const double len2 = d.squaredNorm();
    check(len2 > 0.0, "closest_point_edge: degenerate segment");
    const double t = (p - a).dot(d) / len2;

    ClosestPointResult<N> r;
    r.type = PairType::EV;
    r.point_a = p;
    r.bary_a[0] = 1.0;
    r.region_a = Region::vertex(0);
    if (t <= 0.0) {
        r.point_b = a;
        r.bary_b = Eigen::Vector3d(1, 0, 0);
        r.region_b = Region::vertex(0);
    } else if (t >= 1.0) {
        r.point_b = b;
        r.bary_b = Eigen::Vector3d(0, 1, 0);
        r.region_b = Region::vertex(1);
    } else {
        r.point_b = a + t * d;
        r.bary_b = Eigen::Vector3d(1.0 - t, t, 0);
        r.region_b = Region::interior();
    }
    r.d = (p - r.point_b).norm();
    return r;
}

// Closest point on triangle (a, b, c) to p. Local edge k joins vertices
// k and (k+1)%3.
inline ClosestPointResult<3>
closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c)
{
    ClosestPointResult<3> r;
    r.type = PairType::VF;
    r.point_a = p;
    r.bary_a[0] = 1.0;
    r.region_a = Region::vertex(0);

    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    check(ab.cross(ac).squaredNorm() > 0.0, "closest_point_triangle: degenerate triangle");

    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        r.point_b = a;
        r.bary_b = Eigen::Vector3d(1, 0, 0);
        r.region_b = Region::vertex(0);
        r.d = (p - a).norm();
        return r;
    }

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        r.point_b = b;
        r.bary_b = Eigen::Vector3d(0, 1, 0);
        r.region_b = Region::vertex(1);
        r.d = (p - b).norm();
        return r;
    }

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        r.point_b = a + v * ab;
        r.bary_b = Eigen::Vector3d(1.0 - v, v, 0);
        r.region_b = Region::edge(0);
        r.d = (p - r.point_b).norm();
        return r;
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        r.point_b = c;
        r.bary_b = Eigen::Vector3d(0, 0, 1);
        r.region_b = Region::vertex(2);
        r.d = (p - c).norm();
        return r;
    }

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        r.point_b = a + w * ac;
        r.bary_b = Eigen::Vector3d(1.0 - w, 0, w);
        r.region_b = Region::edge(2);
        r.d = (p - r.point_b).norm();
        return r;
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        r.point_b = b + w * (c - b);
        r.bary_b = Eigen::Vector3d(0, 1.0 - w, w);
        r.region_b = Region::edge(1);
        r.d = (p - r.point_b).norm();
        return r;
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    r.point_b = a + v * ab + w * ac;
    r.bary_b = Eigen::Vector3d(1.0 - v - w, v, w);
    r.region_b = Region::interior();
    r.d = (p - r.point_b).norm();
    return r;
}

// Closest points between segments [p1,q1] and [p2,q2]. Parallel pairs are
// tie-broken at the midpoint of the overlap interval.
template <int N>
ClosestPointResult<N> closest_edge_edge(
    const Vec<N>& p1, const Vec<N>& q1, const Vec<N>& p2, const Vec<N>& q2)
{
    const Vec<N> d1 = q1 - p1, d2 = q2 - p2, r12 = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm();
    check(a > 0.0 && e > 0.0, "closest_edge_edge: degenerate segment");
    const double b = d1.dot(d2);
    const double c = d1.dot(r12), f = d2.dot(r12);
    const double denom = a * e - b * b;

    ClosestPointResult<N> r;
    r.type = PairType::EE;

    double s = 0.0, t = 0.0;
    if (denom > kParallelTol * a * e) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
        t = (b * s + f) / e;
        if (t < 0.0) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else if (t > 1.0) {
            t = 1.0;
            s = std::clamp((b - c) / a, 0.0, 1.0);
        }
    } else {
        r.parallel = true;
        // Overlap of the projection of [p2,q2] onto segment 1's parameter.
        const double u0 = (p2 - p1).dot(d1) / a;
        const double u1 = (q2 - p1).dot(d1) / a;
        const double lo = std::max(0.0, std::min(u0, u1));
        const double hi = std::min(1.0, std::max(u0, u1));
        if (lo <= hi) {
            s = 0.5 * (lo + hi);
            t = std::clamp((p1 + s * d1 - p2).dot(d2) / e, 0.0, 1.0);
        } else {
            // Disjoint shadows: the minimum is attained at endpoints.
            s = std::clamp((u0 + u1) * 0.5, 0.0, 1.0);
            t = std::clamp((p1 + s * d1 - p2).dot(d2) / e, 0.0, 1.0);
        }
    }

    r.point_a = p1 + s * d1;
    r.point_b = p2 + t * d2;
    r.bary_a = Eigen::Vector3d(1.0 - s, s, 0);
    r.bary_b = Eigen::Vector3d(1.0 - t, t, 0);
    r.region_a = (s <= 0.0) ? Region::vertex(0) : (s >= 1.0) ? Region::vertex(1) : Region::interior();
    r.region_b = (t <= 0.0) ? Region::vertex(0) : (t >= 1.0) ? Region::vertex(1) : Region::interior();
    r.d = (r.point_a - r.point_b).norm();
    return r;
}

// ---------------------------------------------------------------------------
// templated smooth distance functions (value branches pick the active
// sub-simplex; each branch is the closed form of that region)
// ---------------------------------------------------------------------------

template <typename T, int N>
T point_point_distance(const VecN<T, N>& a, const VecN<T, N>& b)
{
    using std::sqrt;
    return sqrt((a - b).squaredNorm());
}

template <typename T, int N>
T point_edge_distance(const VecN<T, N>& p, const VecN<T, N>& a, const VecN<T, N>& b)
{
    using std::sqrt;
    const VecN<T, N> d = b - a;
    const T t = (p - a).dot(d) / d.squaredNorm();
    if (value_of(t) <= 0.0)
        return sqrt((p - a).squaredNorm());
    if (value_of(t) >= 1.0)
        return sqrt((p - b).squaredNorm());
    const VecN<T, N> cp = a + t * d;
    return sqrt((p - cp).squaredNorm());
}

template <typename T>
VecN<T, 3> triangle_interior_closest(
    const VecN<T, 3>& p, const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& c)
{
    const VecN<T, 3> d1 = b - a, d2 = c - a, w = p - a;
    const T a11 = d1.squaredNorm(), a12 = d1.dot(d2), a22 = d2.squaredNorm();
    const T r1 = d1.dot(w), r2 = d2.dot(w);
    const T det = a11 * a22 - a12 * a12;
    const T u = (r1 * a22 - r2 * a12) / det;
    const T v = (r2 * a11 - r1 * a12) / det;
    return a + u * d1 + v * d2;
}

template <typename T>
T point_triangle_distance(
    const VecN<T, 3>& p, const VecN<T, 3>& a, const VecN<T, 3>& b, const VecN<T, 3>& c)
{
    using std::sqrt;
    Vec3 pd(value_of(p[0]), value_of(p[1]), value_of(p[2]));
    Vec3 ad(value_of(a[0]), value_of(a[1]), value_of(a[2]));
    Vec3 bd(value_of(b[0]), value_of(b[1]), value_of(b[2]));
    Vec3 cd(value_of(c[0]), value_of(c[1]), value_of(c[2]));
    const Region reg = closest_point_triangle(pd, ad, bd, cd).region_b;
    switch (reg.kind) {
    case Region::Interior: {
        const VecN<T, 3> cp = triangle_interior_closest(p, a, b, c);
        return sqrt((p - cp).squaredNorm());
    }
    case Region::Vertex: {
        const VecN<T, 3>& v = reg.index == 0 ? a : (reg.index == 1 ? b : c);
        return sqrt((p - v).squaredNorm());
    }
    case Region::Edge:
    default: {
        const VecN<T, 3>& u = reg.index == 0 ? a : (reg.index == 1 ? b : c);
        const VecN<T, 3>& w = reg.index == 0 ? b : (reg.index == 1 ? c : a);
        return point_edge_distance<T, 3>(p, u, w);
    }
    }
}

template <typename T, int N>
T edge_edge_distance(
    const VecN<T, N>& p1, const VecN<T, N>& q1, const VecN<T, N>& p2, const VecN<T, N>& q2)
{
    using std::sqrt;
    Vec<N> p1d, q1d, p2d, q2d;
    for (int k = 0; k < N; ++k) {
        p1d[k] = value_of(p1[k]);
        q1d[k] = value_of(q1[k]);
        p2d[k] = value_of(p2[k]);
        q2d[k] = value_of(q2[k]);
    }
    const ClosestPointResult<N> cls = closest_edge_edge<N>(p1d, q1d, p2d, q2d);

    const bool ia = cls.region_a.is_interior(), ib = cls.region_b.is_interior();
    if (cls.parallel) {
        // Frozen parameter on edge 1, projection on edge 2; the edge-edge
        // mollifier vanishes here so the exact profile is immaterial.
        const double s = cls.bary_a[1];
        const VecN<T, N> x = p1 + T(s) * (q1 - p1);
        return point_edge_distance<T, N>(x, p2, q2);
    }
    if (ia && ib) {
        const VecN<T, N> d1 = q1 - p1, d2 = q2 - p2, r12 = p1 - p2;
        const T a = d1.squaredNorm(), e = d2.squaredNorm(), b = d1.dot(d2);
        const T c = d1.dot(r12), f = d2.dot(r12);
        const T det = a * e - b * b;
        const T s = (b * f - c * e) / det;
        const T t = (b * s + f) / e;
        const VecN<T, N> x = p1 + s * d1, y = p2 + t * d2;
        return sqrt((x - y).squaredNorm());
    }
    if (ia) { // minimizer at a vertex of edge 2
        const VecN<T, N>& v = cls.region_b.index == 0 ? p2 : q2;
        return point_edge_distance<T, N>(v, p1, q1);
    }
    if (ib) {
        const VecN<T, N>& v = cls.region_a.index == 0 ? p1 : q1;
        return point_edge_distance<T, N>(v, p2, q2);
    }
    const VecN<T, N>& u = cls.region_a.index == 0 ? p1 : q1;
    const VecN<T, N>& v = cls.region_b.index == 0 ? p2 : q2;
    return sqrt((u - v).squaredNorm());
}

// ---------------------------------------------------------------------------
// exact intersection predicates (test oracles)
// ---------------------------------------------------------------------------

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return cross2<double>(b - a, c - a);
}

inline bool on_segment_collinear(const Vec2& a, const Vec2& b, const Vec2& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x())
        && std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Segment-segment intersection including touching configurations.
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const double o1 = orient2d(a, b, c);
    const double o2 = orient2d(a, b, d);
    const double o3 = orient2d(c, d, a);
    const double o4 = orient2d(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
        return true;
    if (o1 == 0 && on_segment_collinear(a, b, c))
        return true;
    if (o2 == 0 && on_segment_collinear(a, b, d))
        return true;
    if (o3 == 0 && on_segment_collinear(c, d, a))
        return true;
    if (o4 == 0 && on_segment_collinear(c, d, b))
        return true;
    return false;
}

// Triangle-triangle overlap test (separating axes over edges and normals).
inline bool triangles_intersect(
    const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2)
{
    auto project = [](const std::array<Vec3, 3>& t, const Vec3& axis, double& lo, double& hi) {
        lo = hi = t[0].dot(axis);
        for (int i = 1; i < 3; ++i) {
            const double v = t[i].dot(axis);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    auto separated = [&](const Vec3& axis) {
        if (axis.squaredNorm() < 1e-24)
            return false;
        double lo1, hi1, lo2, hi2;
        project(t1, axis, lo1, hi1);
        project(t2, axis, lo2, hi2);
        return hi1 < lo2 || hi2 < lo1;
    };

    const Vec3 n1 = (t1[1] - t1[0]).cross(t1[2] - t1[0]);
    const Vec3 n2 = (t2[1] - t2[0]).cross(t2[2] - t2[0]);
    if (separated(n1) || separated(n2))
        return false;
    for (int i = 0; i < 3; ++i) {
        const Vec3 e1 = t1[(i + 1) % 3] - t1[i];
        const Vec3 e2 = t2[(i + 1) % 3] - t2[i];
        // in-plane edge normals cover coplanar and parallel-edge pairs
        if (separated(n1.cross(e1)) || separated(n1.cross(e2)) || separated(n2.cross(e1))
            || separated(n2.cross(e2)))
            return false;
        for (int j = 0; j < 3; ++j) {
            const Vec3 f2 = t2[(j + 1) % 3] - t2[j];
            if (separated(e1.cross(f2)))
                return false;
        }
    }
    return true;
}

} // namespace geom
} // namespace cbp
