#pragma once

#include <cbp/geometry.hpp>
#include <cbp/mesh.hpp>
#include <cbp/pairs.hpp>

#include <set>
#include <unordered_map>
#include <vector>

namespace cbp {

template <int N>
struct AABB
{
    Vec<N> lo = Vec<N>::Constant(std::numeric_limits<double>::max());
    Vec<N> hi = Vec<N>::Constant(std::numeric_limits<double>::lowest());

    void absorb(const Vec<N>& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void inflate(double r)
    {
        lo.array() -= r;
        hi.array() += r;
    }
    bool overlaps(const AABB& o) const
    {
        return (lo.array() <= o.hi.array()).all() && (o.lo.array() <= hi.array()).all();
    }
};

namespace proximity {

// Uniform spatial hash over inflated primitive boxes. Returns a superset of
// all non-adjacent pairs within distance r of each other; pairs sharing a
// mesh vertex are excluded.
template <int N>
class HashGrid
{
public:
    HashGrid(double cell) : cell_(cell) {}

    void insert(const AABB<N>& box, int id)
    {
        visit_cells(box, [&](int64_t key) { cells_[key].push_back(id); });
    }

    template <class F>
    void query(const AABB<N>& box, F&& f) const
    {
        visit_cells(box, [&](int64_t key) {
            auto it = cells_.find(key);
            if (it == cells_.end())
                return;
            for (int id : it->second)
                f(id);
        });
    }

private:
    template <class F>
    void visit_cells(const AABB<N>& box, F&& f) const
    {
        Eigen::Array<int64_t, N, 1> lo, hi;
        for (int k = 0; k < N; ++k) {
            lo[k] = int64_t(std::floor(box.lo[k] / cell_));
            hi[k] = int64_t(std::floor(box.hi[k] / cell_));
        }
        if constexpr (N == 2) {
            for (int64_t i = lo[0]; i <= hi[0]; ++i)
                for (int64_t j = lo[1]; j <= hi[1]; ++j)
                    f(hash(i, j, 0));
        } else {
            for (int64_t i = lo[0]; i <= hi[0]; ++i)
                for (int64_t j = lo[1]; j <= hi[1]; ++j)
                    for (int64_t k = lo[2]; k <= hi[2]; ++k)
                        f(hash(i, j, k));
        }
    }

    static int64_t hash(int64_t i, int64_t j, int64_t k)
    {
        return i * 73856093 ^ j * 19349663 ^ k * 83492791;
    }

    double cell_;
    mutable std::unordered_map<int64_t, std::vector<int>> cells_;
};

// kind: 0 vertex, 1 edge, 2 face
template <int N>
AABB<N> primitive_box(const World<N>& w, const std::vector<Vec<N>>& pos, int kind, int idx)
{
    AABB<N> b;
    if (kind == 0) {
        b.absorb(pos[w.bverts[idx]]);
    } else if (kind == 1) {
        b.absorb(pos[w.bedges[idx][0]]);
        b.absorb(pos[w.bedges[idx][1]]);
    } else {
        for (int k = 0; k < 3; ++k)
            b.absorb(pos[w.bfaces[idx][k]]);
    }
    return b;
}

// Candidate pairs within distance r at `pos`, optionally unioned with a
// second set of positions (swept boxes for CCD).
template <int N>
std::vector<PairKey> candidates(
    const World<N>& w, double r, const std::vector<Vec<N>>* sweep_to = nullptr)
{
    check(r > 0.0, "broad_phase: radius must be positive");

    auto box_of = [&](int kind, int idx) {
        AABB<N> b = primitive_box<N>(w, w.pos, kind, idx);
        if (sweep_to) {
            const AABB<N> b2 = primitive_box<N>(w, *sweep_to, kind, idx);
            b.absorb(b2.lo);
            b.absorb(b2.hi);
        }
        b.inflate(0.5 * r + 1e-12);
        return b;
    };

    const int nv = int(w.bverts.size());
    const int ne = int(w.bedges.size());
    const int nf = int(w.bfaces.size());

    std::vector<AABB<N>> vbox(nv), ebox(ne), fbox(nf);
    double max_extent = 1e-12;
    for (int i = 0; i < nv; ++i)
        vbox[i] = box_of(0, i);
    for (int i = 0; i < ne; ++i) {
        ebox[i] = box_of(1, i);
        max_extent = std::max(max_extent, (ebox[i].hi - ebox[i].lo).maxCoeff());
    }
    for (int i = 0; i < nf; ++i) {
        fbox[i] = box_of(2, i);
        max_extent = std::max(max_extent, (fbox[i].hi - fbox[i].lo).maxCoeff());
    }

    HashGrid<N> vgrid(max_extent), egrid(max_extent), fgrid(max_extent);
    for (int i = 0; i < nv; ++i)
        vgrid.insert(vbox[i], i);
    for (int i = 0; i < ne; ++i)
        egrid.insert(ebox[i], i);
    for (int i = 0; i < nf; ++i)
        fgrid.insert(fbox[i], i);

    std::set<PairKey> found;
    auto consider = [&](PairType type, int a, int b) {
        if ((type == PairType::VV || type == PairType::EE) && a > b)
            std::swap(a, b);
        if ((type == PairType::VV || type == PairType::EE) && a == b)
            return;
        const PairKey key{type, a, b};
        if (found.count(key))
            return;
        if (pairs::shares_vertex(w, key))
            return;
        found.insert(key);
    };

    for (int i = 0; i < nv; ++i) {
        vgrid.query(vbox[i], [&](int j) {
            if (j > i && vbox[i].overlaps(vbox[j]))
                consider(PairType::VV, i, j);
        });
        egrid.query(vbox[i], [&](int j) {
            if (vbox[i].overlaps(ebox[j]))
                consider(PairType::EV, i, j);
        });
        if constexpr (N == 3)
            fgrid.query(vbox[i], [&](int j) {
                if (vbox[i].overlaps(fbox[j]))
                    consider(PairType::VF, i, j);
            });
    }
    if constexpr (N == 3)
        for (int i = 0; i < ne; ++i)
            egrid.query(ebox[i], [&](int j) {
                if (j > i && ebox[i].overlaps(ebox[j]))
                    consider(PairType::EE, i, j);
            });

    return {found.begin(), found.end()};
}

// Distance of a pair at given positions (double level).
template <int N>
double pair_distance(const World<N>& w, const std::vector<Vec<N>>& pos, const PairKey& key)
{
    switch (key.type) {
    case PairType::VV:
        return (pos[w.bverts[key.a]] - pos[w.bverts[key.b]]).norm();
    case PairType::EV:
        return geom::closest_point_edge<N>(
                   pos[w.bverts[key.a]], pos[w.bedges[key.b][0]], pos[w.bedges[key.b][1]])
            .d;
    case PairType::VF:
        if constexpr (N == 3)
            return geom::closest_point_triangle(
                       pos[w.bverts[key.a]], pos[w.bfaces[key.b][0]], pos[w.bfaces[key.b][1]],
                       pos[w.bfaces[key.b][2]])
                .d;
        return 0.0;
    case PairType::EE:
    default:
        return geom::closest_edge_edge<N>(
                   pos[w.bedges[key.a][0]], pos[w.bedges[key.a][1]], pos[w.bedges[key.b][0]],
                   pos[w.bedges[key.b][1]])
            .d;
    }
}

} // namespace proximity

template <int N>
std::vector<PairKey> broad_phase(const World<N>& w, double r)
{
    return proximity::candidates(w, r);
}

struct CcdOptions
{
    double min_separation = 0.2; // keeps d >= (1 - s) d0 per pair
    double gap_tolerance = 1e-12;
    int max_iterations = 1024;
};

// Largest t in (0, 1] such that the linear trajectory pos -> x1 keeps every
// candidate pair at distance >= (1-s) d0. Conservative by construction.
template <int N>
double ccd_max_step(const World<N>& w, const std::vector<Vec<N>>& x1, CcdOptions opt = {})
{
    check(x1.size() == w.pos.size(), "ccd: position size mismatch");

    double max_disp = 0.0;
    for (size_t i = 0; i < x1.size(); ++i)
        max_disp = std::max(max_disp, (x1[i] - w.pos[i]).norm());
    if (max_disp == 0.0)
        return 1.0;

    const auto cands = proximity::candidates<N>(w, 1e-9 + 1e-6 * max_disp, &x1);

    std::vector<Vec<N>> xt(w.pos.size());
    auto lerp = [&](double t) {
        for (size_t i = 0; i < w.pos.size(); ++i)
            xt[i] = (1.0 - t) * w.pos[i] + t * x1[i];
    };

    double t_min = 1.0;
    for (const PairKey& key : cands) {
        const double d0 = proximity::pair_distance(w, w.pos, key);
        check(d0 > 0.0, "ccd: start state already intersecting");
        const double floor = (1.0 - opt.min_separation) * d0;

        double vel = 0.0; // Lipschitz bound on the pair distance rate
        std::vector<int> na, nb;
        pairs::nodes_of(w, key.type, false, key.a, na);
        pairs::nodes_of(w, key.type, true, key.b, nb);
        double va = 0.0, vb = 0.0;
        for (int n : na)
            va = std::max(va, (x1[n] - w.pos[n]).norm());
        for (int n : nb)
            vb = std::max(vb, (x1[n] - w.pos[n]).norm());
        vel = va + vb;
        if (vel <= 0.0 || d0 - vel >= floor)
            continue;

        double t = 0.0, d = d0;
        for (int it = 0; it < opt.max_iterations; ++it) {
            const double gap = d - floor;
            if (gap <= opt.gap_tolerance * std::max(1.0, d0))
                break;
            if ((t_min - t) * vel <= gap) {
                t = t_min;
                break;
            }
            t += gap / vel;
            lerp(t);
            d = proximity::pair_distance(w, xt, key);
        }
        t_min = std::min(t_min, t);
        if (t_min <= 0.0)
            return 0.0;
    }
    return t_min;
}

// Exact intersection test over non-adjacent boundary element pairs: edge
// pairs in 2D, face pairs in 3D. `first_only` stops at the first offender.
template <int N>
std::vector<std::array<int, 2>> intersecting_pairs(const World<N>& w, bool first_only = false)
{
    std::vector<std::array<int, 2>> out;
    if constexpr (N == 2) {
        const int ne = int(w.bedges.size());
        for (int i = 0; i < ne; ++i)
            for (int j = i + 1; j < ne; ++j) {
                const auto &a = w.bedges[i], &b = w.bedges[j];
                if (a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1])
                    continue;
                if (geom::segments_intersect(w.pos[a[0]], w.pos[a[1]], w.pos[b[0]], w.pos[b[1]])) {
                    out.push_back({i, j});
                    if (first_only)
                        return out;
                }
            }
    } else {
        const int nf = int(w.bfaces.size());
        for (int i = 0; i < nf; ++i)
            for (int j = i + 1; j < nf; ++j) {
                const auto &a = w.bfaces[i], &b = w.bfaces[j];
                bool adjacent = false;
                for (int s = 0; s < 3 && !adjacent; ++s)
                    for (int t = 0; t < 3; ++t)
                        if (a[s] == b[t]) {
                            adjacent = true;
                            break;
                        }
                if (adjacent)
                    continue;
                if (geom::triangles_intersect(
                        {w.pos[a[0]], w.pos[a[1]], w.pos[a[2]]},
                        {w.pos[b[0]], w.pos[b[1]], w.pos[b[2]]})) {
                    out.push_back({i, j});
                    if (first_only)
                        return out;
                }
            }
    }
    return out;
}

template <int N>
bool intersects(const World<N>& w)
{
    return !intersecting_pairs(w, /*first_only=*/true).empty();
}

} // namespace cbp
