#pragma once

#include <cbp/mesh.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <vector>

namespace cbp {
namespace meshgen {

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

// Tensor-product triangulation with an optional cell filter; unreferenced
// nodes are compacted away.
inline MeshInput<2> grid(
    const std::vector<double>& xs, const std::vector<double>& ys,
    const std::function<bool(int, int)>& keep = nullptr)
{
    const int nx = int(xs.size()), ny = int(ys.size());
    MeshInput<2> m;
    m.type = ElemType::Tri;
    std::vector<Vec2> nodes(nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            nodes[j * nx + i] = Vec2(xs[i], ys[j]);

    auto id = [&](int i, int j) { return j * nx + i; };
    std::vector<std::vector<int>> elems;
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            if (keep && !keep(i, j))
                continue;
            elems.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            elems.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }

    std::vector<int> remap(nodes.size(), -1);
    for (const auto& e : elems)
        for (int n : e)
            remap[n] = 1;
    int count = 0;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (remap[i] > 0) {
            remap[i] = count++;
            m.nodes.push_back(nodes[i]);
        }
    for (auto e : elems) {
        for (int& n : e)
            n = remap[n];
        m.elements.push_back(e);
    }
    return m;
}

inline MeshInput<2> block(double x0, double y0, double w, double h, int nx, int ny)
{
    return grid(linspace(x0, x0 + w, nx + 1), linspace(y0, y0 + h, ny + 1));
}

// Rectangle with a thin horizontal slit cut in from the right side.
inline MeshInput<2> slit_block(
    double w, double h, int nx, int ny, double slit_y, double slit_width, double slit_from_x)
{
    std::vector<double> ys;
    for (double y : linspace(0.0, h, ny + 1)) {
        if (y < slit_y - 1e-12 || y > slit_y + 1e-12)
            ys.push_back(y);
    }
    ys.push_back(slit_y);
    ys.push_back(slit_y + slit_width);
    std::sort(ys.begin(), ys.end());
    const auto xs = linspace(0.0, w, nx + 1);
    int slit_j = -1;
    for (size_t j = 0; j + 1 < ys.size(); ++j)
        if (std::abs(ys[j] - slit_y) < 1e-12 && std::abs(ys[j + 1] - (slit_y + slit_width)) < 1e-12)
            slit_j = int(j);
    check(slit_j >= 0, "slit_block: slit row not found");
    return grid(xs, ys, [&](int i, int j) {
        return !(j == slit_j && xs[i] >= slit_from_x - 1e-12);
    });
}

inline MeshInput<2> annulus(double r_in, double r_out, int nseg, int nlayer)
{
    MeshInput<2> m;
    m.type = ElemType::Tri;
    for (int k = 0; k <= nlayer; ++k) {
        const double r = r_in + (r_out - r_in) * double(k) / double(nlayer);
        for (int s = 0; s < nseg; ++s) {
            const double t = 2.0 * kPi * double(s) / double(nseg);
            m.nodes.push_back(Vec2(r * std::cos(t), r * std::sin(t)));
        }
    }
    auto id = [&](int k, int s) { return k * nseg + (s % nseg); };
    for (int k = 0; k < nlayer; ++k)
        for (int s = 0; s < nseg; ++s) {
            m.elements.push_back({id(k, s), id(k + 1, s + 1), id(k, s + 1)});
            m.elements.push_back({id(k, s), id(k + 1, s), id(k + 1, s + 1)});
        }
    return m;
}

inline void translate(MeshInput<2>& m, const Vec2& t)
{
    for (auto& p : m.nodes)
        p += t;
}
inline void translate(MeshInput<3>& m, const Vec3& t)
{
    for (auto& p : m.nodes)
        p += t;
}

inline void rotate(MeshInput<2>& m, double angle, const Vec2& center = Vec2::Zero())
{
    Eigen::Rotation2Dd R(angle);
    for (auto& p : m.nodes)
        p = R * (p - center) + center;
}

inline MeshInput<3> single_tet()
{
    MeshInput<3> m;
    m.type = ElemType::Tet;
    m.nodes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    m.elements = {{0, 1, 2, 3}};
    return m;
}

// Axis-aligned box of tetrahedra (six per cell).
inline MeshInput<3> box_tets(
    const Vec3& origin, const Vec3& size, int nx, int ny, int nz)
{
    MeshInput<3> m;
    m.type = ElemType::Tet;
    auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                m.nodes.push_back(
                    origin
                    + Vec3(size.x() * i / nx, size.y() * j / ny, size.z() * k / nz));

    const int corner_bits[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                   {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    const int tets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                            {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int c[8];
                for (int b = 0; b < 8; ++b)
                    c[b] = id(i + corner_bits[b][0], j + corner_bits[b][1], k + corner_bits[b][2]);
                for (const auto& t : tets) {
                    std::vector<int> e = {c[t[0]], c[t[1]], c[t[2]], c[t[3]]};
                    const Vec3 a = m.nodes[e[0]];
                    if ((m.nodes[e[1]] - a).cross(m.nodes[e[2]] - a).dot(m.nodes[e[3]] - a) < 0)
                        std::swap(e[1], e[2]);
                    m.elements.push_back(e);
                }
            }
    return m;
}

} // namespace meshgen
} // namespace cbp
