#pragma once

#include <cbp/assembly.hpp>
#include <cbp/potential.hpp>

namespace cbp {
namespace friction {

// Smoothed-Coulomb slip profile: quadratic ramp below the h*eps_v bound.
inline double f1(double y, double h, double eps_v)
{
    const double b = h * eps_v;
    if (y >= b)
        return 1.0;
    const double r = y / b;
    return r * (2.0 - r);
}

// Antiderivative of f1 with f0(0) = 0, C^1 at the bound.
inline double f0(double y, double h, double eps_v)
{
    const double b = h * eps_v;
    if (y >= b)
        return y - b / 3.0;
    const double r = y / b;
    return b * (r * r - r * r * r / 3.0);
}

// f0 evaluated on the squared slip, smooth through u = 0.
template <typename T>
T f0_sq(const T& s, double h, double eps_v)
{
    using std::sqrt;
    const double b = h * eps_v;
    if (value_of(s) >= b * b)
        return sqrt(s) - T(b / 3.0);
    if (value_of(s) == 0.0)
        return T(0.0);
    return s * (1.0 / b) - s * sqrt(s) * (1.0 / (3.0 * b * b));
}

} // namespace friction

/// One lagged friction constraint: the pair's barycentric footprint, normal
/// force magnitude and tangent basis frozen from the previous solve.
template <int N>
struct FrictionPair
{
    std::vector<int> nodes_a, nodes_b;
    Eigen::VectorXd wa, wb; // barycentric weights
    double lambda = 0.0;
    Eigen::Matrix<double, N, N == 2 ? 1 : 2> tangent;
    Vec<N> rel0 = Vec<N>::Zero(); // closest-point separation at lag time
};

template <int N>
Eigen::Matrix<double, N, N == 2 ? 1 : 2> tangent_basis(const Vec<N>& normal)
{
    Eigen::Matrix<double, N, N == 2 ? 1 : 2> t;
    if constexpr (N == 2) {
        t.col(0) = Vec2(-normal.y(), normal.x());
    } else {
        const Vec3 axis = std::abs(normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        t.col(0) = normal.cross(axis).normalized();
        t.col(1) = normal.cross(Vec3(t.col(0))).normalized();
    }
    return t;
}

// Builds the lagged constraints from the current state.
template <int N>
std::vector<FrictionPair<N>> lag_friction(const World<N>& w, const PotentialParams& par)
{
    std::vector<FrictionPair<N>> out;
    auto X = [&](int n) { return w.pos[n]; };
    for (const PairKey& key : collect_active(w, par)) {
        const auto val = pairs::eval_pair<double, N>(w, key, par, X);
        const double eps = pair_eps(w, key);
        const double db = kernels::barrier_derivative(val.d, kernels::BarrierSpec(eps, par.p));
        const double lambda = std::abs(par.kappa * val.weight * val.fac.gamma * db);
        if (lambda <= 0.0)
            continue;

        FrictionPair<N> fp;
        fp.lambda = lambda;
        pairs::nodes_of(w, key.type, false, key.a, fp.nodes_a);
        pairs::nodes_of(w, key.type, true, key.b, fp.nodes_b);

        // barycentric weights of the closest points
        auto bary_of = [&](const Vec<N>& cp, const std::vector<int>& nodes) {
            Eigen::VectorXd bw = Eigen::VectorXd::Zero(nodes.size());
            if (nodes.size() == 1) {
                bw[0] = 1.0;
            } else if (nodes.size() == 2) {
                const Vec<N> a = w.pos[nodes[0]], b = w.pos[nodes[1]];
                const double t =
                    std::clamp((cp - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
                bw[0] = 1.0 - t;
                bw[1] = t;
            } else {
                if constexpr (N == 3) {
                    const auto cls = geom::closest_point_triangle(
                        cp, w.pos[nodes[0]], w.pos[nodes[1]], w.pos[nodes[2]]);
                    bw = cls.bary_b;
                }
            }
            return bw;
        };
        Vec<N> cpa, cpb;
        for (int k = 0; k < N; ++k) {
            cpa[k] = value_of(val.cp_a[k]);
            cpb[k] = value_of(val.cp_b[k]);
        }
        fp.wa = bary_of(cpa, fp.nodes_a);
        fp.wb = bary_of(cpb, fp.nodes_b);
        fp.rel0 = cpb - cpa;
        fp.tangent = tangent_basis<N>(Vec<N>((cpb - cpa) / val.d));
        out.push_back(std::move(fp));
    }
    return out;
}

// Dissipative potential sum mu * lambda_k * f0(|u_k|) over lagged pairs.
template <int N>
double friction_energy(
    const World<N>& w, const std::vector<FrictionPair<N>>& lag, double mu, double eps_v, double h)
{
    if (mu <= 0.0 || lag.empty())
        return 0.0;
    double e = 0.0;
    for (const auto& fp : lag) {
        Vec<N> rel = -fp.rel0;
        for (size_t i = 0; i < fp.nodes_b.size(); ++i)
            rel += fp.wb[i] * w.pos[fp.nodes_b[i]];
        for (size_t i = 0; i < fp.nodes_a.size(); ++i)
            rel -= fp.wa[i] * w.pos[fp.nodes_a[i]];
        const auto u = fp.tangent.transpose() * rel;
        e += mu * fp.lambda * friction::f0_sq(u.squaredNorm(), h, eps_v);
    }
    return e;
}

template <int N>
void friction_derivatives(
    const World<N>& w, const std::vector<FrictionPair<N>>& lag, double mu, double eps_v,
    double h, Eigen::VectorXd* grad, std::vector<Eigen::Triplet<double>>* trips,
    bool project_psd)
{
    if (grad) {
        grad->resize(w.num_nodes() * N);
        grad->setZero();
    }
    if (mu <= 0.0)
        return;
    for (const auto& fp : lag) {
        std::vector<int> stencil = fp.nodes_a;
        stencil.insert(stencil.end(), fp.nodes_b.begin(), fp.nodes_b.end());
        std::sort(stencil.begin(), stencil.end());
        stencil.erase(std::unique(stencil.begin(), stencil.end()), stencil.end());

        auto f = [&](auto&& X) -> Dual2 {
            VecN<Dual2, N> rel;
            for (int k = 0; k < N; ++k)
                rel[k] = Dual2(-fp.rel0[k]);
            for (size_t i = 0; i < fp.nodes_b.size(); ++i)
                rel += fp.wb[i] * X(fp.nodes_b[i]);
            for (size_t i = 0; i < fp.nodes_a.size(); ++i)
                rel -= fp.wa[i] * X(fp.nodes_a[i]);
            Dual2 s(0.0);
            for (int c = 0; c < (N == 2 ? 1 : 2); ++c) {
                VecN<Dual2, N> tc;
                for (int k = 0; k < N; ++k)
                    tc[k] = Dual2(fp.tangent(k, c));
                const Dual2 uc = tc.dot(rel);
                s += uc * uc;
            }
            return Dual2(mu * fp.lambda) * friction::f0_sq(s, h, eps_v);
        };
        detail::scatter_term<N>(w, stencil, f, grad, trips, project_psd);
    }
}

} // namespace cbp
