#pragma once

#include <cbp/assembly.hpp>
#include <cbp/autodiff.hpp>
#include <cbp/mesh.hpp>

#include <Eigen/Sparse>

namespace cbp {

struct Material
{
    double E = 1e4; // Young's modulus, Pa
    double nu = 0.2;
    double rho = 100.0; // kg/m^3

    double mu() const { return E / (2.0 * (1.0 + nu)); }
    double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
};

// Compressible Neo-Hookean on 2D triangles / 3D tets (plane strain in 2D):
//   psi(F) = mu/2 (tr(F^T F) - n) - mu log J + lambda/2 log^2 J
// The log term drives the energy to infinity on element inversion.
template <int N>
class ElasticModel
{
public:
    ElasticModel() = default;

    ElasticModel(const World<N>& w, const Material& mat) : mu_(mat.mu()), lambda_(mat.lambda())
    {
        for (const auto& blk : w.meshes) {
            if (blk.type == ElemType::Shell)
                continue; // handled separately (3D membranes)
            for (const auto& e : blk.elems) {
                Element el;
                for (int k = 0; k <= N; ++k)
                    el.nodes[k] = e[k];
                Eigen::Matrix<double, N, N> Dm;
                for (int k = 0; k < N; ++k)
                    Dm.col(k) = w.rest[e[k + 1]] - w.rest[e[0]];
                const double det = Dm.determinant();
                check(det > 0.0, "elasticity: inverted or degenerate rest element");
                el.Bm = Dm.inverse();
                el.volume = det / (N == 2 ? 2.0 : 6.0);
                elems_.push_back(el);
            }
        }
        if constexpr (N == 3) {
            for (const auto& blk : w.meshes) {
                if (blk.type != ElemType::Shell)
                    continue;
                for (const auto& e : blk.elems) {
                    ShellElement el;
                    el.nodes = {e[0], e[1], e[2]};
                    const Vec3 d1 = w.rest[e[1]] - w.rest[e[0]];
                    const Vec3 d2 = w.rest[e[2]] - w.rest[e[0]];
                    // local orthonormal rest frame
                    const Vec3 u = d1.normalized();
                    const Vec3 n = d1.cross(d2);
                    check(n.norm() > 0.0, "elasticity: degenerate shell element");
                    const Vec3 v = n.normalized().cross(u);
                    Eigen::Matrix2d Dm;
                    Dm << d1.dot(u), d2.dot(u), d1.dot(v), d2.dot(v);
                    el.Bm = Dm.inverse();
                    el.area = 0.5 * n.norm();
                    shells_.push_back(el);
                }
            }
        }
    }

    double energy(const World<N>& w) const
    {
        double e = 0.0;
        for (const auto& el : elems_) {
            const double psi = density(w, el);
            if (!std::isfinite(psi))
                return std::numeric_limits<double>::infinity();
            e += el.volume * psi;
        }
        if constexpr (N == 3)
            for (const auto& el : shells_) {
                const double psi = shell_density_d(w, el);
                if (!std::isfinite(psi))
                    return std::numeric_limits<double>::infinity();
                e += el.area * psi;
            }
        return e;
    }

    void derivatives(
        const World<N>& w, Eigen::VectorXd* grad,
        std::vector<Eigen::Triplet<double>>* trips, bool project_psd) const
    {
        if (grad && grad->size() != w.num_nodes() * N) {
            grad->resize(w.num_nodes() * N);
            grad->setZero();
        }
        constexpr int ND = N * (N + 1);
        for (const auto& el : elems_) {
            Eigen::Matrix<double, N, N> F = deformation(w, el);
            const double J = F.determinant();
            check(J > 0.0, "elasticity: inverted element at derivative evaluation");
            const Eigen::Matrix<double, N, N> Finv = F.inverse();
            const Eigen::Matrix<double, N, N> FinvT = Finv.transpose();
            const double logJ = std::log(J);

            const Eigen::Matrix<double, N, N> P =
                mu_ * F + (lambda_ * logJ - mu_) * FinvT;

            // dE/dx through F = Ds Bm
            const Eigen::Matrix<double, N, N> G = el.volume * P * el.Bm.transpose();
            if (grad) {
                Vec<N> g0 = Vec<N>::Zero();
                for (int k = 0; k < N; ++k) {
                    for (int r = 0; r < N; ++r)
                        (*grad)[el.nodes[k + 1] * N + r] += G(r, k);
                    g0 -= G.col(k);
                }
                for (int r = 0; r < N; ++r)
                    (*grad)[el.nodes[0] * N + r] += g0[r];
            }

            if (!trips)
                continue;

            // dP : (i,j) x (k,l) tensor, contracted to node coordinates
            Eigen::Matrix<double, N * N, N * N> A;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    for (int k = 0; k < N; ++k)
                        for (int l = 0; l < N; ++l) {
                            double v = 0.0;
                            if (i == k && j == l)
                                v += mu_;
                            v += (mu_ - lambda_ * logJ) * FinvT(i, l) * FinvT(k, j);
                            v += lambda_ * FinvT(i, j) * FinvT(k, l);
                            A(i + N * j, k + N * l) = v;
                        }

            // map node displacements to vec(dF)
            Eigen::Matrix<double, N * N, ND> M = Eigen::Matrix<double, N * N, ND>::Zero();
            for (int c = 0; c < N; ++c)     // column of Ds (node c+1 minus node 0)
                for (int r = 0; r < N; ++r) // row
                    for (int j = 0; j < N; ++j) {
                        const double bm = el.Bm(c, j);
                        M(r + N * j, (c + 1) * N + r) += bm;
                        M(r + N * j, 0 * N + r) -= bm;
                    }

            Eigen::Matrix<double, ND, ND> K = el.volume * M.transpose() * A * M;
            if (project_psd) {
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, ND, ND>> eig(
                    0.5 * (K + K.transpose()));
                K = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal()
                    * eig.eigenvectors().transpose();
            }
            for (int a = 0; a <= N; ++a)
                for (int r = 0; r < N; ++r)
                    for (int b = 0; b <= N; ++b)
                        for (int s = 0; s < N; ++s)
                            trips->emplace_back(
                                el.nodes[a] * N + r, el.nodes[b] * N + s,
                                K(a * N + r, b * N + s));
        }

        if constexpr (N == 3) {
            for (const auto& el : shells_) {
                auto f = [&](auto&& X) -> Dual2 {
                    return Dual2(el.area) * shell_density<Dual2>(X(el.nodes[0]), X(el.nodes[1]), X(el.nodes[2]), el);
                };
                std::vector<int> stencil(el.nodes.begin(), el.nodes.end());
                std::sort(stencil.begin(), stencil.end());
                detail::scatter_term<3>(w, stencil, f, grad, trips, project_psd);
            }
        }
    }

    // Lumped nodal masses.
    std::vector<double> lumped_mass(const World<N>& w, const Material& mat) const
    {
        std::vector<double> m(w.num_nodes(), 0.0);
        for (const auto& el : elems_)
            for (int k = 0; k <= N; ++k)
                m[el.nodes[k]] += mat.rho * el.volume / double(N + 1);
        if constexpr (N == 3)
            for (const auto& el : shells_)
                for (int n : el.nodes)
                    m[n] += mat.rho * el.area / 3.0;
        return m;
    }

private:
    struct Element
    {
        std::array<int, N + 1> nodes;
        Eigen::Matrix<double, N, N> Bm;
        double volume = 0.0;
    };
    struct ShellElement
    {
        std::array<int, 3> nodes;
        Eigen::Matrix2d Bm;
        double area = 0.0;
    };

    Eigen::Matrix<double, N, N> deformation(const World<N>& w, const Element& el) const
    {
        Eigen::Matrix<double, N, N> Ds;
        for (int k = 0; k < N; ++k)
            Ds.col(k) = w.pos[el.nodes[k + 1]] - w.pos[el.nodes[0]];
        return Ds * el.Bm;
    }

    double density(const World<N>& w, const Element& el) const
    {
        const Eigen::Matrix<double, N, N> F = deformation(w, el);
        const double J = F.determinant();
        if (J <= 0.0)
            return std::numeric_limits<double>::infinity();
        const double logJ = std::log(J);
        return 0.5 * mu_ * (F.squaredNorm() - N) - mu_ * logJ + 0.5 * lambda_ * logJ * logJ;
    }

    template <typename T>
    T shell_density(
        const VecN<T, 3>& x0, const VecN<T, 3>& x1, const VecN<T, 3>& x2,
        const ShellElement& el) const
    {
        using std::log;
        using std::sqrt;
        Eigen::Matrix<T, 3, 2> Ds;
        Ds.col(0) = x1 - x0;
        Ds.col(1) = x2 - x0;
        Eigen::Matrix<T, 3, 2> F = Ds * el.Bm.template cast<T>();
        Eigen::Matrix<T, 2, 2> C = F.transpose() * F;
        const T detC = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0);
        if (value_of(detC) <= 0.0)
            return T(std::numeric_limits<double>::infinity());
        const T logJ = T(0.5) * log(detC);
        return T(0.5 * mu_) * (C(0, 0) + C(1, 1) - T(2.0)) - T(mu_) * logJ
            + T(0.5 * lambda_) * logJ * logJ;
    }

    double shell_density_d(const World<3>& w, const ShellElement& el) const
    {
        VecN<double, 3> a = w.pos[el.nodes[0]], b = w.pos[el.nodes[1]], c = w.pos[el.nodes[2]];
        return shell_density<double>(a, b, c, el);
    }

    double mu_ = 0.0, lambda_ = 0.0;
    std::vector<Element> elems_;
    std::vector<ShellElement> shells_;
};

} // namespace cbp
