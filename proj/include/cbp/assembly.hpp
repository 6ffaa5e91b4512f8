#pragma once

#include <cbp/autodiff.hpp>
#include <cbp/mesh.hpp>

#include <Eigen/Sparse>

#include <unordered_map>
#include <vector>

namespace cbp {
namespace detail {

// Local derivatives of one additive energy term over its stencil.
struct TermDerivs
{
    bool constant = true;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
};

// Evaluates f with second-order duals seeded over the stencil; f receives a
// position accessor node id -> VecN<Dual2, N>.
template <int N, class TermFn>
TermDerivs eval_term(
    const World<N>& w, const std::vector<int>& stencil, TermFn&& f, bool want_hessian,
    bool project_psd)
{
    const int n = int(stencil.size()) * N;
    std::vector<VecN<Dual2, N>> xs(stencil.size());
    for (size_t i = 0; i < stencil.size(); ++i)
        for (int k = 0; k < N; ++k)
            xs[i][k] = Dual2::variable(w.pos[stencil[i]][k], int(i) * N + k, n);

    std::unordered_map<int, int> local;
    local.reserve(stencil.size());
    for (size_t i = 0; i < stencil.size(); ++i)
        local[stencil[i]] = int(i);
    auto X = [&](int node) -> const VecN<Dual2, N>& { return xs[local.at(node)]; };

    const Dual2 e = f(X);
    TermDerivs out;
    if (e.constant())
        return out;
    out.constant = false;
    out.g = e.g;
    if (want_hessian) {
        out.h = e.h;
        if (project_psd) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (out.h + out.h.transpose()));
            out.h = eig.eigenvectors()
                * eig.eigenvalues().cwiseMax(0.0).asDiagonal()
                * eig.eigenvectors().transpose();
        }
    }
    return out;
}

template <int N>
void scatter_derivs(
    const std::vector<int>& stencil, const TermDerivs& d, Eigen::VectorXd* grad,
    std::vector<Eigen::Triplet<double>>* trips)
{
    if (d.constant)
        return;
    if (grad)
        for (size_t i = 0; i < stencil.size(); ++i)
            for (int k = 0; k < N; ++k)
                (*grad)[stencil[i] * N + k] += d.g[int(i) * N + k];
    if (trips && d.h.size())
        for (size_t i = 0; i < stencil.size(); ++i)
            for (int k = 0; k < N; ++k)
                for (size_t j = 0; j < stencil.size(); ++j)
                    for (int l = 0; l < N; ++l)
                        trips->emplace_back(
                            stencil[i] * N + k, stencil[j] * N + l,
                            d.h(int(i) * N + k, int(j) * N + l));
}

template <int N, class TermFn>
void scatter_term(
    const World<N>& w, const std::vector<int>& stencil, TermFn&& f,
    Eigen::VectorXd* grad, std::vector<Eigen::Triplet<double>>* trips, bool project_psd)
{
    scatter_derivs<N>(
        stencil, eval_term<N>(w, stencil, f, trips != nullptr, project_psd), grad, trips);
}

} // namespace detail
} // namespace cbp
