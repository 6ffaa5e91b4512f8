#pragma once

#include <cbp/assembly.hpp>
#include <cbp/autodiff.hpp>
#include <cbp/pairs.hpp>
#include <cbp/proximity.hpp>

#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace cbp {

struct ContactTerm
{
    PairKey pair;
    double d = 0, eps = 0, weight = 0, barrier = 0, energy = 0;
    DirectionalFactor fac;
};

template <int N>
double pair_eps(const World<N>& w, const PairKey& key)
{
    auto eps_of = [&](bool second, int idx) {
        const bool is_vert = (key.type == PairType::VV)
            || (!second && (key.type == PairType::EV || key.type == PairType::VF));
        if (is_vert)
            return w.eps_vert[idx];
        if (key.type == PairType::VF && second)
            return w.eps_face[idx];
        return w.eps_edge[idx];
    };
    return std::min(eps_of(false, key.a), eps_of(true, key.b));
}

// ---------------------------------------------------------------------------
// adaptive localization
// ---------------------------------------------------------------------------

// Shrinks per-primitive radii so that no pair with a nonzero directional
// factor is active in the rest configuration; edges then take the minimum
// over their endpoint vertices and faces over their edges.
template <int N>
void adapt_epsilon(World<N>& w, const PotentialParams& par)
{
    par.validate();
    World<N> rest = w;
    rest.pos = rest.rest;

    std::fill(w.eps_vert.begin(), w.eps_vert.end(), par.eps_trg);
    std::fill(w.eps_edge.begin(), w.eps_edge.end(), par.eps_trg);
    std::fill(w.eps_face.begin(), w.eps_face.end(), par.eps_trg);

    const auto cands = proximity::candidates<N>(rest, par.eps_trg);
    auto X = [&](int n) { return rest.pos[n]; };
    for (const PairKey& key : cands) {
        const double d = proximity::pair_distance(rest, rest.pos, key);
        check(d > 0.0, "adapt_epsilon: rest state in contact");
        if (d >= par.eps_trg)
            continue;
        const auto val = pairs::eval_pair<double, N>(rest, key, par, X);
        if (val.gamma_dir <= 0.0)
            continue;
        for (int n : pairs::pair_nodes(rest, key)) {
            const int bv = w.node_to_bvert[n];
            check(bv >= 0, "adapt_epsilon: boundary bookkeeping");
            w.eps_vert[bv] = std::min(w.eps_vert[bv], 0.5 * d);
        }
    }

    for (size_t e = 0; e < w.bedges.size(); ++e)
        w.eps_edge[e] = std::min(
            w.eps_vert[w.node_to_bvert[w.bedges[e][0]]],
            w.eps_vert[w.node_to_bvert[w.bedges[e][1]]]);
    if constexpr (N == 3) {
        // faces take the minimum over their edges, which here equals the
        // minimum over their corner vertices
        for (size_t f = 0; f < w.bfaces.size(); ++f) {
            double m = par.eps_trg;
            for (int k = 0; k < 3; ++k)
                m = std::min(m, w.eps_vert[w.node_to_bvert[w.bfaces[f][k]]]);
            w.eps_face[f] = m;
        }
    }
}

template <int N>
double max_eps(const World<N>& w)
{
    double m = 0.0;
    for (double e : w.eps_vert)
        m = std::max(m, e);
    for (double e : w.eps_edge)
        m = std::max(m, e);
    for (double e : w.eps_face)
        m = std::max(m, e);
    return m;
}

// ---------------------------------------------------------------------------
// term collection and energy
// ---------------------------------------------------------------------------

// Active pairs: within the pair's localization radius and with a nonzero
// directional product. Terms whose gamma vanishes only through the
// closest-point mollifier are kept (they still carry a gradient).
template <int N>
std::vector<PairKey> collect_active(const World<N>& w, const PotentialParams& par)
{
    std::vector<PairKey> act;
    const double r = max_eps(w);
    if (r <= 0.0)
        return act;
    auto X = [&](int n) { return w.pos[n]; };
    for (const PairKey& key : proximity::candidates<N>(w, r)) {
        const double d = proximity::pair_distance(w, w.pos, key);
        check(d > 0.0, "collect_terms: zero distance (CCD failure upstream)");
        if (d >= pair_eps(w, key))
            continue;
        if (pairs::eval_pair<double, N>(w, key, par, X).gamma_dir <= 0.0)
            continue;
        act.push_back(key);
    }
    return act;
}

template <int N>
std::vector<ContactTerm> collect_terms(const World<N>& w, const PotentialParams& par)
{
    std::vector<ContactTerm> terms;
    auto X = [&](int n) { return w.pos[n]; };
    for (const PairKey& key : collect_active(w, par)) {
        const auto val = pairs::eval_pair<double, N>(w, key, par, X);
        ContactTerm t;
        t.pair = key;
        t.d = val.d;
        t.eps = pair_eps(w, key);
        t.weight = val.weight;
        t.fac = val.fac;
        t.barrier = kernels::barrier(val.d, kernels::BarrierSpec(t.eps, par.p));
        t.energy = par.kappa * t.weight * val.fac.gamma * t.barrier;
        terms.push_back(t);
    }
    return terms;
}

template <int N>
double contact_energy(const World<N>& w, const PotentialParams& par)
{
    double e = 0.0;
    for (const auto& t : collect_terms(w, par))
        e += t.energy;
    return e;
}

// ---------------------------------------------------------------------------
// derivatives
// ---------------------------------------------------------------------------

// Gradient and optional (optionally PSD-projected) Hessian of the contact
// potential with respect to all vertex coordinates. Term evaluation runs on
// up to max_threads() workers; the reduction order is fixed.
template <int N>
void contact_derivatives(
    const World<N>& w, const PotentialParams& par, Eigen::VectorXd* grad,
    std::vector<Eigen::Triplet<double>>* trips, bool project_psd)
{
    if (grad) {
        grad->resize(w.num_nodes() * N);
        grad->setZero();
    }
    const std::vector<PairKey> active = collect_active(w, par);
    std::vector<std::vector<int>> stencils(active.size());
    std::vector<detail::TermDerivs> derivs(active.size());
    parallel_for(int(active.size()), [&](int i) {
        const PairKey& key = active[i];
        const kernels::BarrierSpec spec(pair_eps(w, key), par.p);
        auto f = [&](auto&& X) -> Dual2 {
            const auto val = pairs::eval_pair<Dual2, N>(w, key, par, X);
            return Dual2(par.kappa) * val.weight * val.gamma * kernels::barrier(val.d, spec);
        };
        stencils[i] = pairs::pair_stencil(w, key);
        derivs[i] = detail::eval_term<N>(w, stencils[i], f, trips != nullptr, project_psd);
    });
    for (size_t i = 0; i < active.size(); ++i)
        detail::scatter_derivs<N>(stencils[i], derivs[i], grad, trips);
}

// Magnitude of the normal force carried by each term: the derivative of the
// term energy with respect to the pair distance, holding weight and gamma.
template <int N>
std::vector<double> contact_force_magnitudes(
    const World<N>& w, const PotentialParams& par, const std::vector<ContactTerm>& terms)
{
    std::vector<double> lambdas;
    lambdas.reserve(terms.size());
    for (const auto& t : terms) {
        const double db = kernels::barrier_derivative(t.d, kernels::BarrierSpec(t.eps, par.p));
        lambdas.push_back(std::abs(par.kappa * t.weight * t.fac.gamma * db));
    }
    return lambdas;
}

// ---------------------------------------------------------------------------
// log-barrier baseline (comparison runs only)
// ---------------------------------------------------------------------------

template <int N>
std::vector<PairKey> ipc_pairs(const World<N>& w, double dhat)
{
    std::vector<PairKey> keys;
    for (const PairKey& key : proximity::candidates<N>(w, dhat)) {
        if constexpr (N == 2) {
            if (key.type != PairType::EV)
                continue;
        } else {
            if (key.type != PairType::VF && key.type != PairType::EE)
                continue;
        }
        if (proximity::pair_distance(w, w.pos, key) >= dhat)
            continue;
        keys.push_back(key);
    }
    return keys;
}

template <int N>
double ipc_energy(const World<N>& w, double dhat, double kappa)
{
    double e = 0.0;
    for (const PairKey& key : ipc_pairs(w, dhat))
        e += kappa * kernels::ipc_barrier(proximity::pair_distance(w, w.pos, key), dhat);
    return e;
}

template <int N>
void ipc_derivatives(
    const World<N>& w, double dhat, double kappa, Eigen::VectorXd* grad,
    std::vector<Eigen::Triplet<double>>* trips, bool project_psd)
{
    if (grad) {
        grad->resize(w.num_nodes() * N);
        grad->setZero();
    }
    for (const PairKey& key : ipc_pairs(w, dhat)) {
        auto f = [&](auto&& X) -> Dual2 {
            Dual2 d;
            if (key.type == PairType::EV) {
                d = geom::point_edge_distance<Dual2, N>(
                    X(w.bverts[key.a]), X(w.bedges[key.b][0]), X(w.bedges[key.b][1]));
            } else if constexpr (N == 3) {
                if (key.type == PairType::VF)
                    d = geom::point_triangle_distance<Dual2>(
                        X(w.bverts[key.a]), X(w.bfaces[key.b][0]), X(w.bfaces[key.b][1]),
                        X(w.bfaces[key.b][2]));
                else
                    d = geom::edge_edge_distance<Dual2, N>(
                        X(w.bedges[key.a][0]), X(w.bedges[key.a][1]), X(w.bedges[key.b][0]),
                        X(w.bedges[key.b][1]));
            }
            return Dual2(kappa) * kernels::ipc_barrier(d, dhat);
        };
        detail::scatter_term<N>(w, pairs::pair_nodes(w, key), f, grad, trips, project_psd);
    }
}

} // namespace cbp
