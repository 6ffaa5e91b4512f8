#pragma once

#include <cbp/elasticity.hpp>
#include <cbp/friction.hpp>
#include <cbp/potential.hpp>
#include <cbp/scene.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <optional>

namespace cbp {

enum class PotentialKind { Geometric, IpcBaseline };

struct SolverOptions
{
    int max_newton = 200;
    int max_halvings = 64;
    double newton_tol = 1e-5;     // x bbox diagonal (per second in dynamics)
    double entry_grad_tol = 1e-12; // x force scale: converged-at-entry threshold
    bool project_psd = true;
    bool validate_iterates = false; // run the exact intersection test per accept
    CcdOptions ccd;
};

struct StepStats
{
    int newton_iterations = 0;
    double min_distance = std::numeric_limits<double>::infinity();
    double elastic = 0, contact = 0, friction = 0;
    double max_contact_grad = 0;
    std::vector<double> iterate_energies; // line-search-accepted objective values
    int intersection_checks_failed = 0;
};

struct SolverError : std::runtime_error
{
    explicit SolverError(const std::string& m) : std::runtime_error(m) {}
};

template <int N>
class Simulator
{
public:
    Simulator(Scene<N> scene, PotentialKind kind = PotentialKind::Geometric, bool adapt = true)
        : scene_(std::move(scene)), kind_(kind)
    {
        scene_.params.validate();
        if (kind_ == PotentialKind::IpcBaseline)
            check(scene_.mu_friction == 0.0, "baseline potential: friction not supported");
        if (adapt && kind_ == PotentialKind::Geometric)
            adapt_epsilon(scene_.world, scene_.params);
        if (kind_ == PotentialKind::IpcBaseline) {
            std::fill(scene_.world.eps_vert.begin(), scene_.world.eps_vert.end(), scene_.params.eps_trg);
            std::fill(scene_.world.eps_edge.begin(), scene_.world.eps_edge.end(), scene_.params.eps_trg);
            std::fill(scene_.world.eps_face.begin(), scene_.world.eps_face.end(), scene_.params.eps_trg);
        }
        model_ = ElasticModel<N>(scene_.world, scene_.material);
        mass_ = model_.lumped_mass(scene_.world, scene_.material);
        x_init_ = scene_.world.pos;
        velocity_ = scene_.velocity0;
        if (velocity_.empty())
            velocity_.assign(scene_.world.num_nodes(), Vec<N>::Zero());

        free_.assign(scene_.world.num_nodes(), true);
        for (const auto& set : scene_.dirichlet)
            for (int n : set.nodes)
                free_[n] = false;
        bbox_diag_ = scene_.world.bbox_diagonal();
    }

    Scene<N>& scene() { return scene_; }
    const Scene<N>& scene() const { return scene_; }
    World<N>& world() { return scene_.world; }
    const World<N>& world() const { return scene_.world; }
    double time() const { return time_; }
    const std::vector<Vec<N>>& velocity() const { return velocity_; }
    std::vector<Vec<N>>& velocity() { return velocity_; }
    const StepStats& last_stats() const { return stats_; }
    const std::vector<FrictionPair<N>>& friction_lag() const { return lag_; }

    double contact_potential() const
    {
        return kind_ == PotentialKind::Geometric
            ? contact_energy(scene_.world, scene_.params)
            : ipc_energy(scene_.world, scene_.params.eps_trg, scene_.params.kappa);
    }

    // One implicit-Euler step of size scene.dt.
    void step(const SolverOptions& opt = {})
    {
        World<N>& w = scene_.world;
        const double h = scene_.dt;
        const std::vector<Vec<N>> x_prev = w.pos;

        apply_dirichlet(time_ + h);
        std::vector<Vec<N>> xhat = w.pos;
        for (int i = 0; i < w.num_nodes(); ++i)
            if (free_[i])
                xhat[i] = x_prev[i] + h * velocity_[i] + h * h * scene_.gravity;

        minimize(opt, &xhat, h);

        for (int i = 0; i < w.num_nodes(); ++i)
            velocity_[i] = (w.pos[i] - x_prev[i]) / h;
        time_ += h;
        update_friction_lag();
        finish_stats();
    }

    // Gravity + elasticity + contact equilibrium at the current boundary
    // targets; inertia removed.
    void static_solve(const SolverOptions& opt = {})
    {
        apply_dirichlet(time_);
        minimize(opt, nullptr, scene_.dt);
        update_friction_lag();
        finish_stats();
    }

private:
    void apply_dirichlet(double t)
    {
        for (const auto& set : scene_.dirichlet)
            for (int n : set.nodes)
                scene_.world.pos[n] =
                    set.fixed ? x_init_[n] : Vec<N>(x_init_[n] + t * set.velocity);
    }

    double objective(const std::vector<Vec<N>>* xhat, double h) const
    {
        const World<N>& w = scene_.world;
        double e = model_.energy(w);
        if (!std::isfinite(e))
            return e;
        e += kind_ == PotentialKind::Geometric
            ? contact_energy(w, scene_.params)
            : ipc_energy(w, scene_.params.eps_trg, scene_.params.kappa);
        e += friction_energy(w, lag_, scene_.mu_friction, scene_.eps_v, h);
        if (xhat) {
            for (int i = 0; i < w.num_nodes(); ++i)
                if (free_[i])
                    e += 0.5 * mass_[i] / (h * h) * (w.pos[i] - (*xhat)[i]).squaredNorm();
        } else {
            for (int i = 0; i < w.num_nodes(); ++i)
                if (free_[i])
                    e -= mass_[i] * scene_.gravity.dot(w.pos[i]);
        }
        return e;
    }

    void assemble(
        const std::vector<Vec<N>>* xhat, double h, Eigen::VectorXd& grad,
        std::vector<Eigen::Triplet<double>>& trips, bool psd) const
    {
        const World<N>& w = scene_.world;
        const int dof = w.num_nodes() * N;
        grad.resize(dof);
        grad.setZero();
        trips.clear();

        model_.derivatives(w, &grad, &trips, psd);
        Eigen::VectorXd cg(dof);
        std::vector<Eigen::Triplet<double>> ct;
        if (kind_ == PotentialKind::Geometric)
            contact_derivatives(w, scene_.params, &cg, &ct, psd);
        else
            ipc_derivatives(w, scene_.params.eps_trg, scene_.params.kappa, &cg, &ct, psd);
        grad += cg;
        trips.insert(trips.end(), ct.begin(), ct.end());

        Eigen::VectorXd fg = Eigen::VectorXd::Zero(dof);
        std::vector<Eigen::Triplet<double>> ft;
        friction_derivatives(w, lag_, scene_.mu_friction, scene_.eps_v, h, &fg, &ft, psd);
        grad += fg;
        trips.insert(trips.end(), ft.begin(), ft.end());

        if (xhat) {
            for (int i = 0; i < w.num_nodes(); ++i)
                if (free_[i]) {
                    const double mi = mass_[i] / (h * h);
                    for (int k = 0; k < N; ++k) {
                        grad[i * N + k] += mi * (w.pos[i][k] - (*xhat)[i][k]);
                        trips.emplace_back(i * N + k, i * N + k, mi);
                    }
                }
        } else {
            for (int i = 0; i < w.num_nodes(); ++i)
                if (free_[i])
                    for (int k = 0; k < N; ++k)
                        grad[i * N + k] -= mass_[i] * scene_.gravity[k];
        }
    }

    void minimize(const SolverOptions& opt, const std::vector<Vec<N>>* xhat, double h)
    {
        World<N>& w = scene_.world;
        stats_ = StepStats();
        const int nn = w.num_nodes();

        std::vector<int> free_dofs;
        for (int i = 0; i < nn; ++i)
            if (free_[i])
                for (int k = 0; k < N; ++k)
                    free_dofs.push_back(i * N + k);
        const int nf = int(free_dofs.size());
        if (nf == 0)
            return;
        std::vector<int> dof_to_free(nn * N, -1);
        for (int i = 0; i < nf; ++i)
            dof_to_free[free_dofs[i]] = i;

        const double force_scale =
            std::max(1.0, scene_.material.E) * std::pow(std::max(bbox_diag_, 1e-12), N - 1);
        const double tol_dx = opt.newton_tol * bbox_diag_ * (xhat ? h : 1.0);

        double e_cur = objective(xhat, h);
        check(std::isfinite(e_cur), "solver: non-finite energy at start of solve");
        stats_.iterate_energies.push_back(e_cur);

        Eigen::VectorXd grad;
        std::vector<Eigen::Triplet<double>> trips;

        for (int it = 0; it < opt.max_newton; ++it) {
            assemble(xhat, h, grad, trips, opt.project_psd);

            double gmax = 0.0;
            for (int d : free_dofs)
                gmax = std::max(gmax, std::abs(grad[d]));
            if (gmax <= opt.entry_grad_tol * force_scale)
                break;

            // reduced system
            Eigen::VectorXd gf(nf);
            for (int i = 0; i < nf; ++i)
                gf[i] = grad[free_dofs[i]];
            std::vector<Eigen::Triplet<double>> rt;
            rt.reserve(trips.size());
            for (const auto& t : trips) {
                const int r = dof_to_free[t.row()], c = dof_to_free[t.col()];
                if (r >= 0 && c >= 0)
                    rt.emplace_back(r, c, t.value());
            }
            Eigen::SparseMatrix<double> H(nf, nf);
            H.setFromTriplets(rt.begin(), rt.end());

            Eigen::VectorXd dx;
            double reg = 0.0;
            for (int attempt = 0; attempt < 8; ++attempt) {
                Eigen::SparseMatrix<double> Hr = H;
                if (reg > 0.0) {
                    Eigen::SparseMatrix<double> I(nf, nf);
                    I.setIdentity();
                    Hr = H + reg * I;
                }
                Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Hr);
                if (solver.info() == Eigen::Success) {
                    dx = solver.solve(-gf);
                    if (dx.allFinite() && gf.dot(dx) < 0.0)
                        break;
                }
                double hmax = 1.0;
                for (int i = 0; i < nf; ++i)
                    hmax = std::max(hmax, std::abs(H.coeff(i, i)));
                reg = reg == 0.0 ? 1e-8 * hmax : reg * 10.0;
                dx = -gf; // steepest-descent fallback if all attempts fail
            }

            const double dec = dx.lpNorm<Eigen::Infinity>();
            if (dec <= tol_dx)
                break;

            // CCD-capped backtracking line search
            std::vector<Vec<N>> x0 = w.pos, x1 = w.pos;
            for (int i = 0; i < nf; ++i)
                x1[free_dofs[i] / N][free_dofs[i] % N] += dx[i];
            double alpha = ccd_max_step(w, x1, opt.ccd);

            bool accepted = false;
            for (int halve = 0; halve < opt.max_halvings; ++halve) {
                for (int i = 0; i < nf; ++i) {
                    const int d = free_dofs[i];
                    w.pos[d / N][d % N] = x0[d / N][d % N] + alpha * dx[i];
                }
                const double e_try = objective(xhat, h);
                if (std::isfinite(e_try) && e_try < e_cur) {
                    e_cur = e_try;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                w.pos = x0;
                throw SolverError(
                    "solver: line search failed after " + std::to_string(opt.max_halvings)
                    + " halvings (|grad|=" + std::to_string(gmax)
                    + ", decrement=" + std::to_string(dec) + ", iter=" + std::to_string(it) + ")");
            }
            if (opt.validate_iterates && intersects(w))
                stats_.intersection_checks_failed++;
            stats_.iterate_energies.push_back(e_cur);
            stats_.newton_iterations++;
        }
    }

    void update_friction_lag()
    {
        if (scene_.mu_friction > 0.0 && kind_ == PotentialKind::Geometric)
            lag_ = lag_friction(scene_.world, scene_.params);
        else
            lag_.clear();
    }

    void finish_stats()
    {
        const World<N>& w = scene_.world;
        stats_.elastic = model_.energy(w);
        stats_.contact = contact_potential();
        stats_.friction = friction_energy(w, lag_, scene_.mu_friction, scene_.eps_v, scene_.dt);

        Eigen::VectorXd cg;
        if (kind_ == PotentialKind::Geometric)
            contact_derivatives(w, scene_.params, &cg, nullptr, false);
        else
            ipc_derivatives(w, scene_.params.eps_trg, scene_.params.kappa, &cg, nullptr, false);
        stats_.max_contact_grad = cg.size() ? cg.lpNorm<Eigen::Infinity>() : 0.0;

        const double r = std::max(max_eps(w), 1e-9 * std::max(bbox_diag_, 1.0)) * 2.0;
        double dmin = std::numeric_limits<double>::infinity();
        for (const PairKey& key : proximity::candidates(w, r))
            dmin = std::min(dmin, proximity::pair_distance(w, w.pos, key));
        stats_.min_distance = dmin;
    }

    Scene<N> scene_;
    PotentialKind kind_;
    ElasticModel<N> model_;
    std::vector<double> mass_;
    std::vector<Vec<N>> x_init_;
    std::vector<Vec<N>> velocity_;
    std::vector<bool> free_;
    std::vector<FrictionPair<N>> lag_;
    double time_ = 0.0;
    double bbox_diag_ = 1.0;
    StepStats stats_;
};

} // namespace cbp
