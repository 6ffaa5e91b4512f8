#pragma once

#include <cbp/dynamics.hpp>
#include <cbp/io.hpp>
#include <cbp/scene.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace cbp {

struct RunConfig
{
    std::string scene_path;
    std::string out_dir = ".";
    std::string potential = "geometric"; // geometric | ipc
    int steps = 0;
    bool dump_terms = false;
    bool validate_only = false;
    std::ostream* log = &std::cout;
};

struct ValidationReport
{
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<int> eps_histogram; // 10 bins over [0, eps_trg]
    std::string text;
};

namespace runner_detail {

inline std::string frame_name(int k)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.obj", k);
    return buf;
}

inline std::string terms_name(int k)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "terms_%06d.csv", k);
    return buf;
}

template <int N>
void dump_terms_csv(const World<N>& w, const PotentialParams& par, const std::string& path)
{
    io::CsvWriter csv(
        path,
        {"type", "a", "b", "d", "eps", "weight", "g_m_xy", "g_m_yx", "g_e_xy", "g_e_yx", "M",
         "gamma", "barrier", "energy"});
    for (const auto& t : collect_terms(w, par)) {
        csv.write_row(
            {pair_type_name(t.pair.type), std::to_string(t.pair.a), std::to_string(t.pair.b),
             io::fmt(t.d), io::fmt(t.eps), io::fmt(t.weight), io::fmt(t.fac.g_m_xy),
             io::fmt(t.fac.g_m_yx), io::fmt(t.fac.g_e_xy), io::fmt(t.fac.g_e_yx),
             io::fmt(t.fac.M), io::fmt(t.fac.gamma), io::fmt(t.barrier), io::fmt(t.energy)});
    }
}

template <int N>
int run_scene(Scene<N> scene, const RunConfig& cfg)
{
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const PotentialKind kind =
        cfg.potential == "ipc" ? PotentialKind::IpcBaseline : PotentialKind::Geometric;
    Simulator<N> sim(std::move(scene), kind);

    io::CsvWriter summary(
        (fs::path(cfg.out_dir) / "summary.csv").string(),
        {"step", "time", "iterations", "total", "elastic", "contact", "friction", "min_dist",
         "max_contact_grad"});

    SolverOptions opt;
    auto write_row = [&](int stepk, const StepStats& st) {
        const double total = st.elastic + st.contact + st.friction;
        summary.write_row(
            {std::to_string(stepk), io::fmt(sim.time()), std::to_string(st.newton_iterations),
             io::fmt(total), io::fmt(st.elastic), io::fmt(st.contact), io::fmt(st.friction),
             io::fmt(st.min_distance), io::fmt(st.max_contact_grad)});
    };

    // step-0 row: energies of the initial state
    {
        StepStats st;
        ElasticModel<N> model(sim.world(), sim.scene().material);
        st.elastic = model.energy(sim.world());
        st.contact = sim.contact_potential();
        Eigen::VectorXd cg;
        if (kind == PotentialKind::Geometric)
            contact_derivatives(sim.world(), sim.scene().params, &cg, nullptr, false);
        else
            ipc_derivatives(
                sim.world(), sim.scene().params.eps_trg, sim.scene().params.kappa, &cg, nullptr,
                false);
        st.max_contact_grad = cg.size() ? cg.lpNorm<Eigen::Infinity>() : 0.0;
        const double r = std::max(max_eps(sim.world()), 1e-9) * 2.0;
        for (const PairKey& key : proximity::candidates(sim.world(), r))
            st.min_distance =
                std::min(st.min_distance, proximity::pair_distance(sim.world(), sim.world().pos, key));
        write_row(0, st);
    }
    io::write_obj(sim.world(), (fs::path(cfg.out_dir) / frame_name(0)).string());
    if (cfg.dump_terms && kind == PotentialKind::Geometric)
        dump_terms_csv(sim.world(), sim.scene().params, (fs::path(cfg.out_dir) / terms_name(0)).string());

    for (int k = 1; k <= cfg.steps; ++k) {
        try {
            sim.step(opt);
        } catch (const SolverError& e) {
            (*cfg.log) << "solver failure at step " << k << ": " << e.what() << "\n";
            return 1;
        }
        write_row(k, sim.last_stats());
        io::write_obj(sim.world(), (fs::path(cfg.out_dir) / frame_name(k)).string());
        if (cfg.dump_terms && kind == PotentialKind::Geometric)
            dump_terms_csv(
                sim.world(), sim.scene().params, (fs::path(cfg.out_dir) / terms_name(k)).string());
    }
    return 0;
}

template <int N>
ValidationReport validate_scene(Scene<N> scene)
{
    ValidationReport rep;
    auto fail = [&](const std::string& what) {
        rep.ok = false;
        rep.failures.push_back(what);
    };

    World<N>& w = scene.world;
    // adjacency consistency
    if constexpr (N == 3) {
        for (size_t e = 0; e < w.bedges.size(); ++e)
            for (int f : w.edge_faces3d[e]) {
                int hits = 0;
                for (int k = 0; k < 3; ++k)
                    for (int j = 0; j < 2; ++j)
                        if (w.bfaces[f][k] == w.bedges[e][j])
                            hits++;
                if (hits != 2)
                    fail("edge/face adjacency inconsistent");
            }
    }

    std::vector<Vec<N>> cur = w.pos;
    w.pos = w.rest;
    const auto offenders = intersecting_pairs(w);
    for (size_t k = 0; k < offenders.size() && k < 8; ++k)
        fail(
            "rest configuration self-intersects: " + std::string(N == 2 ? "edges " : "faces ")
            + std::to_string(offenders[k][0]) + "/" + std::to_string(offenders[k][1]));
    w.pos = cur;

    try {
        adapt_epsilon(w, scene.params);
    } catch (const std::exception& e) {
        fail(std::string("adapt_epsilon: ") + e.what());
    }

    rep.eps_histogram.assign(10, 0);
    for (double e : w.eps_vert) {
        int bin = std::min(9, int(10.0 * e / scene.params.eps_trg));
        rep.eps_histogram[std::max(0, bin)]++;
    }

    std::ostringstream os;
    os << (rep.ok ? "OK" : "FAILED") << "\n";
    for (const auto& f : rep.failures)
        os << "  failure: " << f << "\n";
    os << "  eps/eps_trg histogram (10 bins):";
    for (int c : rep.eps_histogram)
        os << " " << c;
    os << "\n";
    rep.text = os.str();
    return rep;
}

} // namespace runner_detail

inline ValidationReport validate(const std::string& scene_path)
{
    ValidationReport rep;
    SceneVariant sv;
    try {
        sv = load_scene(scene_path);
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.failures.push_back(e.what());
        rep.text = std::string("FAILED\n  failure: ") + e.what() + "\n";
        return rep;
    }
    return std::visit(
        [&](auto&& scene) { return runner_detail::validate_scene(std::move(scene)); },
        std::move(sv));
}

inline int run(const RunConfig& cfg)
{
    check(cfg.steps >= 0, "run: steps must be nonnegative");
    check(
        cfg.potential == "geometric" || cfg.potential == "ipc",
        "run: potential must be 'geometric' or 'ipc'");

    if (cfg.validate_only) {
        const auto rep = validate(cfg.scene_path);
        (*cfg.log) << rep.text;
        return rep.ok ? 0 : 2;
    }

    SceneVariant sv;
    try {
        sv = load_scene(cfg.scene_path);
    } catch (const std::exception& e) {
        (*cfg.log) << "invalid scene: " << e.what() << "\n";
        return 2;
    }
    try {
        return std::visit(
            [&](auto&& scene) { return runner_detail::run_scene(std::move(scene), cfg); },
            std::move(sv));
    } catch (const std::exception& e) {
        (*cfg.log) << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace cbp
