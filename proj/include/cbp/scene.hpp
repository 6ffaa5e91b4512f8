#pragma once

#include <cbp/elasticity.hpp>
#include <cbp/mesh.hpp>
#include <cbp/params.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

namespace cbp {

template <int N>
struct DirichletSet
{
    std::vector<int> nodes; // global node indices
    bool fixed = true;
    Vec<N> velocity = Vec<N>::Zero();
};

template <int N>
struct Scene
{
    World<N> world;
    Material material;
    Vec<N> gravity = Vec<N>::Zero();
    double dt = 0.01;
    PotentialParams params;
    double mu_friction = 0.0;
    double eps_v = 1e-3;
    std::vector<DirichletSet<N>> dirichlet;
    std::vector<Vec<N>> velocity0; // optional per-node initial velocity
};

using SceneVariant = std::variant<Scene<2>, Scene<3>>;

namespace io {

// Minimal OBJ surface loader (v / f lines, triangles).
inline MeshInput<3> load_obj(const std::string& path)
{
    std::ifstream in(path);
    check(bool(in), "load_obj: cannot open " + path);
    MeshInput<3> m;
    m.type = ElemType::Shell;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 p;
            ss >> p.x() >> p.y() >> p.z();
            m.nodes.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok)
                idx.push_back(std::stoi(tok.substr(0, tok.find('/'))) - 1);
            check(idx.size() == 3, "load_obj: only triangle faces supported");
            m.elements.push_back(idx);
        }
    }
    return m;
}

} // namespace io

namespace detail {

template <int N>
Scene<N> scene_from_json(const nlohmann::json& j, const std::string& base_dir)
{
    Scene<N> s;
    for (const auto& jm : j.at("meshes")) {
        MeshInput<N> m;
        const std::string type = jm.value("type", "tri");
        if (type == "tri")
            m.type = ElemType::Tri;
        else if (type == "tet")
            m.type = ElemType::Tet;
        else if (type == "shell")
            m.type = ElemType::Shell;
        else
            throw ContractError("scene: unknown mesh type " + type);

        if (jm.contains("file")) {
            if constexpr (N == 3) {
                check(m.type == ElemType::Shell, "scene: file references are OBJ shells");
                const auto obj = io::load_obj(
                    (std::filesystem::path(base_dir) / jm.at("file").get<std::string>()).string());
                m.nodes = obj.nodes;
                m.elements = obj.elements;
            } else {
                throw ContractError("scene: mesh file references require dim 3");
            }
        } else {
            for (const auto& jn : jm.at("nodes")) {
                check(int(jn.size()) == N, "scene: node dimension mismatch");
                Vec<N> p;
                for (int k = 0; k < N; ++k)
                    p[k] = jn[k].get<double>();
                m.nodes.push_back(p);
            }
            for (const auto& je : jm.at("elements"))
                m.elements.push_back(je.get<std::vector<int>>());
        }

        const int base = s.world.num_nodes();
        append_mesh(s.world, m);

        if (jm.contains("velocity")) {
            if (s.velocity0.empty())
                s.velocity0.assign(base, Vec<N>::Zero());
            Vec<N> v;
            for (int k = 0; k < N; ++k)
                v[k] = jm.at("velocity")[k].get<double>();
            s.velocity0.resize(s.world.num_nodes(), v);
        } else if (!s.velocity0.empty()) {
            s.velocity0.resize(s.world.num_nodes(), Vec<N>::Zero());
        }
    }
    finalize_world(s.world);

    const auto& jmat = j.at("material");
    s.material.E = jmat.at("E").get<double>();
    s.material.nu = jmat.at("nu").get<double>();
    s.material.rho = jmat.at("rho").get<double>();
    check(s.material.E > 0 && s.material.rho > 0, "scene: bad material");
    check(s.material.nu >= 0 && s.material.nu < 0.5, "scene: Poisson ratio out of range");

    if (j.contains("gravity")) {
        check(int(j.at("gravity").size()) == N, "scene: gravity dimension mismatch");
        for (int k = 0; k < N; ++k)
            s.gravity[k] = j.at("gravity")[k].get<double>();
    }

    s.dt = j.at("dt").get<double>();
    check(s.dt > 0, "scene: dt must be positive");
    s.params.eps_trg = j.at("dhat").get<double>();
    s.params.alpha = j.value("alpha", 0.5);
    s.params.beta = j.value("beta", 0.1);
    s.params.c = j.value("c", 0.01);
    s.params.kappa = j.value("kappa", 1e4);
    s.params.p = j.value("p", N - 1);
    s.params.validate();
    s.mu_friction = j.value("mu", 0.0);
    check(s.mu_friction >= 0.0, "scene: mu must be nonnegative");
    s.eps_v = j.value("eps_v", 1e-3);

    if (j.contains("dirichlet")) {
        for (const auto& jd : j.at("dirichlet")) {
            DirichletSet<N> set;
            const int mesh = jd.value("mesh", -1);
            const int offset = mesh >= 0 ? s.world.meshes.at(mesh).nodes_begin : 0;
            for (const auto& n : jd.at("nodes")) {
                const int id = n.get<int>() + offset;
                check(id >= 0 && id < s.world.num_nodes(), "scene: dirichlet node out of range");
                set.nodes.push_back(id);
            }
            const std::string motion = jd.value("motion", "fixed");
            if (motion == "fixed") {
                set.fixed = true;
            } else if (motion == "linear") {
                set.fixed = false;
                for (int k = 0; k < N; ++k)
                    set.velocity[k] = jd.at("velocity")[k].get<double>();
            } else {
                throw ContractError("scene: unknown dirichlet motion " + motion);
            }
            s.dirichlet.push_back(std::move(set));
        }
    }
    return s;
}

} // namespace detail

inline SceneVariant load_scene_json(const nlohmann::json& j, const std::string& base_dir = ".")
{
    const int dim = j.at("dim").get<int>();
    check(dim == 2 || dim == 3, "scene: dim must be 2 or 3");
    if (dim == 2)
        return detail::scene_from_json<2>(j, base_dir);
    return detail::scene_from_json<3>(j, base_dir);
}

inline SceneVariant load_scene(const std::string& path)
{
    std::ifstream in(path);
    check(bool(in), "load_scene: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("load_scene: parse error: ") + e.what());
    }
    try {
        return load_scene_json(j, std::filesystem::path(path).parent_path().string());
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("load_scene: schema error: ") + e.what());
    }
}

} // namespace cbp
