// Writes the demo scene JSONs (two resting blocks, a corner drop, and a
// block on a frictional incline) into the given directory.

#include <cbp/meshgen.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

json mesh_json(const cbp::MeshInput<2>& m)
{
    json jm;
    jm["type"] = "tri";
    for (const auto& p : m.nodes)
        jm["nodes"].push_back({p.x(), p.y()});
    for (const auto& e : m.elements)
        jm["elements"].push_back(e);
    return jm;
}

json two_blocks()
{
    using namespace cbp::meshgen;
    auto left = block(0.0, 0.0, 1.0, 1.0, 4, 4);
    auto right = block(1.05, 0.0, 1.0, 1.0, 4, 4);
    json j;
    j["dim"] = 2;
    j["meshes"] = {mesh_json(left), mesh_json(right)};
    j["material"] = {{"E", 4e3}, {"nu", 0.2}, {"rho", 100.0}};
    j["gravity"] = {0.0, 0.0};
    j["dt"] = 0.01;
    j["dhat"] = 0.1; // larger than the 0.05 gap: adaptation shrinks it
    j["alpha"] = 0.1;
    j["kappa"] = 1e4;
    return j;
}

json corner_drop()
{
    using namespace cbp::meshgen;
    auto square = block(-0.5, -0.5, 1.0, 1.0, 8, 8);
    rotate(square, kPi / 4.0);
    translate(square, cbp::Vec2(0.0, 0.85));
    auto ground = block(-2.0, -0.3, 4.0, 0.3, 32, 2);
    json j;
    j["dim"] = 2;
    j["meshes"] = {mesh_json(square), mesh_json(ground)};
    j["meshes"][0]["velocity"] = {0.0, -1.0};
    j["material"] = {{"E", 1e5}, {"nu", 0.3}, {"rho", 500.0}};
    j["gravity"] = {0.0, -9.8};
    j["dt"] = 0.005;
    j["dhat"] = 0.05;
    j["alpha"] = 0.5;
    j["kappa"] = 1e4;
    json dir;
    dir["mesh"] = 1;
    dir["motion"] = "fixed";
    for (int i = 0; i < int(ground.nodes.size()); ++i)
        dir["nodes"].push_back(i);
    j["dirichlet"] = {dir};
    return j;
}

json incline()
{
    using namespace cbp::meshgen;
    const double theta = 0.25; // tilt realized through the gravity vector
    auto ramp = block(-1.0, -0.2, 3.0, 0.2, 24, 2);
    auto box = block(0.0, 0.005, 0.5, 0.5, 4, 4);
    json j;
    j["dim"] = 2;
    j["meshes"] = {mesh_json(ramp), mesh_json(box)};
    j["material"] = {{"E", 1e5}, {"nu", 0.3}, {"rho", 500.0}};
    j["gravity"] = {9.8 * std::sin(theta), -9.8 * std::cos(theta)};
    j["dt"] = 0.01;
    j["dhat"] = 0.01;
    j["alpha"] = 0.5;
    j["kappa"] = 1e4;
    j["mu"] = 1.2 * std::tan(theta);
    j["eps_v"] = 1e-3;
    json dir;
    dir["mesh"] = 0;
    dir["motion"] = "fixed";
    for (int i = 0; i < int(ramp.nodes.size()); ++i)
        dir["nodes"].push_back(i);
    j["dirichlet"] = {dir};
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    const std::string dir = argc > 1 ? argv[1] : "scenes";
    std::filesystem::create_directories(dir);
    const std::pair<std::string, json> scenes[] = {
        {"two_blocks_2d.json", two_blocks()},
        {"corner_drop_2d.json", corner_drop()},
        {"incline_2d.json", incline()},
    };
    for (const auto& [name, j] : scenes) {
        std::ofstream out(std::filesystem::path(dir) / name);
        out << j.dump(2) << "\n";
        std::cout << "wrote " << (std::filesystem::path(dir) / name).string() << "\n";
    }
    return 0;
}
