// Batch driver: runs a scene to CSV/OBJ outputs or validates it.

#include <cbp/runner.hpp>

#include <CLI11.hpp>

#include <cstdlib>

int main(int argc, char** argv)
{
    CLI::App app{"contact barrier potential batch driver"};

    cbp::RunConfig cfg;
    app.add_option("--scene", cfg.scene_path, "scene JSON file")->required();
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--potential", cfg.potential, "potential selector")
        ->check(CLI::IsMember({"geometric", "ipc"}));
    app.add_option("--steps", cfg.steps, "number of implicit Euler steps");
    app.add_flag("--dump-terms", cfg.dump_terms, "write per-step contact term CSVs");
    app.add_flag("--validate-only", cfg.validate_only, "validate the scene and exit");

    CLI11_PARSE(app, argc, argv);

    if (const char* t = std::getenv("THREADS"))
        cbp::set_max_threads(std::max(1, std::atoi(t)));

    return cbp::run(cfg);
}
