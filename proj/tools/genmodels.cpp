// Regenerates the shipped model files. Run from the repository root:
//   ./build/tools/genmodels models
#include "shipped_models.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    const std::filesystem::path outdir = (argc > 1) ? argv[1] : "models";
    std::filesystem::create_directories(outdir);
    for (const auto& [name, model] : qmf::shipped::all()) {
        const auto path = outdir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << path << "\n";
            return 1;
        }
        out << qmf::serialize_model_file(model);
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}
