#include "data_dir.hpp"

#include <fstream>
#include <sstream>

#include "sei/dataset.hpp"
#include "sei/error.hpp"
#include "sei/image_io.hpp"
#include "sei/serialization.hpp"

namespace sei::cli {

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

LoadedSplit load_split(const fs::path& dir, bool need_references) {
    const auto mdir = dir / kMeasurementDir;
    if (!fs::is_directory(mdir)) {
        throw ValidationError(dir.string() + " has no '" + kMeasurementDir + "' directory");
    }
    LoadedSplit out;
    if (fs::exists(dir / kManifestName)) {
        const auto manifest = read_json_file(dir / kManifestName);
        if (manifest.contains("model")) out.model = forward_model_from_json(manifest.at("model"));
    }
    const auto rdir = dir / kReferenceDir;
    for (const auto& path : list_images(mdir)) {
        out.ids.push_back(path.stem().string());
        out.measurements.push_back(load_image(path));
        if (!need_references) continue;
        const auto ref = rdir / path.filename();
        if (!fs::exists(ref)) {
            throw ValidationError("missing reference image " + ref.string() + " for measurement " +
                                  path.filename().string());
        }
        out.references.push_back(load_image(ref));
    }
    if (out.measurements.empty()) throw ValidationError(mdir.string() + " contains no images");
    return out;
}

}  // namespace sei::cli
