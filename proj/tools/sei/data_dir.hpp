#pragma once

// On-disk layout shared by the commands:
//   <dir>/manifest.json
//   <dir>/measurements/<id>.png
//   <dir>/references/<id>.png      (optional)

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sei/operators.hpp"
#include "sei/tensor.hpp"

namespace sei::cli {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kMeasurementDir = "measurements";
inline constexpr const char* kReferenceDir = "references";

struct LoadedSplit {
    std::vector<std::string> ids;
    std::vector<Tensor<double>> measurements;
    std::vector<Tensor<double>> references;  // empty unless requested
    std::optional<ForwardModel> model;       // from the manifest, if present
};

/// Reads every measurement of `dir`. With `need_references`, each one must
/// have a reference of the same file name or a ValidationError is thrown.
LoadedSplit load_split(const fs::path& dir, bool need_references);

nlohmann::json read_json_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace sei::cli
