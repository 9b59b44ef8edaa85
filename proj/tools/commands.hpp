#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace emrefine::cli {

namespace fs = std::filesystem;

/// Parses "auto:<count>" (equal-interval selection) or a comma-separated list
/// of slice indices.
std::vector<int> parse_gt_indices(const std::string& spec, int depth);

std::vector<int> run_select(int depth, int count);

struct RefineOptions {
    fs::path coarse;
    /// Either a full-depth stack or one slice per ground-truth index.
    fs::path gt;
    std::string gt_indices;
    int erosion_n = 3;
    std::size_t tc = 64;
    std::optional<int> max_gap;
    fs::path out;
    /// Defaults to "<out>.manifest.json".
    std::optional<fs::path> manifest;
};

/// Runs the refinement, writes the stack and its manifest, returns the manifest.
nlohmann::json run_refine(const RefineOptions& opts);

struct AugmentOptions {
    fs::path images;
    fs::path masks;
    fs::path out;
    int count = 1;
    std::uint64_t seed = 0;
    double sigma_p_min = 0.01;
    double sigma_p_max = 0.05;
    int grid = 2;
    bool flip_rotate = true;
    bool piecewise = true;
    bool elastic = false;
    double alpha = 40.0;
    double sigma_e = 5.0;
    /// Empty means every slice; otherwise the same syntax as --gt-indices.
    std::string slices;
};

/// Writes `count` augmented (image, mask) PNG pairs per selected slice named
/// {slice}_{k}_image.png / {slice}_{k}_mask.png plus manifest.json.
nlohmann::json run_augment(const AugmentOptions& opts);

struct PrepareOptions {
    fs::path coarse;
    fs::path refined;
    /// Index spec, or a JSON file holding a "gt_indices" array (e.g. a refine manifest).
    std::string atlas;
    int window_n = 15;
    fs::path out;
};

nlohmann::json run_prepare(const PrepareOptions& opts);

struct EvaluateOptions {
    fs::path pred;
    fs::path gt;
    std::optional<fs::path> overlay_dir;
};

/// Volume (micro-averaged) and per-slice metrics.
nlohmann::json run_evaluate(const EvaluateOptions& opts);

/// Re-executes the run recorded in a refine or augment manifest, optionally
/// redirecting its output.
nlohmann::json run_replay(const fs::path& manifest, const std::optional<fs::path>& out);

/// Process exit code for an error category name.
int exit_code_for(const std::string& category);

}  // namespace emrefine::cli
