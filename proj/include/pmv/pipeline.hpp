#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmv/analysis.hpp"
#include "pmv/formats.hpp"
#include "pmv/masking.hpp"
#include "pmv/pmg.hpp"
#include "pmv/serialize.hpp"
#include "pmv/source_images.hpp"

namespace pmv {

struct SourceConfig {
    // perlin | fractal | blobs | checker | radial | mixed | dir
    std::string kind = "mixed";
    std::string dir;
    int pool = 0;  // dir only: images in the shared pool, 0 = every decodable file
    bool operator==(const SourceConfig&) const = default;
};

enum class AugmentMode { none, mixup, videomix };

std::string_view to_string(AugmentMode mode);
AugmentMode parse_augment_mode(std::string_view name);

struct PipelineConfig {
    SourceConfig source;
    TransformSet transforms = TransformSet::defaults();
    ParamRanges ranges;
    int frames = 16;
    int size = 224;
    int clips = 1;
    AugmentMode augment = AugmentMode::mixup;
    double mix_alpha = 1.0;
    double mask_ratio = 0.75;
    int tubelet = 2;
    int patch = 16;
    std::uint64_t seed = 0;
    ClipDType dtype = ClipDType::u8;
    bool write_samples = false;
    bool normalize_targets = true;
    bool trackability = true;
    TrackParams track;

    // Execution settings; not part of the dataset snapshot.
    int workers = 0;  // 0 = OpenMP default
    std::filesystem::path out;

    PatchGrid grid() const { return make_patch_grid(frames, size, size, 3, tubelet, patch); }
};

void validate(const PipelineConfig& config);

// Everything that determines dataset bytes (no workers, no output path).
Json config_snapshot(const PipelineConfig& config);
// Keys absent from `j` keep the values of `base`. Accepts snapshot keys plus
// "workers" and "out".
PipelineConfig config_from_json(const Json& j, PipelineConfig base = {});
PipelineConfig load_config_file(const std::filesystem::path& file, PipelineConfig base = {});

// Images shared by every clip (directory sources only).
struct SourceContext {
    std::vector<std::string> names;
    std::vector<Image> images;
};
SourceContext make_source_context(const PipelineConfig& config);

struct GeneratedClip {
    Clip clip;  // float samples, before storage quantization
    TubeMask mask;
    std::uint64_t clip_seed = 0;
    Json recipe;
};

// Clip `index` of the dataset described by `config`.
GeneratedClip build_clip(const PipelineConfig& config, const SourceContext& ctx, std::size_t index);

// Rebuilds a clip and its mask from a manifest recipe alone.
GeneratedClip replay_recipe(const PipelineConfig& config, const SourceContext& ctx, const Json& recipe);

std::string clip_id(std::size_t index);
inline constexpr const char* kManifestFile = "manifest.jsonl";

struct Manifest {
    Json header;
    std::vector<Json> rows;
};

// Writes clip_<id>.pmv, clip_<id>.pmm (and .pms when enabled) plus
// manifest.jsonl into config.out. The directory is assembled next to the
// target and renamed into place only when every clip succeeded.
Manifest run_generate(const PipelineConfig& config);

Manifest read_manifest(const std::filesystem::path& dataset);
PipelineConfig manifest_config(const Manifest& manifest);
const Json& find_row(const Manifest& manifest, const std::string& id);

struct VerifyReport {
    std::size_t checked = 0;
    std::vector<std::string> mismatched;
};
// Replays the first `limit` manifest recipes and compares against the stored
// clip and mask files byte for byte.
VerifyReport verify_dataset(const std::filesystem::path& dataset, std::size_t limit);

std::vector<std::filesystem::path> run_export_frames(const std::filesystem::path& dataset, const std::string& id,
                                                     const std::filesystem::path& out_dir);

// Recomputes per-clip stats from the stored clips and writes the summary with
// the three frame-difference subsets to `out_file` (default
// <dataset>/analysis.json).
Json run_analyze(const std::filesystem::path& dataset, std::optional<std::filesystem::path> out_file = {});

// Builds masked-sample files from stored clips and masks. Returns the count.
std::size_t run_mask(const std::filesystem::path& dataset, std::optional<std::string> id, bool normalize,
                     std::optional<std::filesystem::path> out_dir = {});

// Header summary of a .pmv/.pmm/.pms file, or of a dataset directory (one row
// when `id` is given).
Json inspect_path(const std::filesystem::path& path, std::optional<std::string> id = {});

}  // namespace pmv
