#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmv/error.hpp"
#include "pmv/pipeline.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct GenerateFlags {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> clips, frames, size, workers, tubelet, patch, pool, radius;
    std::optional<double> mix_alpha, mask_ratio, tau;
    std::optional<std::string> transforms, augment, out, source, source_dir, dtype;
    bool mixup = false, videomix = false, no_augment = false;
    bool samples = false, no_normalize = false, no_trackability = false;
};

pmv::PipelineConfig resolve(const GenerateFlags& f) {
    pmv::PipelineConfig c;
    if (!f.config_file.empty()) c = pmv::load_config_file(f.config_file, c);
    if (f.seed) c.seed = *f.seed;
    if (f.clips) c.clips = *f.clips;
    if (f.frames) c.frames = *f.frames;
    if (f.size) c.size = *f.size;
    if (f.workers) c.workers = *f.workers;
    if (f.tubelet) c.tubelet = *f.tubelet;
    if (f.patch) c.patch = *f.patch;
    if (f.mix_alpha) c.mix_alpha = *f.mix_alpha;
    if (f.mask_ratio) c.mask_ratio = *f.mask_ratio;
    if (f.tau) c.track.tau = *f.tau;
    if (f.radius) c.track.radius = *f.radius;
    if (f.transforms) {
        std::vector<pmv::TransformKind> kinds;
        for (const auto& name : split_list(*f.transforms)) kinds.push_back(pmv::parse_transform_kind(name));
        c.transforms = pmv::TransformSet::uniform(kinds);
    }
    if (int(f.mixup) + int(f.videomix) + int(f.no_augment) + int(f.augment.has_value()) > 1)
        throw pmv::Error(pmv::ErrorCode::invalid_config, "choose one of --mixup, --videomix, --no-augment, --augment");
    if (f.mixup) c.augment = pmv::AugmentMode::mixup;
    if (f.videomix) c.augment = pmv::AugmentMode::videomix;
    if (f.no_augment) c.augment = pmv::AugmentMode::none;
    if (f.augment) c.augment = pmv::parse_augment_mode(*f.augment);
    if (f.source) c.source.kind = *f.source;
    if (f.source_dir) {
        c.source.dir = *f.source_dir;
        if (!f.source) c.source.kind = "dir";
    }
    if (f.pool) c.source.pool = *f.pool;
    if (f.dtype) c = pmv::config_from_json(pmv::Json{{"dtype", *f.dtype}}, c);
    if (f.out) c.out = *f.out;
    if (f.samples) c.write_samples = true;
    if (f.no_normalize) c.normalize_targets = false;
    if (f.no_trackability) c.trackability = false;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    omp_set_max_active_levels(1);
    CLI::App app{"Pseudo-motion video synthesis: generate, analyze and inspect clip datasets"};
    app.require_subcommand(1);

    GenerateFlags g;
    auto* gen = app.add_subcommand("generate", "Generate a dataset of clips, masks and a manifest");
    gen->add_option("--config", g.config_file, "JSON config file; flags override it")->check(CLI::ExistingFile);
    gen->add_option("--seed", g.seed, "Master seed");
    gen->add_option("--clips", g.clips, "Number of clips");
    gen->add_option("--frames", g.frames, "Frames per clip (default 16)");
    gen->add_option("--size", g.size, "Square frame size in pixels (default 224)");
    gen->add_option("--transforms", g.transforms,
                    "Comma separated transform set: identity,sliding,zoom,fade,affine,perspective,jitter,cutmix");
    gen->add_flag("--mixup", g.mixup, "Mix each clip with an independent partner clip");
    gen->add_flag("--videomix", g.videomix, "Paste a box of an independent partner clip");
    gen->add_flag("--no-augment", g.no_augment, "No video-level augmentation");
    gen->add_option("--augment", g.augment, "none | mixup | videomix");
    gen->add_option("--mix-alpha", g.mix_alpha, "Beta(alpha, alpha) parameter for mixing");
    gen->add_option("--mask-ratio", g.mask_ratio, "Tube mask ratio (default 0.75)");
    gen->add_option("--tubelet", g.tubelet, "Frames per token");
    gen->add_option("--patch", g.patch, "Token patch size in pixels");
    gen->add_option("--workers", g.workers, "Parallel clip workers (0 = all cores)");
    gen->add_option("--out", g.out, "Output directory");
    gen->add_option("--source", g.source, "mixed | perlin | fractal | blobs | checker | radial | dir");
    gen->add_option("--source-dir", g.source_dir, "Directory of PNG/PPM/PGM source images");
    gen->add_option("--pool", g.pool, "Images loaded from --source-dir (0 = all)");
    gen->add_option("--dtype", g.dtype, "Stored sample type: u8 | f32");
    gen->add_flag("--samples", g.samples, "Also write masked-sample files");
    gen->add_flag("--no-normalize", g.no_normalize, "Raw instead of per-token normalized targets");
    gen->add_flag("--no-trackability", g.no_trackability, "Skip trackability in the manifest stats");
    gen->add_option("--tau", g.tau, "Trackability threshold on the mean squared difference");
    gen->add_option("--radius", g.radius, "Trackability search radius in pixels");

    std::string dataset, clip, out_path;
    std::size_t verify = 0;
    bool normalize_off = false;

    auto* analyze = app.add_subcommand("analyze", "Recompute clip statistics and frame-difference subsets");
    analyze->add_option("dataset", dataset, "Dataset directory")->required();
    analyze->add_option("--out", out_path, "Report file (default <dataset>/analysis.json)");

    auto* inspect = app.add_subcommand("inspect", "Describe a dataset or a clip/mask/sample file");
    inspect->add_option("path", dataset, "Dataset directory or file")->required();
    inspect->add_option("--clip", clip, "Clip id of a dataset row");
    inspect->add_option("--verify", verify, "Replay the first N recipes and compare with the stored files");

    auto* exp = app.add_subcommand("export-frames", "Write the frames of one clip as PNG files");
    exp->add_option("dataset", dataset, "Dataset directory")->required();
    exp->add_option("--clip", clip, "Clip id")->required();
    exp->add_option("--out", out_path, "Output directory")->required();

    auto* mask = app.add_subcommand("mask", "Write masked-sample files from stored clips and masks");
    mask->add_option("dataset", dataset, "Dataset directory")->required();
    mask->add_option("--clip", clip, "Only this clip id");
    mask->add_option("--out", out_path, "Output directory (default: the dataset)");
    mask->add_flag("--no-normalize", normalize_off, "Raw instead of per-token normalized targets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const pmv::PipelineConfig config = resolve(g);
            const auto start = std::chrono::steady_clock::now();
            const pmv::Manifest m = pmv::run_generate(config);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cout << "wrote " << m.rows.size() << " clips to " << config.out.string() << " in " << secs << " s\n";
        } else if (*analyze) {
            std::optional<std::filesystem::path> out;
            if (!out_path.empty()) out = out_path;
            const pmv::Json report = pmv::run_analyze(dataset, out);
            std::cout << report.at("summary").dump(2) << '\n';
        } else if (*inspect) {
            if (verify > 0) {
                const pmv::VerifyReport r = pmv::verify_dataset(dataset, verify);
                std::cout << "replayed " << r.checked << " recipes, " << r.mismatched.size() << " mismatched\n";
                for (const auto& id : r.mismatched) std::cout << "  " << id << '\n';
                return r.mismatched.empty() ? 0 : 1;
            }
            std::optional<std::string> id;
            if (!clip.empty()) id = clip;
            std::cout << pmv::inspect_path(dataset, id).dump(2) << '\n';
        } else if (*exp) {
            const auto files = pmv::run_export_frames(dataset, clip, out_path);
            std::cout << "wrote " << files.size() << " frames to " << out_path << '\n';
        } else if (*mask) {
            std::optional<std::string> id;
            if (!clip.empty()) id = clip;
            std::optional<std::filesystem::path> out;
            if (!out_path.empty()) out = out_path;
            const std::size_t n = pmv::run_mask(dataset, id, !normalize_off, out);
            std::cout << "wrote " << n << " masked samples\n";
        }
    } catch (const pmv::Error& e) {
        std::cerr << "pmv: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "pmv: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
