#include "pmv/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "pmv/error.hpp"
#include "pmv/raster_io.hpp"
#include "pmv/video_augment.hpp"

namespace pmv {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSourceKinds[] = {"mixed", "perlin", "fractal", "blobs", "checker", "radial", "dir"};
constexpr std::string_view kAugmentNames[] = {"none", "mixup", "videomix"};

// Every procedural sub-clip draws from two freshly generated images, so CutMix
// always has a distinct partner.
constexpr std::size_t kProceduralPool = 2;

const char* dtype_name(ClipDType d) { return d == ClipDType::u8 ? "u8" : "f32"; }

ClipDType parse_dtype(const std::string& s) {
    if (s == "u8") return ClipDType::u8;
    if (s == "f32") return ClipDType::f32;
    throw Error(ErrorCode::invalid_config, "dtype must be u8 or f32, got '" + s + "'");
}

bool is_procedural(const std::string& kind) { return kind != "dir"; }

std::uint64_t source_seed(std::uint64_t sub_seed, std::size_t k) {
    return splitmix64(sub_seed + 0x632BE59BD9B4E019ull * (k + 1));
}

Generator resolve_generator(const std::string& kind, std::uint64_t seed) {
    if (kind == "mixed") {
        constexpr Generator textured[] = {Generator::perlin, Generator::fractal, Generator::blobs};
        return textured[splitmix64(seed) % 3];
    }
    return parse_generator(kind);
}

Json track_json(const TrackParams& t) {
    return Json{{"patch", t.patch}, {"radius", t.radius}, {"tau", t.tau}};
}

template <class T>
void read_key(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Json metric_definitions() {
    return Json{
        {"mean_frame_diff", "mean over consecutive frame pairs of the mean absolute pixel difference, on stored values"},
        {"gap_diffs", "mean absolute pixel difference of each consecutive frame pair"},
        {"trackability",
         "fraction of (patch, gap) pairs whose best integer displacement within the radius has mean squared "
         "difference <= tau"},
        {"masked_cells", "masked spatial cells of the tube mask"},
        {"masked_tokens", "masked_cells times temporal token count"}};
}

Json stats_json(const ClipStats& s) {
    return Json{{"mean_frame_diff", s.mean_frame_diff},
                {"gap_diffs", s.gap_diffs},
                {"trackability", s.has_trackability ? Json(s.trackability) : Json(nullptr)}};
}

fs::path clip_file(const std::string& id) { return "clip_" + id + ".pmv"; }
fs::path mask_file(const std::string& id) { return "clip_" + id + ".pmm"; }
fs::path sample_file(const std::string& id) { return "clip_" + id + ".pms"; }

// Collected per-item exceptions, rethrown for the lowest failing index with
// the item named.
void rethrow_first(const std::vector<std::exception_ptr>& errors, const std::vector<std::string>& ids) {
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw Error(e.code(), "clip " + ids[i] + ": " + e.message());
        } catch (const fs::filesystem_error& e) {
            throw Error(ErrorCode::io, "clip " + ids[i] + ": " + e.what());
        }
    }
}

int thread_count(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

struct SubClip {
    Clip clip;
    Json recipe;
};

// Renders a planned recipe, synthesizing only the procedural sources it reads.
SubClip render_sub(const PipelineConfig& config, const SourceContext& ctx, const ClipRecipe& plan) {
    SubClip out;
    out.recipe = to_json(plan);
    if (is_procedural(config.source.kind)) {
        std::vector<Image> images(plan.source_count);
        Json ids = Json::array();
        for (std::size_t k = 0; k < plan.source_count; ++k) {
            const std::uint64_t s = source_seed(plan.seed, k);
            const Generator g = resolve_generator(config.source.kind, s);
            ids.push_back(Json{{"generator", std::string(to_string(g))}, {"seed", s}});
            const bool used = k == plan.source_index || (plan.partner_index && k == *plan.partner_index);
            if (used) images[k] = generate_source(g, config.size, s);
        }
        out.recipe["sources"] = ids;
        out.clip = render(plan, images);
    } else {
        out.recipe["source_file"] = ctx.names.at(plan.source_index);
        out.recipe["partner_file"] = plan.partner_index ? Json(ctx.names.at(*plan.partner_index)) : Json(nullptr);
        out.clip = render(plan, ctx.images);
    }
    return out;
}

std::size_t pool_size(const PipelineConfig& config, const SourceContext& ctx) {
    return is_procedural(config.source.kind) ? kProceduralPool : ctx.images.size();
}

SubClip build_sub(const PipelineConfig& config, const SourceContext& ctx, std::uint64_t seed) {
    const ClipRecipe plan =
        plan_clip(pool_size(config, ctx), config.size, config.transforms, config.frames, config.ranges, seed);
    return render_sub(config, ctx, plan);
}

SubClip replay_sub(const PipelineConfig& config, const SourceContext& ctx, const Json& j) {
    const ClipRecipe recorded = recipe_from_json(j);
    if (recorded.source_count != pool_size(config, ctx))
        throw Error(ErrorCode::missing_source, "recipe references " + std::to_string(recorded.source_count) +
                                                   " sources, the configured pool has " +
                                                   std::to_string(pool_size(config, ctx)));
    if (recorded.frames != config.frames) throw Error(ErrorCode::corrupt_file, "recipe frame count differs from config");
    return render_sub(config, ctx, replan(recorded, config.size, config.ranges));
}

Json box_json(const VideoMixBox& b) {
    return Json{{"x", b.x}, {"y", b.y}, {"width", b.width}, {"height", b.height}};
}

GeneratedClip finish_clip(const PipelineConfig& config, SubClip primary, std::optional<SubClip> partner,
                          AugmentMode mode, std::uint64_t mix_seed, double lambda, const VideoMixBox& box,
                          std::uint64_t mask_seed) {
    GeneratedClip g;
    Json augment{{"mode", std::string(to_string(mode))}};
    switch (mode) {
        case AugmentMode::none:
            g.clip = std::move(primary.clip);
            break;
        case AugmentMode::mixup:
            augment["seed"] = mix_seed;
            augment["lambda"] = lambda;
            augment["partner"] = partner->recipe;
            g.clip = mixup_clips(primary.clip, partner->clip, lambda);
            break;
        case AugmentMode::videomix:
            augment["seed"] = mix_seed;
            augment["box"] = box_json(box);
            augment["partner"] = partner->recipe;
            g.clip = videomix_clips(primary.clip, partner->clip, box);
            break;
    }
    Rng mask_rng(mask_seed);
    g.mask = sample_tube_mask(config.grid(), config.mask_ratio, mask_rng);
    g.recipe = Json{{"primary", std::move(primary.recipe)}, {"augment", std::move(augment)}, {"mask_seed", mask_seed}};
    return g;
}

Json emit_clip(const PipelineConfig& config, const SourceContext& ctx, std::size_t index, const fs::path& dir) {
    const std::string id = clip_id(index);
    GeneratedClip g = build_clip(config, ctx, index);
    const std::vector<std::uint8_t> clip_bytes = encode_clip(g.clip, config.dtype);
    const Clip stored = decode_clip(clip_bytes);
    const ClipStats stats = compute_stats(stored, config.track, config.trackability);

    write_file(dir / clip_file(id), clip_bytes);
    write_file(dir / mask_file(id), encode_mask(g.mask));
    if (config.write_samples) {
        const PatchGrid grid = config.grid();
        const MaskedSample sample = apply_mask(patchify(stored, grid), g.mask, grid, config.normalize_targets);
        write_file(dir / sample_file(id), encode_masked_sample(sample, config.normalize_targets));
    }

    return Json{{"type", "clip"},
                {"index", index},
                {"clip_id", id},
                {"file", clip_file(id).string()},
                {"mask_file", mask_file(id).string()},
                {"sample_file", config.write_samples ? Json(sample_file(id).string()) : Json(nullptr)},
                {"clip_seed", g.clip_seed},
                {"recipe", std::move(g.recipe)},
                {"stats", stats_json(stats)},
                {"mask", Json{{"ratio", g.mask.ratio},
                              {"masked_cells", g.mask.masked_cells()},
                              {"masked_tokens", g.mask.masked_tokens()}}}};
}

Json manifest_header(const PipelineConfig& config) {
    return Json{{"type", "header"},
                {"format", "pmv-manifest"},
                {"version", 1},
                {"clip_count", config.clips},
                {"config", config_snapshot(config)},
                {"seed_derivation", "clip_seed = splitmix64(seed ^ (index * 0x9E3779B97F4A7C15))"},
                {"clip_format", "PMV1"},
                {"mask_format", "PMM1"},
                {"sample_format", "PMS1"},
                {"row_keys", Json::array({"type", "index", "clip_id", "file", "mask_file", "sample_file",
                                          "clip_seed", "recipe", "stats", "mask"})},
                {"metrics", metric_definitions()}};
}

Clip load_stored_clip(const fs::path& dataset, const Json& row) {
    const fs::path file = dataset / row.at("file").get<std::string>();
    if (!fs::exists(file)) throw Error(ErrorCode::corrupt_file, "missing clip file " + file.string());
    return decode_clip(read_file(file));
}

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

Json summary_json(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return Json{{"mean", mean},
                {"std", std::sqrt(sq / static_cast<double>(values.size()))},
                {"min", values.front()},
                {"p25", percentile(values, 0.25)},
                {"p50", percentile(values, 0.50)},
                {"p75", percentile(values, 0.75)},
                {"max", values.back()}};
}

std::vector<const Json*> select_rows(const Manifest& m, const std::optional<std::string>& id) {
    std::vector<const Json*> rows;
    if (id) {
        rows.push_back(&find_row(m, *id));
    } else {
        for (const Json& r : m.rows) rows.push_back(&r);
    }
    return rows;
}

}  // namespace

std::string_view to_string(AugmentMode mode) { return kAugmentNames[static_cast<int>(mode)]; }

AugmentMode parse_augment_mode(std::string_view name) {
    for (int i = 0; i < 3; ++i)
        if (kAugmentNames[i] == name) return static_cast<AugmentMode>(i);
    throw Error(ErrorCode::invalid_config, "augment must be none, mixup or videomix, got '" + std::string(name) + "'");
}

std::string clip_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", index);
    return buf;
}

void validate(const PipelineConfig& c) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_config, what); };
    if (std::find(std::begin(kSourceKinds), std::end(kSourceKinds), c.source.kind) == std::end(kSourceKinds))
        fail("unknown source kind '" + c.source.kind + "'");
    if (c.source.kind == "dir" && c.source.dir.empty()) fail("source kind dir needs a directory");
    if (c.source.pool < 0) fail("source pool must be >= 0");
    validate(c.transforms);
    validate(c.ranges);
    if (c.clips < 1) fail("clip count must be >= 1");
    if (c.frames < 2) fail("frames must be >= 2");
    if (c.size < 1) fail("size must be >= 1");
    if (c.augment != AugmentMode::none && !(c.mix_alpha > 0.0 && std::isfinite(c.mix_alpha)))
        fail("mix alpha must be positive");
    try {
        const PatchGrid grid = c.grid();
        if (!(c.mask_ratio >= 0.0 && c.mask_ratio <= 1.0)) fail("mask ratio must be in [0,1]");
        const int masked = masked_cell_count(grid.spatial_cells(), c.mask_ratio);
        if (masked < 1 || masked >= grid.spatial_cells()) fail("mask ratio leaves no masked or no visible cells");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_config) throw;
        fail(e.message());
    }
    if (c.track.patch < 1 || c.track.radius < 0 || !(c.track.tau >= 0.0)) fail("invalid trackability parameters");
    if (c.workers < 0) fail("workers must be >= 0");
}

Json config_snapshot(const PipelineConfig& c) {
    return Json{{"source", Json{{"kind", c.source.kind}, {"dir", c.source.dir}, {"pool", c.source.pool}}},
                {"transforms", to_json(c.transforms)},
                {"ranges", to_json(c.ranges)},
                {"frames", c.frames},
                {"size", c.size},
                {"clips", c.clips},
                {"augment", std::string(to_string(c.augment))},
                {"mix_alpha", c.mix_alpha},
                {"mask_ratio", c.mask_ratio},
                {"tubelet", c.tubelet},
                {"patch", c.patch},
                {"seed", c.seed},
                {"dtype", dtype_name(c.dtype)},
                {"write_samples", c.write_samples},
                {"normalize_targets", c.normalize_targets},
                {"trackability", c.trackability},
                {"track", track_json(c.track)}};
}

PipelineConfig config_from_json(const Json& j, PipelineConfig c) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "config must be a JSON object");
    static const std::vector<std::string> known = {
        "source", "transforms", "ranges",    "frames",        "size",              "clips",
        "augment", "mix_alpha", "mask_ratio", "tubelet",      "patch",             "seed",
        "dtype",   "write_samples", "normalize_targets", "trackability", "track", "workers", "out"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
    try {
        if (j.contains("source")) {
            const Json& s = j.at("source");
            if (s.is_string()) {
                c.source.kind = s.get<std::string>();
            } else {
                read_key(s, "kind", c.source.kind);
                read_key(s, "dir", c.source.dir);
                read_key(s, "pool", c.source.pool);
            }
        }
        if (j.contains("transforms")) {
            const Json& t = j.at("transforms");
            if (t.is_array()) {
                std::vector<TransformKind> kinds;
                for (const auto& k : t) kinds.push_back(parse_transform_kind(k.get<std::string>()));
                c.transforms = TransformSet::uniform(kinds);
            } else {
                c.transforms = transform_set_from_json(t);
            }
        }
        if (j.contains("ranges")) c.ranges = ranges_from_json(j.at("ranges"), c.ranges);
        read_key(j, "frames", c.frames);
        read_key(j, "size", c.size);
        read_key(j, "clips", c.clips);
        if (j.contains("augment")) c.augment = parse_augment_mode(j.at("augment").get<std::string>());
        read_key(j, "mix_alpha", c.mix_alpha);
        read_key(j, "mask_ratio", c.mask_ratio);
        read_key(j, "tubelet", c.tubelet);
        read_key(j, "patch", c.patch);
        read_key(j, "seed", c.seed);
        if (j.contains("dtype")) c.dtype = parse_dtype(j.at("dtype").get<std::string>());
        read_key(j, "write_samples", c.write_samples);
        read_key(j, "normalize_targets", c.normalize_targets);
        read_key(j, "trackability", c.trackability);
        if (j.contains("track")) {
            const Json& t = j.at("track");
            read_key(t, "patch", c.track.patch);
            read_key(t, "radius", c.track.radius);
            read_key(t, "tau", c.track.tau);
        }
        read_key(j, "workers", c.workers);
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_config, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_config) throw;
        throw Error(ErrorCode::invalid_config, e.message());
    }
    return c;
}

PipelineConfig load_config_file(const fs::path& file, PipelineConfig base) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::io, "cannot open config " + file.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_config, file.string() + ": " + e.what());
    }
    return config_from_json(j, std::move(base));
}

SourceContext make_source_context(const PipelineConfig& config) {
    SourceContext ctx;
    if (is_procedural(config.source.kind)) return ctx;
    const int count = config.source.pool > 0 ? config.source.pool
                                             : static_cast<int>(list_image_files(config.source.dir).size());
    if (count == 0) throw Error(ErrorCode::source_empty, "no decodable images in " + config.source.dir);
    for (NamedImage& n : load_image_dir_named(config.source.dir, count, config.size, config.seed)) {
        ctx.names.push_back(std::move(n.name));
        ctx.images.push_back(std::move(n.image));
    }
    return ctx;
}

GeneratedClip build_clip(const PipelineConfig& config, const SourceContext& ctx, std::size_t index) {
    const std::uint64_t clip_seed = derive_clip_seed(config.seed, index);
    Rng seeds(clip_seed);
    const std::uint64_t primary_seed = seeds.next();
    const std::uint64_t partner_seed = seeds.next();
    const std::uint64_t mix_seed = seeds.next();
    const std::uint64_t mask_seed = seeds.next();

    SubClip primary = build_sub(config, ctx, primary_seed);
    std::optional<SubClip> partner;
    double lambda = 1.0;
    VideoMixBox box;
    if (config.augment != AugmentMode::none) {
        partner = build_sub(config, ctx, partner_seed);
        Rng mix(mix_seed);
        if (config.augment == AugmentMode::mixup)
            lambda = sample_mixup_lambda(config.mix_alpha, mix);
        else
            box = sample_videomix_box(config.size, config.size, config.mix_alpha, mix);
    }
    GeneratedClip g = finish_clip(config, std::move(primary), std::move(partner), config.augment, mix_seed, lambda,
                                  box, mask_seed);
    g.clip_seed = clip_seed;
    return g;
}

GeneratedClip replay_recipe(const PipelineConfig& config, const SourceContext& ctx, const Json& recipe) {
    try {
        SubClip primary = replay_sub(config, ctx, recipe.at("primary"));
        const Json& aug = recipe.at("augment");
        const AugmentMode mode = parse_augment_mode(aug.at("mode").get<std::string>());
        std::optional<SubClip> partner;
        double lambda = 1.0;
        VideoMixBox box;
        std::uint64_t mix_seed = 0;
        if (mode != AugmentMode::none) {
            partner = replay_sub(config, ctx, aug.at("partner"));
            mix_seed = aug.at("seed").get<std::uint64_t>();
            if (mode == AugmentMode::mixup) {
                lambda = aug.at("lambda").get<double>();
            } else {
                const Json& b = aug.at("box");
                box = {b.at("x").get<int>(), b.at("y").get<int>(), b.at("width").get<int>(), b.at("height").get<int>()};
            }
        }
        return finish_clip(config, std::move(primary), std::move(partner), mode, mix_seed, lambda, box,
                           recipe.at("mask_seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corrupt_file, std::string("malformed recipe: ") + e.what());
    }
}

Manifest run_generate(const PipelineConfig& config) {
    validate(config);
    if (config.out.empty()) throw Error(ErrorCode::invalid_config, "no output directory");
    const fs::path out = config.out;
    if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out)))
        throw Error(ErrorCode::io, out.string() + " exists and is not an empty directory");
    const SourceContext ctx = make_source_context(config);

    fs::path staging = out;
    staging += ".partial";
    std::error_code ec;
    fs::remove_all(staging, ec);
    fs::create_directories(staging, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + staging.string() + ": " + ec.message());

    const auto n = static_cast<std::size_t>(config.clips);
    Manifest manifest;
    manifest.header = manifest_header(config);
    manifest.rows.resize(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(config.workers))
    for (std::size_t i = 0; i < n; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            manifest.rows[i] = emit_clip(config, ctx, i, staging);
        } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
        }
    }

    try {
        if (failed) {
            std::vector<std::string> ids(n);
            for (std::size_t i = 0; i < n; ++i) ids[i] = clip_id(i);
            rethrow_first(errors, ids);
        }
        std::ofstream m(staging / kManifestFile, std::ios::binary);
        m << manifest.header.dump() << '\n';
        for (const Json& row : manifest.rows) m << row.dump() << '\n';
        m.close();
        if (!m) throw Error(ErrorCode::io, "cannot write manifest");
        if (fs::exists(out)) fs::remove(out);
        fs::rename(staging, out);
    } catch (const fs::filesystem_error& e) {
        fs::remove_all(staging, ec);
        throw Error(ErrorCode::io, e.what());
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
    return manifest;
}

Manifest read_manifest(const fs::path& dataset) {
    std::ifstream in(dataset / kManifestFile, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "no manifest in " + dataset.string());
    Manifest m;
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            Json j = Json::parse(line);
            if (line_no == 1) {
                if (j.value("type", "") != "header") throw Error(ErrorCode::corrupt_file, "manifest lacks a header");
                m.header = std::move(j);
                continue;
            }
            if (j.value("type", "") != "clip" || j.at("index").get<std::size_t>() != m.rows.size())
                throw Error(ErrorCode::corrupt_file, "manifest line " + std::to_string(line_no) + " out of order");
            m.rows.push_back(std::move(j));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corrupt_file, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (m.header.is_null()) throw Error(ErrorCode::corrupt_file, "empty manifest");
    if (m.header.at("clip_count").get<std::size_t>() != m.rows.size())
        throw Error(ErrorCode::corrupt_file, "manifest row count differs from its header");
    return m;
}

PipelineConfig manifest_config(const Manifest& manifest) { return config_from_json(manifest.header.at("config")); }

const Json& find_row(const Manifest& manifest, const std::string& id) {
    for (const Json& row : manifest.rows)
        if (row.at("clip_id").get<std::string>() == id) return row;
    throw Error(ErrorCode::missing_clip, "no clip '" + id + "' in dataset");
}

VerifyReport verify_dataset(const fs::path& dataset, std::size_t limit) {
    const Manifest m = read_manifest(dataset);
    const PipelineConfig config = manifest_config(m);
    const SourceContext ctx = make_source_context(config);
    const std::size_t n = limit == 0 ? m.rows.size() : std::min(limit, m.rows.size());
    std::vector<char> ok(n, 0);
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::string> ids(n);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const Json& row = m.rows[i];
            ids[i] = row.at("clip_id").get<std::string>();
            const GeneratedClip g = replay_recipe(config, ctx, row.at("recipe"));
            ok[i] = encode_clip(g.clip, config.dtype) == read_file(dataset / row.at("file").get<std::string>()) &&
                    encode_mask(g.mask) == read_file(dataset / row.at("mask_file").get<std::string>());
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors, ids);
    VerifyReport report;
    report.checked = n;
    for (std::size_t i = 0; i < n; ++i)
        if (!ok[i]) report.mismatched.push_back(ids[i]);
    return report;
}

std::vector<fs::path> run_export_frames(const fs::path& dataset, const std::string& id, const fs::path& out_dir) {
    const Manifest m = read_manifest(dataset);
    const Clip clip = load_stored_clip(dataset, find_row(m, id));
    fs::create_directories(out_dir);
    const std::size_t digits = std::max<std::size_t>(3, std::to_string(std::max(clip.length() - 1, 0)).size());
    std::vector<fs::path> files;
    for (int t = 0; t < clip.length(); ++t) {
        std::string n = std::to_string(t);
        n.insert(0, digits - n.size(), '0');
        files.push_back(out_dir / ("frame_" + n + ".png"));
        write_png(files.back(), clip.frames[t]);
    }
    return files;
}

Json run_analyze(const fs::path& dataset, std::optional<fs::path> out_file) {
    const Manifest m = read_manifest(dataset);
    const PipelineConfig config = manifest_config(m);
    const std::size_t n = m.rows.size();
    std::vector<ClipStats> stats(n);
    std::vector<std::string> ids(n);
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = m.rows[i].at("clip_id").get<std::string>();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const Clip clip = load_stored_clip(dataset, m.rows[i]);
            stats[i] = compute_stats(clip, config.track, config.trackability);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors, ids);

    std::vector<double> diffs(n), tracks(n);
    Json clips = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i] = stats[i].mean_frame_diff;
        tracks[i] = stats[i].trackability;
        Json row{{"clip_id", ids[i]}};
        const Json s = stats_json(stats[i]);
        for (const auto& [k, v] : s.items()) row[k] = v;
        clips.push_back(std::move(row));
    }

    Json partitions;
    if (n >= 4) {
        const Partition p = partition_by_difference(diffs);
        auto names = [&](const std::vector<std::size_t>& idx) {
            Json a = Json::array();
            for (std::size_t i : idx) a.push_back(ids[i]);
            return a;
        };
        partitions = Json{{"rule", "rank r ascending by mean_frame_diff, ties by index; top50: 2r >= n; "
                                   "p25_p75: n <= 4r < 3n; bottom50: 2r < n"},
                          {"top50", names(p.top)},
                          {"p25_p75", names(p.middle)},
                          {"bottom50", names(p.bottom)}};
    } else {
        partitions = Json{{"error", "at least 4 clips are needed"}};
    }

    Json report{{"clip_count", n},
                {"metrics", metric_definitions()},
                {"summary", Json{{"mean_frame_diff", summary_json(diffs)},
                                 {"trackability", config.trackability ? summary_json(tracks) : Json(nullptr)}}},
                {"partitions", std::move(partitions)},
                {"clips", std::move(clips)}};

    const fs::path file = out_file ? *out_file : dataset / "analysis.json";
    std::ofstream out(file, std::ios::binary);
    out << report.dump(2) << '\n';
    out.close();
    if (!out) throw Error(ErrorCode::io, "cannot write " + file.string());
    return report;
}

std::size_t run_mask(const fs::path& dataset, std::optional<std::string> id, bool normalize,
                     std::optional<fs::path> out_dir) {
    const Manifest m = read_manifest(dataset);
    const PipelineConfig config = manifest_config(m);
    const PatchGrid grid = config.grid();
    const fs::path dir = out_dir ? *out_dir : dataset;
    fs::create_directories(dir);
    const std::vector<const Json*> rows = select_rows(m, id);
    std::vector<std::exception_ptr> errors(rows.size());
    std::vector<std::string> ids(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ids[i] = rows[i]->at("clip_id").get<std::string>();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            const Clip clip = load_stored_clip(dataset, *rows[i]);
            const TubeMask mask = decode_mask(read_file(dataset / rows[i]->at("mask_file").get<std::string>()));
            const MaskedSample sample = apply_mask(patchify(clip, grid), mask, grid, normalize);
            write_file(dir / sample_file(ids[i]), encode_masked_sample(sample, normalize));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    rethrow_first(errors, ids);
    return rows.size();
}

Json inspect_path(const fs::path& path, std::optional<std::string> id) {
    if (fs::is_directory(path)) {
        const Manifest m = read_manifest(path);
        if (id) return find_row(m, *id);
        return Json{{"clip_count", m.rows.size()}, {"config", m.header.at("config")}};
    }
    const std::vector<std::uint8_t> bytes = read_file(path);
    const std::string magic(bytes.begin(), bytes.begin() + std::min<std::size_t>(4, bytes.size()));
    if (magic == "PMV1") {
        const ClipHeader h = decode_clip_header(bytes);
        return Json{{"format", "clip"},      {"version", h.version},   {"dtype", dtype_name(h.dtype)},
                    {"channels", h.channels}, {"frames", h.frames},     {"height", h.height},
                    {"width", h.width},       {"bytes", bytes.size()}};
    }
    if (magic == "PMM1") {
        const TubeMask mask = decode_mask(bytes);
        return Json{{"format", "mask"},
                    {"t_tokens", mask.t_tokens},
                    {"h_tokens", mask.h_tokens},
                    {"w_tokens", mask.w_tokens},
                    {"ratio", mask.ratio},
                    {"masked_cells", mask.masked_cells()},
                    {"masked_tokens", mask.masked_tokens()}};
    }
    if (magic == "PMS1") {
        const MaskedSampleFile f = decode_masked_sample(bytes);
        return Json{{"format", "masked_sample"},
                    {"normalized", f.normalized},
                    {"t_tokens", f.sample.mask.t_tokens},
                    {"h_tokens", f.sample.mask.h_tokens},
                    {"w_tokens", f.sample.mask.w_tokens},
                    {"visible_tokens", f.sample.visible_index.size()},
                    {"masked_tokens", f.sample.masked_index.size()},
                    {"token_dim", f.sample.visible.cols}};
    }
    throw Error(ErrorCode::corrupt_file, path.string() + " is not a clip, mask or sample file");
}

}  // namespace pmv
