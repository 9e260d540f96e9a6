#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>

#include "pmv/error.hpp"
#include "pmv/pipeline.hpp"
#include "pmv/raster_io.hpp"
#include "support.hpp"

using namespace pmv;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const fs::path& out) {
    PipelineConfig c;
    c.size = 32;
    c.frames = 4;
    c.clips = 6;
    c.seed = 7;
    c.workers = 1;
    c.out = out;
    return c;
}

std::map<std::string, std::vector<std::uint8_t>> dir_bytes(const fs::path& dir) {
    std::map<std::string, std::vector<std::uint8_t>> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
    return out;
}

std::string error_message(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("worker count does not change dataset bytes") {
    testing::TempDir dir("workers");
    PipelineConfig c = small_config(dir.path / "a");
    c.size = 64;
    c.clips = 10;
    c.write_samples = true;
    run_generate(c);
    c.out = dir.path / "b";
    c.workers = 8;
    run_generate(c);
    const auto a = dir_bytes(dir.path / "a");
    const auto b = dir_bytes(dir.path / "b");
    CHECK(a.size() == 31);
    CHECK(a == b);
}

TEST_CASE("identity clips without augmentation have zero frame difference") {
    testing::TempDir dir("identity");
    PipelineConfig c = small_config(dir.path / "d");
    c.transforms = TransformSet::uniform({TransformKind::identity});
    c.augment = AugmentMode::none;
    const Manifest m = run_generate(c);
    for (const Json& row : m.rows) {
        CHECK(row.at("stats").at("mean_frame_diff").get<double>() == 0.0);
        CHECK(row.at("stats").at("trackability").get<double>() == 1.0);
    }

    const Json report = run_analyze(dir.path / "d");
    // all scores tie, so the split follows clip order
    CHECK(report.at("partitions").at("bottom50") == Json::array({"000000", "000001", "000002"}));
    CHECK(report.at("partitions").at("top50") == Json::array({"000003", "000004", "000005"}));
}

TEST_CASE("default geometry masks 147 of 196 cells") {
    testing::TempDir dir("defaults");
    PipelineConfig c;
    c.clips = 2;
    c.trackability = false;
    c.out = dir.path / "d";
    const Manifest m = run_generate(c);
    for (const Json& row : m.rows) {
        CHECK(row.at("mask").at("masked_cells") == 147);
        CHECK(row.at("mask").at("masked_tokens") == 1176);
        const TubeMask mask = decode_mask(read_file(c.out / row.at("mask_file").get<std::string>()));
        CHECK(mask.masked_cells() == 147);
        const ClipHeader h = decode_clip_header(read_file(c.out / row.at("file").get<std::string>()));
        CHECK(h.frames == 16);
        CHECK(h.width == 224);
        CHECK(h.channels == 3);
    }
}

TEST_CASE("manifest rows are complete and replayable") {
    testing::TempDir dir("manifest");
    PipelineConfig c = small_config(dir.path / "d");
    c.transforms = TransformSet::uniform({TransformKind::sliding_window, TransformKind::zoom_in_out,
                                          TransformKind::fade_in_out, TransformKind::affine,
                                          TransformKind::perspective, TransformKind::color_jitter,
                                          TransformKind::cutmix});
    c.clips = 20;
    run_generate(c);
    const Manifest m = read_manifest(c.out);
    CHECK(m.header.at("format") == "pmv-manifest");
    CHECK(m.rows.size() == 20);
    const auto keys = m.header.at("row_keys");
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const Json& row = m.rows[i];
        for (const auto& k : keys) REQUIRE(row.contains(k.get<std::string>()));
        CHECK(row.at("clip_id") == clip_id(i));
        CHECK(row.at("clip_seed").get<std::uint64_t>() == derive_clip_seed(7, i));
        CHECK(row.at("recipe").at("augment").at("mode") == "mixup");
        CHECK(fs::exists(c.out / row.at("file").get<std::string>()));
    }
    CHECK(manifest_config(m).seed == 7);
    const VerifyReport r = verify_dataset(c.out, 0);
    CHECK(r.checked == 20);
    CHECK(r.mismatched.empty());
}

TEST_CASE("verify detects modified files and recipes") {
    testing::TempDir dir("tamper");
    PipelineConfig c = small_config(dir.path / "d");
    c.augment = AugmentMode::videomix;
    run_generate(c);
    auto bytes = read_file(c.out / "clip_000003.pmv");
    bytes[kClipHeaderBytes + 10] ^= 1;
    write_file(c.out / "clip_000003.pmv", bytes);
    const VerifyReport r = verify_dataset(c.out, 0);
    CHECK(r.mismatched == std::vector<std::string>{"000003"});
    CHECK(verify_dataset(c.out, 2).mismatched.empty());
}

TEST_CASE("export writes every frame as a png") {
    testing::TempDir dir("export");
    PipelineConfig c = small_config(dir.path / "d");
    c.transforms = TransformSet::uniform({TransformKind::identity});
    c.augment = AugmentMode::none;
    run_generate(c);
    const auto files = run_export_frames(c.out, "000002", dir.path / "frames");
    REQUIRE(files.size() == 4);
    CHECK(files[0].filename() == "frame_000.png");
    for (const auto& f : files) CHECK(read_file(f) == read_file(files[0]));

    const Clip stored = decode_clip(read_file(c.out / "clip_000002.pmv"));
    const Image back = read_raster(files[1]);
    CHECK(testing::max_abs_diff(back, stored.frames[1]) <= 1.0 / 255 + 1e-7);

    CHECK_THROWS_AS(run_export_frames(c.out, "999999", dir.path / "x"), Error);
}

TEST_CASE("fade-out clips end on a black frame") {
    testing::TempDir dir("fade");
    PipelineConfig c = small_config(dir.path / "d");
    c.transforms = TransformSet::uniform({TransformKind::fade_in_out});
    c.augment = AugmentMode::none;
    c.clips = 8;
    const Manifest m = run_generate(c);
    int outs = 0;
    for (const Json& row : m.rows) {
        const Clip clip = decode_clip(read_file(c.out / row.at("file").get<std::string>()));
        const bool out = row.at("recipe").at("primary").at("params").at("direction") == "out";
        const Image& black = out ? clip.frames.back() : clip.frames.front();
        for (float v : black.pixels) REQUIRE(v == 0.0f);
        outs += out;
    }
    CHECK(outs > 0);
    CHECK(outs < 8);
}

TEST_CASE("analyze on a hand-built dataset") {
    testing::TempDir dir("analyze");
    PipelineConfig c = small_config(dir.path / "d");
    c.transforms = TransformSet::uniform({TransformKind::identity});
    c.augment = AugmentMode::none;
    c.clips = 4;
    run_generate(c);
    // replace the clips with constant steps of known frame difference
    const double steps[4] = {3, 1, 4, 2};
    for (int i = 0; i < 4; ++i) {
        Clip clip = testing::constant_clip(4, 32, 32, 3, 0.0f);
        for (int t = 0; t < 4; ++t) clip.frames[t] = Image(32, 32, 3, static_cast<float>(t * steps[i] * 17 / 255.0));
        write_file(c.out / ("clip_" + clip_id(i) + ".pmv"), encode_clip(clip, ClipDType::u8));
    }
    const Json report = run_analyze(c.out);
    CHECK(report.at("partitions").at("top50") == Json::array({"000000", "000002"}));
    CHECK(report.at("partitions").at("bottom50") == Json::array({"000001", "000003"}));
    CHECK(report.at("partitions").at("p25_p75") == Json::array({"000000", "000003"}));
    CHECK(report.at("clips")[2].at("mean_frame_diff").get<double>() == doctest::Approx(4 * 17 / 255.0));
    const auto first = read_file(c.out / "analysis.json");
    run_analyze(c.out);
    CHECK(read_file(c.out / "analysis.json") == first);
    const Json summary = report.at("summary").at("mean_frame_diff");
    CHECK(summary.at("p50").get<double>() == doctest::Approx(2.5 * 17 / 255.0));
}

TEST_CASE("corrupt clips are reported by id") {
    testing::TempDir dir("corrupt");
    PipelineConfig c = small_config(dir.path / "d");
    run_generate(c);
    auto bytes = read_file(c.out / "clip_000004.pmv");
    bytes.resize(bytes.size() - 5);
    write_file(c.out / "clip_000004.pmv", bytes);
    const std::string msg = error_message([&] { run_analyze(c.out); });
    CHECK(msg.find("clip 000004") != std::string::npos);
    CHECK(msg.find("corrupt") != std::string::npos);
}

TEST_CASE("failed runs leave no output behind") {
    testing::TempDir dir("atomic");
    PipelineConfig c = small_config(dir.path / "d");
    c.track.patch = 24;  // does not divide 32, so every clip fails in its stats
    const std::string msg = error_message([&] { run_generate(c); });
    CHECK(msg.find("clip 000000") != std::string::npos);
    CHECK(!fs::exists(c.out));
    CHECK(!fs::exists(dir.path / "d.partial"));

    c = small_config(dir.path / "full");
    fs::create_directories(c.out);
    write_file(c.out / "keep.txt", std::vector<std::uint8_t>{1});
    CHECK_THROWS_AS(run_generate(c), Error);
    CHECK(fs::exists(c.out / "keep.txt"));
}

TEST_CASE("masked samples from the mask command match generation") {
    testing::TempDir dir("mask");
    PipelineConfig c = small_config(dir.path / "d");
    c.write_samples = true;
    run_generate(c);
    CHECK(run_mask(c.out, std::nullopt, true, dir.path / "again") == 6);
    for (int i = 0; i < 6; ++i) {
        const std::string f = "clip_" + clip_id(i) + ".pms";
        CHECK(read_file(c.out / f) == read_file(dir.path / "again" / f));
    }
    CHECK(run_mask(c.out, std::string("000001"), false, dir.path / "raw") == 1);
    const MaskedSampleFile s = decode_masked_sample(read_file(dir.path / "raw" / "clip_000001.pms"));
    CHECK(!s.normalized);
    CHECK(s.sample.masked_index.size() == 6);
    CHECK(inspect_path(dir.path / "raw" / "clip_000001.pms").is_object());
    CHECK(inspect_path(c.out, std::string("000001")).at("clip_id") == "000001");
}

TEST_CASE("config json round trip and strict keys") {
    PipelineConfig c;
    c.source.kind = "perlin";
    c.transforms = TransformSet::uniform({TransformKind::affine, TransformKind::cutmix});
    c.ranges.affine_angle = {-5, 5};
    c.frames = 8;
    c.size = 64;
    c.augment = AugmentMode::videomix;
    c.mix_alpha = 0.4;
    c.seed = 123456789012345ull;
    c.dtype = ClipDType::f32;
    c.track.tau = 0.01;
    const PipelineConfig back = config_from_json(config_snapshot(c));
    CHECK(config_snapshot(back) == config_snapshot(c));
    CHECK(back.ranges == c.ranges);
    CHECK(back.transforms == c.transforms);

    CHECK_THROWS_AS(config_from_json(Json{{"colour", 1}}), Error);
    CHECK_THROWS_AS(config_from_json(Json{{"frames", "many"}}), Error);
    PipelineConfig bad;
    bad.frames = 15;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = PipelineConfig{};
    bad.mask_ratio = 0.001;
    CHECK_THROWS_AS(validate(bad), Error);
    bad = PipelineConfig{};
    bad.source.kind = "dir";
    CHECK_THROWS_AS(validate(bad), Error);

    testing::TempDir dir("config");
    {
        std::ofstream f(dir.path / "c.json");
        f << R"({"frames": 4, "size": 32, "transforms": ["zoom"], "augment": "none", "workers": 2})";
    }
    const PipelineConfig loaded = load_config_file(dir.path / "c.json");
    CHECK(loaded.frames == 4);
    CHECK(loaded.workers == 2);
    CHECK(loaded.transforms.kinds == std::vector<TransformKind>{TransformKind::zoom_in_out});
}

TEST_CASE("directory sources") {
    testing::TempDir dir("dirsrc");
    fs::create_directories(dir.path / "imgs");
    for (int i = 0; i < 3; ++i)
        write_png(dir.path / "imgs" / ("p" + std::to_string(i) + ".png"), testing::random_image(40, 50, 3, 60 + i));
    PipelineConfig c = small_config(dir.path / "d");
    c.source.kind = "dir";
    c.source.dir = (dir.path / "imgs").string();
    c.transforms = TransformSet::uniform({TransformKind::cutmix, TransformKind::affine});
    const Manifest m = run_generate(c);
    CHECK(m.rows[0].at("recipe").at("primary").contains("source_file"));
    CHECK(verify_dataset(c.out, 0).mismatched.empty());
}

#ifdef PMV_CLI_PATH
TEST_CASE("command line smoke test") {
    testing::TempDir dir("cli");
    const std::string cli = PMV_CLI_PATH;
    const std::string out = (dir.path / "d").string();
    const std::string quiet = " > " + (dir.path / "log.txt").string() + " 2>&1";
    CHECK(std::system((cli + " generate --clips 3 --frames 4 --size 32 --seed 3 --transforms zoom,affine --mixup --out " +
                       out + quiet).c_str()) == 0);
    CHECK(fs::exists(dir.path / "d" / "manifest.jsonl"));
    CHECK(std::system((cli + " inspect " + out + " --verify 3" + quiet).c_str()) == 0);
    CHECK(std::system((cli + " analyze " + out + quiet).c_str()) == 0);
    CHECK(fs::exists(dir.path / "d" / "analysis.json"));
    CHECK(std::system((cli + " export-frames " + out + " --clip 000001 --out " + (dir.path / "f").string() + quiet)
                          .c_str()) == 0);
    CHECK(fs::exists(dir.path / "f" / "frame_003.png"));
    CHECK(std::system((cli + " mask " + out + quiet).c_str()) == 0);
    CHECK(fs::exists(dir.path / "d" / "clip_000002.pms"));
    CHECK(std::system((cli + " generate --clips 1 --frames 15 --out " + (dir.path / "bad").string() + quiet).c_str()) !=
          0);
    CHECK(std::system((cli + " generate --mixup --videomix --out " + (dir.path / "bad").string() + quiet).c_str()) != 0);
}
#endif
