#include "pmv/serialize.hpp"

#include <string>

#include "pmv/error.hpp"

namespace pmv {

namespace {

const char* direction_name(Direction d) { return d == Direction::in ? "in" : "out"; }

Direction parse_direction(const std::string& s) {
    if (s == "in") return Direction::in;
    if (s == "out") return Direction::out;
    throw Error(ErrorCode::invalid_config, "direction must be 'in' or 'out'");
}

Json trajectory_json(const WindowTrajectory& w) {
    return Json{{"side", w.side}, {"start_x", w.start_x}, {"start_y", w.start_y}, {"step_x", w.step_x},
                {"step_y", w.step_y}};
}

WindowTrajectory trajectory_from(const Json& j) {
    return {j.at("side").get<int>(), j.at("start_x").get<int>(), j.at("start_y").get<int>(),
            j.at("step_x").get<int>(), j.at("step_y").get<int>()};
}

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

void read_range(const Json& j, const char* key, Range& r) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::invalid_config, std::string(key) + " must be [min, max]");
    r = {v[0].get<double>(), v[1].get<double>()};
}

template <typename T>
void read_value(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Json to_json(const TransformParams& params) {
    struct Visitor {
        Json operator()(const IdentityParams&) const { return Json::object(); }
        Json operator()(const SlidingWindowParams& p) const { return Json{{"window", trajectory_json(p.window)}}; }
        Json operator()(const ZoomParams& p) const {
            return Json{{"direction", direction_name(p.direction)}, {"start_fraction", p.start_fraction},
                        {"end_fraction", p.end_fraction}};
        }
        Json operator()(const FadeParams& p) const { return Json{{"direction", direction_name(p.direction)}}; }
        Json operator()(const AffineParams& p) const {
            return Json{{"angle_deg", p.angle_deg}, {"translate_x", p.translate_x}, {"translate_y", p.translate_y},
                        {"scale", p.scale}, {"shear_deg", p.shear_deg}};
        }
        Json operator()(const PerspectiveParams& p) const {
            Json corners = Json::array();
            for (const Vec2& o : p.corner_offsets) corners.push_back(Json::array({o.x, o.y}));
            return Json{{"distortion", p.distortion}, {"corner_offsets", corners}};
        }
        Json operator()(const ColorJitterParams& p) const {
            return Json{{"brightness", p.brightness}, {"contrast", p.contrast}, {"saturation", p.saturation},
                        {"hue", p.hue}};
        }
        Json operator()(const CutMixParams& p) const {
            return Json{{"window", trajectory_json(p.window)}, {"partner", p.partner}};
        }
    };
    return std::visit(Visitor{}, params);
}

TransformParams params_from_json(TransformKind kind, const Json& j) {
    switch (kind) {
        case TransformKind::identity: return IdentityParams{};
        case TransformKind::sliding_window: return SlidingWindowParams{trajectory_from(j.at("window"))};
        case TransformKind::zoom_in_out:
            return ZoomParams{parse_direction(j.at("direction").get<std::string>()), j.at("start_fraction").get<double>(),
                              j.at("end_fraction").get<double>()};
        case TransformKind::fade_in_out: return FadeParams{parse_direction(j.at("direction").get<std::string>())};
        case TransformKind::affine:
            return AffineParams{j.at("angle_deg").get<double>(), j.at("translate_x").get<double>(),
                                j.at("translate_y").get<double>(), j.at("scale").get<double>(),
                                j.at("shear_deg").get<double>()};
        case TransformKind::perspective: {
            PerspectiveParams p;
            p.distortion = j.at("distortion").get<double>();
            const Json& c = j.at("corner_offsets");
            if (!c.is_array() || c.size() != 4) throw Error(ErrorCode::invalid_config, "four corner offsets required");
            for (int k = 0; k < 4; ++k) p.corner_offsets[k] = {c[k][0].get<double>(), c[k][1].get<double>()};
            return p;
        }
        case TransformKind::color_jitter:
            return ColorJitterParams{j.at("brightness").get<double>(), j.at("contrast").get<double>(),
                                     j.at("saturation").get<double>(), j.at("hue").get<double>()};
        case TransformKind::cutmix: return CutMixParams{trajectory_from(j.at("window")), j.at("partner").get<int>()};
    }
    throw Error(ErrorCode::invalid_config, "unknown transform kind");
}

Json to_json(const ParamRanges& r) {
    return Json{{"window_fraction", r.window_fraction},
                {"max_step_fraction", r.max_step_fraction},
                {"zoom_start", range_json(r.zoom_start)},
                {"zoom_end", range_json(r.zoom_end)},
                {"affine_angle", range_json(r.affine_angle)},
                {"affine_translate", range_json(r.affine_translate)},
                {"affine_scale", range_json(r.affine_scale)},
                {"affine_shear", range_json(r.affine_shear)},
                {"perspective_distortion", r.perspective_distortion},
                {"brightness", range_json(r.brightness)},
                {"contrast", range_json(r.contrast)},
                {"saturation", range_json(r.saturation)},
                {"hue", range_json(r.hue)}};
}

ParamRanges ranges_from_json(const Json& j, ParamRanges r) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "ranges must be an object");
    read_value(j, "window_fraction", r.window_fraction);
    read_value(j, "max_step_fraction", r.max_step_fraction);
    read_range(j, "zoom_start", r.zoom_start);
    read_range(j, "zoom_end", r.zoom_end);
    read_range(j, "affine_angle", r.affine_angle);
    read_range(j, "affine_translate", r.affine_translate);
    read_range(j, "affine_scale", r.affine_scale);
    read_range(j, "affine_shear", r.affine_shear);
    read_value(j, "perspective_distortion", r.perspective_distortion);
    read_range(j, "brightness", r.brightness);
    read_range(j, "contrast", r.contrast);
    read_range(j, "saturation", r.saturation);
    read_range(j, "hue", r.hue);
    return r;
}

Json to_json(const TransformSet& set) {
    Json kinds = Json::array(), weights = Json::array();
    for (auto k : set.kinds) kinds.push_back(std::string(to_string(k)));
    for (double w : set.weights) weights.push_back(w);
    return Json{{"kinds", kinds}, {"weights", weights}};
}

TransformSet transform_set_from_json(const Json& j) {
    std::vector<TransformKind> kinds;
    for (const auto& k : j.at("kinds")) kinds.push_back(parse_transform_kind(k.get<std::string>()));
    TransformSet set = TransformSet::uniform(kinds);
    if (j.contains("weights")) set.weights = j.at("weights").get<std::vector<double>>();
    return set;
}

Json to_json(const ClipRecipe& r) {
    return Json{{"seed", r.seed},
                {"source_count", r.source_count},
                {"source_index", r.source_index},
                {"partner_index", r.partner_index ? Json(*r.partner_index) : Json(nullptr)},
                {"kind", std::string(to_string(r.kind))},
                {"params", to_json(r.params)},
                {"frames", r.frames}};
}

ClipRecipe recipe_from_json(const Json& j) {
    ClipRecipe r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.source_count = j.at("source_count").get<std::size_t>();
    r.source_index = j.at("source_index").get<std::size_t>();
    if (!j.at("partner_index").is_null()) r.partner_index = j.at("partner_index").get<std::size_t>();
    r.kind = parse_transform_kind(j.at("kind").get<std::string>());
    r.params = params_from_json(r.kind, j.at("params"));
    r.frames = j.at("frames").get<int>();
    return r;
}

}  // namespace pmv
