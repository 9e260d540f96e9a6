#include "pmv/error.hpp"

namespace pmv {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::source_empty: return "source empty";
        case ErrorCode::invalid_system: return "invalid system";
        case ErrorCode::invalid_source: return "invalid source";
        case ErrorCode::invalid_rect: return "invalid rect";
        case ErrorCode::degenerate_homography: return "degenerate homography";
        case ErrorCode::invalid_trajectory: return "invalid trajectory";
        case ErrorCode::missing_source: return "missing source";
        case ErrorCode::missing_clip: return "missing clip";
        case ErrorCode::shape_mismatch: return "shape mismatch";
        case ErrorCode::geometry: return "geometry";
        case ErrorCode::degenerate_ratio: return "degenerate ratio";
        case ErrorCode::insufficient_data: return "insufficient data";
        case ErrorCode::invalid_config: return "invalid config";
        case ErrorCode::io: return "io";
        case ErrorCode::corrupt_file: return "corrupt file";
    }
    return "unknown";
}

}  // namespace pmv
