#include "common/error.hpp"

namespace slicereview {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSnapshot: return "snapshot";
    case ErrorCode::kDiffParse: return "diff_parse";
    case ErrorCode::kSourceParse: return "source_parse";
    case ErrorCode::kRenderParse: return "render_parse";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kCommentParse: return "comment_parse";
    case ErrorCode::kDataset: return "dataset";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace slicereview
