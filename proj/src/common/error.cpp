#include "common/error.hpp"

namespace egan {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kDegenerate: return "degenerate-data error";
    case ErrorKind::kSingular: return "singularity error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kDivergence: return "training divergence";
  }
  return "unknown error";
}

}  // namespace egan
