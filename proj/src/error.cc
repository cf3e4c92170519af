#include "cctv/error.h"

namespace cctv {

char const* to_str(error_kind const k) {
  switch (k) {
    case error_kind::kProjectionOutOfRange: return "projection out of range";
    case error_kind::kUndefinedBearing: return "undefined bearing";
    case error_kind::kInvalidGeometry: return "invalid geometry";
    case error_kind::kParse: return "parse error";
    case error_kind::kIntegrity: return "integrity error";
    case error_kind::kEmptyNetwork: return "empty network";
    case error_kind::kValidation: return "validation error";
    case error_kind::kConfiguration: return "configuration error";
    case error_kind::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace cctv
