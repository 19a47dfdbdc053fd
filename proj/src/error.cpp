#include "gap/error.hpp"

namespace gap {

DecodeError::DecodeError(const std::string& what, std::size_t offset)
    : DataError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

SchemaVersionError::SchemaVersionError(int found, int expected)
    : SchemaError("unsupported schema_version " + std::to_string(found) + " (expected " +
                  std::to_string(expected) + ")"),
      found_(found) {}

DivergenceError::DivergenceError(int epoch)
    : DataError("training diverged: non-finite loss in epoch " + std::to_string(epoch)),
      epoch_(epoch) {}

TransportError::TransportError(const std::string& url, int status)
    : NetworkError(status == 0 ? "request failed: " + url
                               : "HTTP " + std::to_string(status) + " from " + url),
      status_(status) {}

}  // namespace gap
