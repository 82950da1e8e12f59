#pragma once

#include <cstdint>
#include <string>

namespace nonlocal {

/// Hex SHA-256 digest of a byte string.
std::string sha256_hex(const std::string& data);

}  // namespace nonlocal
