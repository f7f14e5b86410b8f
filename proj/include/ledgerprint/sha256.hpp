#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ledgerprint {

/// FIPS 180-4 SHA-256 of an arbitrary byte string.
std::array<uint8_t, 32> sha256_bytes(std::string_view data);

/// SHA-256 digest as 64 lowercase hex characters.
std::string sha256_hex(std::string_view data);

}  // namespace ledgerprint
