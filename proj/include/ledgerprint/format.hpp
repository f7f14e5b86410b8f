#pragma once

#include <string>

namespace ledgerprint {

/// Canonical decimal rendering of a non-negative seconds value.
///
/// Fixed-point with at least 6 decimal places, extended (up to 17) until the
/// printed text parses back to the exact same double. Every serialized
/// timestamp and every hashed transaction preimage uses this rendering, so
/// round-trips are lossless and hashes are reproducible across
/// implementations that follow the same rule.
std::string canonical_seconds(double value);

}  // namespace ledgerprint
