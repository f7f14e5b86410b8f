#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

/// One observed device communication.
struct PacketRecord {
    double timestamp = 0.0;  ///< seconds since trace epoch, >= 0
    std::string device_id;
    std::string device_type;
    std::optional<uint64_t> payload_size;

    bool operator==(const PacketRecord&) const = default;
};

/// Repeating inter-packet separation signature of a device type.
struct DeviceProfile {
    std::string device_type;
    std::vector<double> gap_cycle;    ///< seconds, all > 0
    double jitter_fraction = 0.01;    ///< relative jitter per gap, in [0, 1)
};

/// A packet trace sorted by timestamp.
///
/// `duration` is the generation horizon (synthetic traces) or the last
/// timestamp (parsed traces); it is informational and not part of the CSV
/// serialization, so trace identity is defined by `records`.
struct TraceSet {
    std::vector<PacketRecord> records;
    double duration = 0.0;
    std::string epoch;  ///< absolute origin, informational
};

/// Parses the canonical trace CSV: header
/// `timestamp_s,device_id,device_type[,payload_size]`, one record per row.
/// Records are returned sorted by timestamp regardless of row order.
/// Throws ParseError naming the offending 1-based line.
TraceSet parse_trace(std::string_view csv_text);

/// Serializes to the canonical CSV. Timestamps render with at least six
/// decimal places and always parse back to the identical double.
std::string serialize_trace(const TraceSet& trace);

/// The built-in device-type timing signatures (17 profiles over 16 types;
/// TPLink_Smartplug ships two variants).
std::vector<DeviceProfile> builtin_profiles();

/// Profiles filtered to the given device types, in catalog order. Throws
/// ConfigError for unknown types. An empty filter returns everything.
std::vector<DeviceProfile> select_profiles(const std::vector<std::string>& device_types);

/// Generates a synthetic trace: per device instance, packets separated by the
/// profile's gap cycle, each gap scaled by (1 + u) with u uniform in
/// [-jitter, +jitter], starting at a random phase in [0, first gap).
/// Deterministic for a fixed seed. Multiple profiles with the same type act
/// as variants: instance i of a type uses variant i mod #variants.
TraceSet synth_trace(const std::vector<DeviceProfile>& profiles,
                     const std::map<std::string, int>& device_counts,
                     double duration,
                     uint64_t seed);

/// Caps each device at roughly `max_per_device` records by keeping randomly
/// chosen contiguous runs of `run_length` records, preserving the timing
/// signature inside every kept run. `max_per_device` 0 disables the cap.
TraceSet balance_trace(const TraceSet& trace,
                       size_t max_per_device,
                       size_t run_length,
                       uint64_t seed);

/// Sorted unique device ids / types appearing in a trace.
std::vector<std::string> device_ids(const TraceSet& trace);
std::vector<std::string> device_types(const TraceSet& trace);

}  // namespace ledgerprint
