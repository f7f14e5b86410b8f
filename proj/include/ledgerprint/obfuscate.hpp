#pragma once

#include "ledgerprint/trace.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

/// Parameters of the three timestamp-obfuscation defenses.
struct ObfuscationConfig {
    double max_delay = 0.0;           ///< seconds, >= 0; 0 = no delay
    int devices_per_ledger = 1;       ///< k >= 1; 1 = one ledger per device
    int packets_per_transaction = 1;  ///< n >= 1; 1 = one packet per transaction
    uint64_t seed = 0;
};

/// Adds an independent uniform delay in [0, max_delay] to every record and
/// re-sorts; record order may change. max_delay 0 returns the trace unchanged.
TraceSet delay_transform(const TraceSet& trace, double max_delay, uint64_t seed);

/// Randomly partitions devices into groups of k (last group may be smaller),
/// one fresh ledger id per group. Device ids must be unique and non-empty.
std::map<std::string, std::string> assign_multi_device(
    const std::vector<std::string>& device_ids, int k, uint64_t seed);

/// Per device, collapses consecutive runs of n packets into one record that
/// keeps the first packet's timestamp (a trailing shorter run still collapses
/// to one record). n of 1 returns the trace unchanged.
TraceSet consolidate_packets(const TraceSet& trace, int n);

struct ObfuscationResult {
    TraceSet trace;
    std::map<std::string, std::string> assignment;  ///< device_id -> ledger_id
};

/// Applies the full composition: consolidate, then delay, then assign devices
/// to ledgers. Deterministic per config seed.
ObfuscationResult apply_obfuscation(const ObfuscationConfig& config,
                                    const TraceSet& trace,
                                    const std::vector<std::string>& devices);

/// Reads a flat key-value (TOML-style) config:
/// max_delay_s, devices_per_ledger, packets_per_transaction, seed.
ObfuscationConfig parse_obfuscation_config(std::string_view text);

void validate(const ObfuscationConfig& config);

}  // namespace ledgerprint
