#include "ledgerprint/obfuscate.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/kv_config.hpp"
#include "ledgerprint/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace ledgerprint {

void validate(const ObfuscationConfig& config) {
    if (config.max_delay < 0.0) {
        throw ConfigError("obfuscation: max_delay must be >= 0");
    }
    if (config.devices_per_ledger < 1) {
        throw ConfigError("obfuscation: devices_per_ledger must be >= 1");
    }
    if (config.packets_per_transaction < 1) {
        throw ConfigError("obfuscation: packets_per_transaction must be >= 1");
    }
}

TraceSet delay_transform(const TraceSet& trace, double max_delay, uint64_t seed) {
    if (max_delay < 0.0) {
        throw ConfigError("delay_transform: max_delay must be >= 0");
    }
    if (max_delay == 0.0) {
        return trace;
    }
    TraceSet out = trace;
    Rng rng(derive_seed(seed, "delay"));
    double last = 0.0;
    for (PacketRecord& rec : out.records) {
        rec.timestamp += rng.uniform() * max_delay;
        last = std::max(last, rec.timestamp);
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    out.duration = std::max(trace.duration, last);
    return out;
}

std::map<std::string, std::string> assign_multi_device(
    const std::vector<std::string>& device_ids, int k, uint64_t seed) {
    if (device_ids.empty()) {
        throw ConfigError("assign_multi_device: empty device list");
    }
    if (k < 1) {
        throw ConfigError("assign_multi_device: devices_per_ledger must be >= 1");
    }
    std::vector<std::string> ids(device_ids);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ConfigError("assign_multi_device: duplicate device id");
    }

    Rng rng(derive_seed(seed, "assign"));
    rng.shuffle(ids);

    std::map<std::string, std::string> assignment;
    for (size_t i = 0; i < ids.size(); ++i) {
        char ledger[32];
        std::snprintf(ledger, sizeof(ledger), "ledger-%05zu", i / static_cast<size_t>(k));
        assignment[ids[i]] = ledger;
    }
    return assignment;
}

TraceSet consolidate_packets(const TraceSet& trace, int n) {
    if (n < 1) {
        throw ConfigError("consolidate_packets: packets_per_transaction must be >= 1");
    }
    if (n == 1) {
        return trace;
    }

    std::map<std::string, std::vector<const PacketRecord*>> by_device;
    for (const PacketRecord& rec : trace.records) {
        by_device[rec.device_id].push_back(&rec);
    }

    TraceSet out;
    out.duration = trace.duration;
    out.epoch = trace.epoch;
    const size_t run = static_cast<size_t>(n);
    for (const auto& [device, recs] : by_device) {
        for (size_t begin = 0; begin < recs.size(); begin += run) {
            const size_t end = std::min(begin + run, recs.size());
            PacketRecord merged = *recs[begin];
            uint64_t payload = 0;
            bool any_payload = false;
            for (size_t i = begin; i < end; ++i) {
                if (recs[i]->payload_size) {
                    payload += *recs[i]->payload_size;
                    any_payload = true;
                }
            }
            merged.payload_size = any_payload ? std::optional<uint64_t>(payload) : std::nullopt;
            out.records.push_back(std::move(merged));
        }
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return out;
}

ObfuscationResult apply_obfuscation(const ObfuscationConfig& config,
                                    const TraceSet& trace,
                                    const std::vector<std::string>& devices) {
    validate(config);
    ObfuscationResult result;
    result.trace = consolidate_packets(trace, config.packets_per_transaction);
    result.trace = delay_transform(result.trace, config.max_delay,
                                   derive_seed(config.seed, "stage-delay"));
    result.assignment = assign_multi_device(devices, config.devices_per_ledger,
                                            derive_seed(config.seed, "stage-assign"));
    return result;
}

ObfuscationConfig parse_obfuscation_config(std::string_view text) {
    const KvConfig kv = KvConfig::parse(text);
    ObfuscationConfig config;
    config.max_delay = kv.get_double("max_delay_s", config.max_delay);
    config.devices_per_ledger =
        static_cast<int>(kv.get_int("devices_per_ledger", config.devices_per_ledger));
    config.packets_per_transaction =
        static_cast<int>(kv.get_int("packets_per_transaction", config.packets_per_transaction));
    config.seed = kv.get_uint("seed", config.seed);
    validate(config);
    return config;
}

}  // namespace ledgerprint
