#include "ledgerprint/trace.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/format.hpp"
#include "ledgerprint/rng.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace ledgerprint {

namespace {

constexpr std::string_view kHeader3 = "timestamp_s,device_id,device_type";
constexpr std::string_view kHeader4 = "timestamp_s,device_id,device_type,payload_size";

void sort_records(std::vector<PacketRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
}

void validate_profile(const DeviceProfile& profile) {
    if (profile.device_type.empty()) {
        throw ConfigError("device profile with empty device_type");
    }
    if (profile.gap_cycle.empty()) {
        throw ConfigError("profile '" + profile.device_type + "': empty gap_cycle");
    }
    for (double gap : profile.gap_cycle) {
        if (!(gap > 0.0)) {
            throw ConfigError("profile '" + profile.device_type + "': non-positive gap");
        }
    }
    if (profile.jitter_fraction < 0.0 || profile.jitter_fraction >= 1.0) {
        throw ConfigError("profile '" + profile.device_type + "': jitter_fraction outside [0, 1)");
    }
}

}  // namespace

TraceSet parse_trace(std::string_view csv_text) {
    TraceSet trace;
    bool saw_header = false;
    bool has_payload_column = false;

    detail::for_each_line(csv_text, [&](size_t line_no, std::string_view line) {
        if (line.empty()) {
            return;
        }
        if (!saw_header) {
            if (line == kHeader3) {
                has_payload_column = false;
            } else if (line == kHeader4) {
                has_payload_column = true;
            } else {
                throw ParseError("line 1: expected trace header '" + std::string(kHeader3) +
                                 "[,payload_size]', got '" + std::string(line) + "'");
            }
            saw_header = true;
            return;
        }

        const auto fields = detail::split(line, ',');
        const size_t expected = has_payload_column ? 4 : 3;
        if (fields.size() != expected) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(expected) + " columns, got " +
                             std::to_string(fields.size()));
        }
        const auto ts = detail::parse_double(fields[0]);
        if (!ts) {
            throw ParseError("line " + std::to_string(line_no) + ": non-numeric timestamp '" +
                             std::string(fields[0]) + "'");
        }
        if (*ts < 0.0) {
            throw ParseError("line " + std::to_string(line_no) + ": negative timestamp");
        }
        if (fields[2].empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty device_type");
        }
        PacketRecord rec;
        rec.timestamp = *ts;
        rec.device_id = std::string(fields[1]);
        rec.device_type = std::string(fields[2]);
        if (has_payload_column && !fields[3].empty()) {
            const auto payload = detail::parse_uint(fields[3]);
            if (!payload) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": payload_size is not a non-negative integer");
            }
            rec.payload_size = *payload;
        }
        trace.records.push_back(std::move(rec));
    });

    if (!saw_header) {
        throw ParseError("line 1: empty trace input, header missing");
    }
    sort_records(trace.records);
    trace.duration = trace.records.empty() ? 0.0 : trace.records.back().timestamp;
    return trace;
}

std::string serialize_trace(const TraceSet& trace) {
    const bool payload = std::any_of(trace.records.begin(), trace.records.end(),
                                     [](const PacketRecord& r) { return r.payload_size.has_value(); });
    std::string out(payload ? kHeader4 : kHeader3);
    out.push_back('\n');
    for (const PacketRecord& rec : trace.records) {
        out += canonical_seconds(rec.timestamp);
        out.push_back(',');
        out += rec.device_id;
        out.push_back(',');
        out += rec.device_type;
        if (payload) {
            out.push_back(',');
            if (rec.payload_size) {
                out += std::to_string(*rec.payload_size);
            }
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<DeviceProfile> builtin_profiles() {
    static const double kBurstGap = 0.00005;
    std::vector<DeviceProfile> profiles = {
        {"Smart_Things", {0.207, 58.0}, 0.01},
        {"Amazon_Echo", {0.217, 30.0, 0.004, 30.0}, 0.01},
        {"TPLink_Camera", {0.12, 61.0}, 0.01},
        {"Samsung_Camera", {0.165, 30.0}, 0.01},
        {"Drop_Camera", {1.03, 0.2}, 0.01},
        {"Insteon_Camera2",
         {kBurstGap, kBurstGap, kBurstGap, kBurstGap, kBurstGap, kBurstGap, kBurstGap, kBurstGap,
          kBurstGap, 0.216, 300.0},
         0.01},
        {"Baby_Monitor", {600.0, 0.28}, 0.01},
        {"TPLink_Smartplug", {0.24, 236.0}, 0.01},
        {"TPLink_Smartplug", {0.12, 236.0}, 0.01},
        {"iHome", {60.0, 0.205}, 0.01},
        {"Nest_Smockalarm", {0.207, 0.015}, 0.01},
        {"Netatmo_Weather", {1.72, 0.33}, 0.01},
        {"Sleep_Sensor", {10.0, 0.276}, 0.01},
        {"Lifx_Smartbulb", {1.92, 60.0}, 0.01},
        {"Triby_Speaker", {120.0, 0.3, 120.0, 0.3, 56.0, 0.3}, 0.01},
        {"Pix_Photoframe", {0.31, 65.0, 650.0}, 0.01},
        {"HP_Printer", {90.0}, 0.01},
    };
    return profiles;
}

std::vector<DeviceProfile> select_profiles(const std::vector<std::string>& device_types) {
    const auto all = builtin_profiles();
    if (device_types.empty()) {
        return all;
    }
    std::set<std::string> wanted(device_types.begin(), device_types.end());
    std::vector<DeviceProfile> out;
    for (const auto& p : all) {
        if (wanted.count(p.device_type)) {
            out.push_back(p);
        }
    }
    for (const auto& type : wanted) {
        if (std::none_of(out.begin(), out.end(),
                         [&](const DeviceProfile& p) { return p.device_type == type; })) {
            throw ConfigError("unknown device type '" + type + "'");
        }
    }
    return out;
}

TraceSet synth_trace(const std::vector<DeviceProfile>& profiles,
                     const std::map<std::string, int>& device_counts,
                     double duration,
                     uint64_t seed) {
    if (!(duration > 0.0)) {
        throw ConfigError("synth_trace: duration must be > 0");
    }
    for (const auto& profile : profiles) {
        validate_profile(profile);
    }

    TraceSet trace;
    trace.duration = duration;
    for (const auto& [type, count] : device_counts) {
        if (count < 0) {
            throw ConfigError("synth_trace: negative count for '" + type + "'");
        }
        std::vector<const DeviceProfile*> variants;
        for (const auto& profile : profiles) {
            if (profile.device_type == type) {
                variants.push_back(&profile);
            }
        }
        if (variants.empty()) {
            throw ConfigError("synth_trace: unknown device type '" + type + "'");
        }
        for (int instance = 0; instance < count; ++instance) {
            const DeviceProfile& profile = *variants[instance % variants.size()];
            char id[160];
            std::snprintf(id, sizeof(id), "%s-%02d", type.c_str(), instance);
            const std::string device_id(id);

            Rng rng(derive_seed(seed, "synth", fnv1a64(device_id)));
            double t = rng.uniform(0.0, profile.gap_cycle.front());
            size_t gap_index = 0;
            while (t <= duration) {
                trace.records.push_back({t, device_id, type, std::nullopt});
                double gap = profile.gap_cycle[gap_index % profile.gap_cycle.size()];
                gap *= 1.0 + rng.uniform(-profile.jitter_fraction, profile.jitter_fraction);
                t += gap;
                ++gap_index;
            }
        }
    }
    sort_records(trace.records);
    return trace;
}

TraceSet balance_trace(const TraceSet& trace,
                       size_t max_per_device,
                       size_t run_length,
                       uint64_t seed) {
    if (max_per_device == 0) {
        return trace;
    }
    if (run_length == 0) {
        throw ConfigError("balance_trace: run_length must be >= 1");
    }

    std::map<std::string, std::vector<const PacketRecord*>> by_device;
    for (const PacketRecord& rec : trace.records) {
        by_device[rec.device_id].push_back(&rec);
    }

    TraceSet out;
    out.duration = trace.duration;
    out.epoch = trace.epoch;
    for (const auto& [device, recs] : by_device) {
        if (recs.size() <= max_per_device) {
            for (const auto* r : recs) {
                out.records.push_back(*r);
            }
            continue;
        }
        const size_t n_runs = (recs.size() + run_length - 1) / run_length;
        const size_t keep = std::max<size_t>(1, max_per_device / run_length);

        std::vector<size_t> run_ids(n_runs);
        for (size_t i = 0; i < n_runs; ++i) {
            run_ids[i] = i;
        }
        Rng rng(derive_seed(seed, "balance", fnv1a64(device)));
        rng.shuffle(run_ids);
        run_ids.resize(std::min(keep, n_runs));
        std::sort(run_ids.begin(), run_ids.end());

        for (size_t run : run_ids) {
            const size_t begin = run * run_length;
            const size_t end = std::min(begin + run_length, recs.size());
            for (size_t i = begin; i < end; ++i) {
                out.records.push_back(*recs[i]);
            }
        }
    }
    sort_records(out.records);
    return out;
}

std::vector<std::string> device_ids(const TraceSet& trace) {
    std::set<std::string> ids;
    for (const auto& rec : trace.records) {
        ids.insert(rec.device_id);
    }
    return {ids.begin(), ids.end()};
}

std::vector<std::string> device_types(const TraceSet& trace) {
    std::set<std::string> types;
    for (const auto& rec : trace.records) {
        types.insert(rec.device_type);
    }
    return {types.begin(), types.end()};
}

}  // namespace ledgerprint
