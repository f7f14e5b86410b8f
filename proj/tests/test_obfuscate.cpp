#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ledgerprint/errors.hpp"
#include "ledgerprint/obfuscate.hpp"
#include "ledgerprint/rng.hpp"
#include "ledgerprint/trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace ledgerprint;

namespace {

TraceSet make_trace(std::vector<std::pair<double, std::string>> stamps) {
    TraceSet trace;
    for (auto& [ts, dev] : stamps) {
        trace.records.push_back({ts, dev, "type_" + dev, std::nullopt});
    }
    std::stable_sort(trace.records.begin(), trace.records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    trace.duration = trace.records.empty() ? 0.0 : trace.records.back().timestamp;
    return trace;
}

TraceSet random_trace(uint64_t seed, size_t n, size_t n_devices) {
    Rng rng(seed);
    std::vector<std::pair<double, std::string>> stamps;
    for (size_t i = 0; i < n; ++i) {
        stamps.emplace_back(rng.uniform(0.0, 1000.0), "d" + std::to_string(rng.below(n_devices)));
    }
    return make_trace(std::move(stamps));
}

std::vector<double> device_stamps(const TraceSet& trace, const std::string& device) {
    std::vector<double> out;
    for (const auto& rec : trace.records) {
        if (rec.device_id == device) {
            out.push_back(rec.timestamp);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("delay_transform with zero delay is the identity") {
    const auto trace = random_trace(3, 50, 4);
    const auto out = delay_transform(trace, 0.0, 99);
    CHECK(out.records == trace.records);
    CHECK(out.duration == trace.duration);
}

TEST_CASE("delay_transform bounds every shift by max_delay") {
    // Order statistics: sorted delayed stamps sit between the sorted
    // originals and the originals plus max_delay.
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto trace = random_trace(seed, 300, 5);
        for (double max_delay : {0.5, 2.0, 30.0}) {
            const auto out = delay_transform(trace, max_delay, seed * 7 + 1);
            REQUIRE(out.records.size() == trace.records.size());
            CHECK(std::is_sorted(out.records.begin(), out.records.end(),
                                 [](const PacketRecord& a, const PacketRecord& b) {
                                     return a.timestamp < b.timestamp;
                                 }));
            for (size_t i = 0; i < out.records.size(); ++i) {
                CHECK(out.records[i].timestamp >= trace.records[i].timestamp - 1e-12);
                CHECK(out.records[i].timestamp <= trace.records[i].timestamp + max_delay + 1e-12);
            }
        }
    }
}

TEST_CASE("delay_transform can invert close records") {
    const auto trace = make_trace({{1.0, "a"}, {1.1, "b"}});
    size_t inversions = 0;
    for (uint64_t seed = 0; seed < 1000; ++seed) {
        const auto out = delay_transform(trace, 2.0, seed);
        if (out.records.front().device_id == "b") {
            ++inversions;
        }
    }
    CHECK(inversions >= 1);
    // Sanity: not every seed inverts either.
    CHECK(inversions < 1000);
}

TEST_CASE("delay_transform is deterministic and rejects negative delay") {
    const auto trace = random_trace(5, 40, 3);
    const auto a = delay_transform(trace, 2.0, 123);
    const auto b = delay_transform(trace, 2.0, 123);
    CHECK(a.records == b.records);
    CHECK_THROWS_AS(delay_transform(trace, -0.1, 1), ConfigError);
}

TEST_CASE("assign_multi_device partitions devices into ledgers") {
    const std::vector<std::string> five{"a", "b", "c", "d", "e"};

    SUBCASE("k=1 gives every device its own ledger") {
        const auto assignment = assign_multi_device(five, 1, 3);
        std::set<std::string> ledgers;
        for (const auto& [device, ledger] : assignment) {
            ledgers.insert(ledger);
        }
        CHECK(assignment.size() == 5);
        CHECK(ledgers.size() == 5);
    }

    SUBCASE("k equal to the device count gives one ledger") {
        std::vector<std::string> many;
        for (int i = 0; i < 17; ++i) {
            many.push_back("dev" + std::to_string(i));
        }
        const auto assignment = assign_multi_device(many, 17, 3);
        std::set<std::string> ledgers;
        for (const auto& [device, ledger] : assignment) {
            ledgers.insert(ledger);
        }
        CHECK(ledgers.size() == 1);
    }

    SUBCASE("5 devices, k=2 gives group sizes 2,2,1") {
        const auto assignment = assign_multi_device(five, 2, 3);
        std::map<std::string, int> sizes;
        for (const auto& [device, ledger] : assignment) {
            ++sizes[ledger];
        }
        std::multiset<int> got;
        for (const auto& [ledger, size] : sizes) {
            got.insert(size);
        }
        CHECK(got == std::multiset<int>{1, 2, 2});
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(assign_multi_device({}, 2, 1), ConfigError);
        CHECK_THROWS_AS(assign_multi_device(five, 0, 1), ConfigError);
        CHECK_THROWS_AS(assign_multi_device({"a", "a"}, 1, 1), ConfigError);
    }

    SUBCASE("partition property on random sizes") {
        Rng rng(42);
        for (int round = 0; round < 25; ++round) {
            const size_t m = 1 + rng.below(40);
            const int k = 1 + static_cast<int>(rng.below(20));
            std::vector<std::string> ids;
            for (size_t i = 0; i < m; ++i) {
                ids.push_back("dev" + std::to_string(i));
            }
            const auto assignment = assign_multi_device(ids, k, rng.next());
            CHECK(assignment.size() == m);
            std::map<std::string, size_t> sizes;
            for (const auto& [device, ledger] : assignment) {
                ++sizes[ledger];
            }
            size_t total = 0;
            size_t smalls = 0;
            for (const auto& [ledger, size] : sizes) {
                total += size;
                if (size < static_cast<size_t>(k)) {
                    ++smalls;
                    CHECK(size == m % static_cast<size_t>(k));
                }
            }
            CHECK(total == m);
            CHECK(smalls <= 1);
        }
    }
}

TEST_CASE("consolidate_packets collapses runs per device") {
    SUBCASE("n=1 is the identity") {
        const auto trace = random_trace(9, 60, 4);
        CHECK(consolidate_packets(trace, 1).records == trace.records);
    }

    SUBCASE("pairs collapse to the first timestamp") {
        const auto trace = make_trace({{0.0, "d"}, {0.2, "d"}, {58.0, "d"}, {58.2, "d"}});
        const auto out = consolidate_packets(trace, 2);
        CHECK(device_stamps(out, "d") == std::vector<double>{0.0, 58.0});
    }

    SUBCASE("trailing short run still collapses") {
        const auto trace = make_trace({{0.0, "d"}, {0.2, "d"}, {58.0, "d"}});
        const auto out = consolidate_packets(trace, 2);
        CHECK(device_stamps(out, "d") == std::vector<double>{0.0, 58.0});
    }

    SUBCASE("count per device is ceil(m/n)") {
        Rng rng(4);
        for (int round = 0; round < 20; ++round) {
            const auto trace = random_trace(rng.next(), 120, 5);
            const int n = 1 + static_cast<int>(rng.below(6));
            const auto out = consolidate_packets(trace, n);
            std::map<std::string, size_t> before, after;
            for (const auto& rec : trace.records) {
                ++before[rec.device_id];
            }
            for (const auto& rec : out.records) {
                ++after[rec.device_id];
            }
            for (const auto& [device, m] : before) {
                CHECK(after.at(device) == (m + n - 1) / static_cast<size_t>(n));
            }
            CHECK(std::is_sorted(out.records.begin(), out.records.end(),
                                 [](const PacketRecord& a, const PacketRecord& b) {
                                     return a.timestamp < b.timestamp;
                                 }));
        }
    }

    SUBCASE("payload sizes accumulate") {
        TraceSet trace;
        trace.records = {{0.0, "d", "t", 10}, {1.0, "d", "t", std::nullopt}, {2.0, "d", "t", 5}};
        trace.duration = 2.0;
        const auto out = consolidate_packets(trace, 3);
        REQUIRE(out.records.size() == 1);
        CHECK(out.records[0].payload_size == 15);
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(consolidate_packets(random_trace(1, 5, 1), 0), ConfigError);
    }
}

TEST_CASE("apply_obfuscation composes the three transforms") {
    const auto trace = random_trace(21, 200, 6);
    const auto devices = device_ids(trace);

    SUBCASE("identity config is a bit-exact passthrough") {
        const ObfuscationConfig identity{0.0, 1, 1, 77};
        const auto result = apply_obfuscation(identity, trace, devices);
        CHECK(result.trace.records == trace.records);
        CHECK(result.assignment.size() == devices.size());
        std::set<std::string> ledgers;
        for (const auto& [device, ledger] : result.assignment) {
            ledgers.insert(ledger);
        }
        CHECK(ledgers.size() == devices.size());
    }

    SUBCASE("deterministic per seed") {
        const ObfuscationConfig config{2.0, 2, 3, 55};
        const auto a = apply_obfuscation(config, trace, devices);
        const auto b = apply_obfuscation(config, trace, devices);
        CHECK(a.trace.records == b.trace.records);
        CHECK(a.assignment == b.assignment);
    }

    SUBCASE("consolidation happens before delay") {
        // With n=4 and a huge delay, per-device counts still equal ceil(m/4).
        const ObfuscationConfig config{30.0, 1, 4, 9};
        const auto result = apply_obfuscation(config, trace, devices);
        std::map<std::string, size_t> before, after;
        for (const auto& rec : trace.records) {
            ++before[rec.device_id];
        }
        for (const auto& rec : result.trace.records) {
            ++after[rec.device_id];
        }
        for (const auto& [device, m] : before) {
            CHECK(after.at(device) == (m + 3) / 4);
        }
    }
}

TEST_CASE("parse_obfuscation_config reads the flat key-value format") {
    const auto config = parse_obfuscation_config(
        "# defense settings\n"
        "max_delay_s = 30.0\n"
        "devices_per_ledger = 17\n"
        "packets_per_transaction = 3\n"
        "seed = 99\n");
    CHECK(config.max_delay == 30.0);
    CHECK(config.devices_per_ledger == 17);
    CHECK(config.packets_per_transaction == 3);
    CHECK(config.seed == 99);

    CHECK_THROWS_AS(parse_obfuscation_config("max_delay_s = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_obfuscation_config("devices_per_ledger = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_obfuscation_config("max_delay_s ="), ParseError);
}
