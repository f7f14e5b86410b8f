#include "ledgerprint/ledger.hpp"

#include "ledgerprint/errors.hpp"
#include "ledgerprint/format.hpp"
#include "ledgerprint/sha256.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace ledgerprint {

using ordered_json = nlohmann::ordered_json;

std::string SimulatedSigner::sign(std::string_view pk, std::string_view content) const {
    std::string buf;
    buf.reserve(pk.size() + 1 + content.size());
    buf.append(pk);
    buf.push_back('|');
    buf.append(content);
    return sha256_hex(buf);
}

std::string derive_pk(uint64_t key_seed, std::string_view device_id, uint64_t counter) {
    std::string buf = "pk|";
    buf += std::to_string(key_seed);
    buf.push_back('|');
    buf.append(device_id);
    buf.push_back('|');
    buf += std::to_string(counter);
    return sha256_hex(buf);
}

std::string transaction_content(const Transaction& tx) {
    std::string buf;
    buf.reserve(200);
    buf += tx.p_t_id;
    buf.push_back('|');
    buf += canonical_seconds(tx.timestamp);
    buf.push_back('|');
    buf += tx.output;
    buf.push_back('|');
    buf += tx.pk;
    return buf;
}

std::vector<LedgerChain> populate(const TraceSet& trace,
                                  const std::map<std::string, std::string>& assignment,
                                  uint64_t key_seed,
                                  const Signer& signer) {
    std::map<std::string, std::vector<const PacketRecord*>> by_ledger;
    for (const PacketRecord& rec : trace.records) {
        const auto it = assignment.find(rec.device_id);
        if (it == assignment.end()) {
            throw ConfigError("populate: device '" + rec.device_id + "' has no ledger assignment");
        }
        by_ledger[it->second].push_back(&rec);
    }

    std::map<std::string, uint64_t> counters;
    std::vector<LedgerChain> chains;
    chains.reserve(by_ledger.size());
    for (const auto& [ledger_id, records] : by_ledger) {
        LedgerChain chain;
        chain.ledger_id = ledger_id;
        chain.transactions.reserve(records.size());
        std::string prev = genesis_marker();
        for (const PacketRecord* rec : records) {
            const uint64_t counter = counters[rec->device_id]++;
            Transaction tx;
            tx.p_t_id = prev;
            tx.timestamp = rec->timestamp;
            tx.pk = derive_pk(key_seed, rec->device_id, counter);
            tx.output = sha256_hex(derive_pk(key_seed, rec->device_id, counter + 1));
            const std::string content = transaction_content(tx);
            tx.sign = signer.sign(tx.pk, content);
            tx.t_id = sha256_hex(content + "|" + tx.sign);
            tx.true_device_id = rec->device_id;
            tx.true_device_type = rec->device_type;
            prev = tx.t_id;
            chain.transactions.push_back(std::move(tx));
        }
        chain.member_devices.clear();
        for (const auto& [device, ledger] : assignment) {
            if (ledger == ledger_id) {
                chain.member_devices.insert(device);
            }
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

bool verify_chain(const LedgerChain& chain) {
    std::string prev = genesis_marker();
    double last_ts = -1.0;
    for (const Transaction& tx : chain.transactions) {
        if (tx.p_t_id != prev) {
            return false;
        }
        const std::string recomputed = sha256_hex(transaction_content(tx) + "|" + tx.sign);
        if (recomputed != tx.t_id) {
            return false;
        }
        if (tx.timestamp < last_ts) {
            return false;
        }
        last_ts = tx.timestamp;
        prev = tx.t_id;
    }
    return true;
}

std::vector<Block> form_blocks(const std::vector<LedgerChain>& chains, size_t blocksize) {
    if (blocksize == 0) {
        throw ConfigError("form_blocks: blocksize must be >= 1");
    }
    std::vector<const Transaction*> stream;
    for (const LedgerChain& chain : chains) {
        for (const Transaction& tx : chain.transactions) {
            stream.push_back(&tx);
        }
    }
    std::sort(stream.begin(), stream.end(), [](const Transaction* a, const Transaction* b) {
        if (a->timestamp != b->timestamp) {
            return a->timestamp < b->timestamp;
        }
        return a->t_id < b->t_id;
    });

    std::vector<Block> blocks;
    std::string prev = genesis_marker();
    for (size_t begin = 0; begin < stream.size(); begin += blocksize) {
        const size_t end = std::min(begin + blocksize, stream.size());
        Block block;
        block.prev_block_id = prev;
        std::string preimage = prev;
        for (size_t i = begin; i < end; ++i) {
            block.transactions.push_back(*stream[i]);
            preimage.push_back('|');
            preimage += stream[i]->t_id;
        }
        block.block_id = sha256_hex(preimage);
        prev = block.block_id;
        blocks.push_back(std::move(block));
    }
    return blocks;
}

bool verify_blocks(const std::vector<Block>& blocks) {
    std::string prev = genesis_marker();
    for (const Block& block : blocks) {
        if (block.prev_block_id != prev) {
            return false;
        }
        std::string preimage = block.prev_block_id;
        for (const Transaction& tx : block.transactions) {
            preimage.push_back('|');
            preimage += tx.t_id;
        }
        if (sha256_hex(preimage) != block.block_id) {
            return false;
        }
        prev = block.block_id;
    }
    return true;
}

std::string export_ledger(const std::vector<LedgerChain>& chains) {
    std::string out;
    for (const LedgerChain& chain : chains) {
        for (const Transaction& tx : chain.transactions) {
            ordered_json j;
            j["t_id"] = tx.t_id;
            j["p_t_id"] = tx.p_t_id;
            j["ledger_id"] = chain.ledger_id;
            j["timestamp"] = tx.timestamp;
            j["output"] = tx.output;
            j["pk"] = tx.pk;
            j["sign"] = tx.sign;
            out += j.dump();
            out.push_back('\n');
        }
    }
    return out;
}

std::vector<LedgerChain> import_ledger(std::string_view jsonl) {
    std::vector<LedgerChain> chains;
    std::map<std::string, size_t> index_of;

    detail::for_each_line(jsonl, [&](size_t line_no, std::string_view line) {
        if (line.empty()) {
            return;
        }
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": bad JSON: " + e.what());
        }
        static const char* kFields[] = {"t_id", "p_t_id", "ledger_id", "output", "pk", "sign"};
        for (const char* field : kFields) {
            if (!j.contains(field) || !j[field].is_string()) {
                throw ParseError("line " + std::to_string(line_no) + ": missing string field '" +
                                 std::string(field) + "'");
            }
        }
        if (!j.contains("timestamp") || !j["timestamp"].is_number()) {
            throw ParseError("line " + std::to_string(line_no) + ": missing numeric timestamp");
        }

        Transaction tx;
        tx.t_id = j["t_id"].get<std::string>();
        tx.p_t_id = j["p_t_id"].get<std::string>();
        tx.timestamp = j["timestamp"].get<double>();
        tx.output = j["output"].get<std::string>();
        tx.pk = j["pk"].get<std::string>();
        tx.sign = j["sign"].get<std::string>();

        const std::string ledger_id = j["ledger_id"].get<std::string>();
        auto [it, inserted] = index_of.try_emplace(ledger_id, chains.size());
        if (inserted) {
            chains.push_back(LedgerChain{ledger_id, {}, {}});
        }
        chains[it->second].transactions.push_back(std::move(tx));
    });
    return chains;
}

std::string export_labels(const std::vector<LedgerChain>& chains) {
    std::string out = "t_id,device_id,device_type\n";
    for (const LedgerChain& chain : chains) {
        for (const Transaction& tx : chain.transactions) {
            out += tx.t_id;
            out.push_back(',');
            out += tx.true_device_id;
            out.push_back(',');
            out += tx.true_device_type;
            out.push_back('\n');
        }
    }
    return out;
}

std::map<std::string, std::string> parse_labels(std::string_view csv_text) {
    std::map<std::string, std::string> labels;
    bool saw_header = false;
    detail::for_each_line(csv_text, [&](size_t line_no, std::string_view line) {
        if (line.empty()) {
            return;
        }
        if (!saw_header) {
            if (line != "t_id,device_id,device_type") {
                throw ParseError("line 1: expected labels header 't_id,device_id,device_type'");
            }
            saw_header = true;
            return;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 columns");
        }
        labels[std::string(fields[0])] = std::string(fields[2]);
    });
    if (!saw_header) {
        throw ParseError("line 1: empty labels input, header missing");
    }
    return labels;
}

std::map<std::string, std::string> labels_from_chains(const std::vector<LedgerChain>& chains) {
    std::map<std::string, std::string> labels;
    for (const LedgerChain& chain : chains) {
        for (const Transaction& tx : chain.transactions) {
            labels[tx.t_id] = tx.true_device_type;
        }
    }
    return labels;
}

}  // namespace ledgerprint
