#pragma once

#include "ledgerprint/trace.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

/// Predecessor marker of a ledger's first (genesis) transaction.
inline const std::string& genesis_marker() {
    static const std::string marker(64, '0');
    return marker;
}

/// One ledger entry. The attacker-visible fields are
/// t_id, p_t_id, timestamp, output, pk, sign (plus the ledger grouping);
/// true_device_id/true_device_type are ground truth kept out of every hash
/// and out of the attacker-visible serialization.
struct Transaction {
    std::string t_id;    ///< hex sha256 of content-plus-sign
    std::string p_t_id;  ///< previous t_id in the same ledger, or genesis marker
    double timestamp = 0.0;
    std::string output;  ///< hex sha256 of the device's next pk
    std::string pk;      ///< rotating per-transaction public-key token (hex)
    std::string sign;    ///< signature token (hex)
    std::string true_device_id;
    std::string true_device_type;
};

struct LedgerChain {
    std::string ledger_id;
    std::vector<Transaction> transactions;        ///< ordered by timestamp
    std::set<std::string> member_devices;         ///< ground truth, out-of-band
};

struct Block {
    std::string block_id;
    std::string prev_block_id;
    std::vector<Transaction> transactions;
};

/// Signature scheme interface. The default simulates signatures with a hash;
/// a real asymmetric signer can be substituted without touching populate().
class Signer {
public:
    virtual ~Signer() = default;
    virtual std::string sign(std::string_view pk, std::string_view content) const = 0;
};

class SimulatedSigner final : public Signer {
public:
    std::string sign(std::string_view pk, std::string_view content) const override;
};

/// Deterministic per-transaction key rotation: the pk a device uses for its
/// counter-th transaction.
std::string derive_pk(uint64_t key_seed, std::string_view device_id, uint64_t counter);

/// Canonical unsigned content: p_t_id|timestamp|output|pk with the timestamp
/// rendered by canonical_seconds(). t_id = sha256(content|sign).
std::string transaction_content(const Transaction& tx);

/// Builds one hash-chained transaction per packet record, chained per ledger
/// in timestamp order, with per-transaction key rotation derived from
/// (key_seed, device_id, counter). Throws ConfigError when a device in the
/// trace is missing from the assignment.
std::vector<LedgerChain> populate(const TraceSet& trace,
                                  const std::map<std::string, std::string>& assignment,
                                  uint64_t key_seed,
                                  const Signer& signer = SimulatedSigner{});

/// True iff the genesis marker, every p_t_id link, every recomputed t_id and
/// the timestamp ordering all check out.
bool verify_chain(const LedgerChain& chain);

/// Partitions the global timestamp-ordered transaction stream into blocks of
/// `blocksize` (last may be short); each block hashes its predecessor.
std::vector<Block> form_blocks(const std::vector<LedgerChain>& chains, size_t blocksize);

bool verify_blocks(const std::vector<Block>& blocks);

/// Attacker-visible export: JSON lines with fields
/// t_id,p_t_id,ledger_id,timestamp,output,pk,sign. Lossless for those fields;
/// ground truth goes to the separate labels file.
std::string export_ledger(const std::vector<LedgerChain>& chains);
std::vector<LedgerChain> import_ledger(std::string_view jsonl);

/// Ground-truth labels CSV: t_id,device_id,device_type.
std::string export_labels(const std::vector<LedgerChain>& chains);

/// Parses a labels CSV into t_id -> device_type.
std::map<std::string, std::string> parse_labels(std::string_view csv_text);

/// Labels map taken directly from populated chains (same content as
/// parse_labels(export_labels(chains))).
std::map<std::string, std::string> labels_from_chains(const std::vector<LedgerChain>& chains);

}  // namespace ledgerprint
