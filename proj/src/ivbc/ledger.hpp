#pragma once

#include "ivbc/block.hpp"
#include "ivbc/bytes.hpp"
#include "ivbc/hash.hpp"
#include "ivbc/identity.hpp"
#include "ivbc/params.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ivbc {

enum class LedgerError : std::uint8_t {
    DuplicateIdentity,
    InsufficientBalance,
    UnknownVehicle,
    SelfTransfer,
    ZeroAmount,
};

const char* ledger_error_name(LedgerError e);

struct EmptyLedger : std::logic_error {
    EmptyLedger() : std::logic_error("no registered vehicles") {}
};

/// IV-TP balances and per-sender nonce watermarks. A value type: copy a
/// snapshot, mutate the copy. Every mutator is atomic — on error the
/// state is left untouched.
class LedgerState {
public:
    /// Provisions a fresh vehicle with its initial balance.
    std::optional<LedgerError> register_vehicle(const Hash32& ivtp_id,
                                                std::uint64_t initial_balance);

    /// Moves amount from one registered vehicle to another. Total supply
    /// is unchanged; all other balances untouched.
    std::optional<LedgerError> apply_transfer(const Hash32& from, const Hash32& to,
                                              std::uint64_t amount);

    bool is_registered(const Hash32& ivtp_id) const { return balances_.contains(ivtp_id); }
    std::optional<std::uint64_t> balance(const Hash32& ivtp_id) const;

    /// Sum of all balances. Conserved by transfers; grows only at registration.
    std::uint64_t supply() const;
    std::size_t registered_count() const { return balances_.size(); }

    /// Vehicle with the maximum balance; ties go to the lexicographically
    /// smallest id. Throws EmptyLedger when nothing is registered.
    Hash32 leader() const;

    std::uint64_t nonce_watermark(const Hash32& sender) const;
    void set_nonce_watermark(const Hash32& sender, std::uint64_t nonce);

    const std::map<Hash32, std::uint64_t>& balances() const { return balances_; }
    const std::map<Hash32, std::uint64_t>& watermarks() const { return watermarks_; }

    bool operator==(const LedgerState&) const = default;

    /// Canonical snapshot record (balances and watermarks, id-sorted).
    Bytes encode() const;
    static LedgerState decode(std::span<const std::uint8_t> data);

private:
    std::map<Hash32, std::uint64_t> balances_;
    std::map<Hash32, std::uint64_t> watermarks_;
};

/// One benefiter payment that could not be applied while rewarding a block.
struct RewardSkip {
    std::size_t tx_index;
    Hash32 benefiter{};
    LedgerError reason;

    bool operator==(const RewardSkip&) const = default;
};

struct RewardReport {
    std::uint64_t transfers_applied = 0;
    std::uint64_t units_to_sealer = 0;
    std::vector<RewardSkip> skips;

    bool operator==(const RewardReport&) const = default;
};

/// Why a block fails to apply to a ledger.
enum class TxRule : std::uint8_t {
    UnknownSender,
    BadSignature,
    NonceReplay,
    TransferNotFromSender,
    TransferInvalid, // carries the ledger error
};

const char* tx_rule_name(TxRule r);

struct TxFailure {
    std::size_t tx_index;
    TxRule rule;
    std::optional<LedgerError> ledger_error;
};

/// Pays the sealer one reward per recorded benefiter of every data share
/// in the block. Benefiters that cannot pay (or are the sealer) are
/// skipped and reported, never fatal.
RewardReport reward_for_block(LedgerState& ledger, const Block& block,
                              const ChainParams& params);

/// Full state transition for one validated-or-candidate block: applies
/// every transaction in body order (checking sender, signature, nonce and
/// balance feasibility) and materializes the benefiter rewards of each
/// data share in place. On failure the ledger is untouched.
std::variant<RewardReport, TxFailure> apply_block(LedgerState& ledger, const Block& block,
                                                  const IdentityRegistry& registry,
                                                  const ChainParams& params);

} // namespace ivbc
