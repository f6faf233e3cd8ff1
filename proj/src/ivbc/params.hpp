#pragma once

#include <cstdint>

namespace ivbc {

/// Consensus and reward constants, fixed for the whole run (no retargeting).
struct ChainParams {
    /// Hash puzzle difficulty in leading zero bits before the PoD discount.
    std::uint32_t base_difficulty = 8;
    /// Meters of driving that halve the remaining puzzle space by one bit.
    std::uint64_t unit_m = 1000;
    /// IV-TP units each benefiter pays the sealer per benefited data share.
    std::uint64_t reward_amount = 1;
    /// IV-TP units provisioned to every vehicle at genesis.
    std::uint64_t initial_balance = 100;
};

} // namespace ivbc
