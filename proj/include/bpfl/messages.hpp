#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bpfl/aggregate.hpp"
#include "bpfl/field.hpp"
#include "bpfl/model.hpp"
#include "bpfl/paillier.hpp"

namespace bpfl {

inline constexpr std::uint32_t kServerId = 0; ///< clients are 1..n

enum class MsgTag : std::uint8_t {
    SeedShare = 1,     ///< client -> server, Enc(pk, s_i)
    SeedAggregate = 2, ///< server -> clients, [s] = sum of shares
    HashCommit = 3,    ///< client -> server, h_i = hash(r)
    GlobalModel = 4,   ///< server -> clients; count == 0 marks the initial plain model
    ProofParams = 5,   ///< server -> clients, sigma_t = {w_S, tau_c, tau_e}
    Submission = 6,    ///< client -> server, (masked model, proof)
};

struct SeedShareMsg {
    PaillierCiphertext share;
};
struct SeedAggregateMsg {
    PaillierCiphertext aggregate;
};
struct HashCommitMsg {
    Fe hash_value;
};
struct GlobalModelMsg {
    EncodedSum payload;
};
struct ProofParamsMsg {
    ModelVector ref_model;
    double tau_c = 0, tau_e = 0;
};
struct SubmissionMsg {
    std::vector<Fe> masked_model;
    std::vector<std::uint8_t> proof_bytes;
};

using MessageBody = std::variant<SeedShareMsg, SeedAggregateMsg, HashCommitMsg, GlobalModelMsg,
                                 ProofParamsMsg, SubmissionMsg>;

/// Every message carries its round number and sender id.
struct Envelope {
    std::uint32_t round = 0;
    std::uint32_t sender = 0;
    MessageBody body;

    MsgTag tag() const { return static_cast<MsgTag>(body.index() + 1); }
};

/// Wire form: [tag u8][round u32][sender u32][payload], integers big-endian,
/// field elements 32-byte big-endian, doubles as IEEE-754 bit patterns.
std::vector<std::uint8_t> serialize_message(const Field& field, const Envelope& env);
/// Throws FormatError on malformed frames.
Envelope parse_message(const Field& field, std::span<const std::uint8_t> bytes);

} // namespace bpfl
