#pragma once

#include <memory>
#include <string>

#include "bpfl/attacks.hpp"
#include "bpfl/transport.hpp"

namespace bpfl {

struct ProtocolConfig {
    std::size_t n = 0;
    FieldParams field_params = bn254_scalar_params();
    std::uint64_t scale = 1ULL << 16;
    double weight_bound = 8.0;
    unsigned hash_rounds = 11;
    std::string hash_constants_seed = "bpfl/permutation/v1";
    ModelSpec model;
    unsigned local_epochs = 5;
    double learning_rate = 0.1;
    double tau_c = 0.99;
    double tau_e = 0.93;
    unsigned paillier_bits = 512;
    bool renegotiate_mask = false; ///< rerun MVNP every round instead of reusing r
    std::uint64_t seed = 1;
};

/// Immutable artifacts produced once by the trusted setup party and shared
/// by every role: the circuit, the proof keys, codec and hash parameters.
struct SharedContext {
    std::shared_ptr<const Field> field;
    MockBilinearGroup group;
    FixedPointCodec codec;
    AlgebraicHashParams hash;
    std::shared_ptr<const R1CS> r1cs;
    ValidityCircuitLayout layout;
    std::shared_ptr<const MockProvingKey> proving_key;
    ProtocolConfig config;
};

/// Server-side state. Deliberately holds neither the mask vector, the
/// Paillier secret key, nor any plaintext client model; everything it
/// learns arrives through serialized messages.
struct ServerState {
    std::uint32_t id = kServerId;
    unsigned round = 0;
    ModelVector reference_model;     ///< w_S lineage, trained on D_S
    EncodedSum global;               ///< current broadcast (count 0: initial plain model)
    std::vector<std::uint32_t> accepted_set; ///< U+ of the latest round
    std::vector<Fe> hash_commitments;        ///< H
    Fe mask_hash{};                          ///< h = MODE(H)
    MockVerifyingKey vk;
    double tau_c = 0, tau_e = 0;
    Dataset validation; ///< D_S
};

struct ClientState {
    std::uint32_t id = 0; ///< 1..n
    Dataset data;
    MaskVector mask;
    PaillierPublicKey he_pk;
    PaillierSecretKey he_sk; ///< every client holds sk; the server never does
    ModelVector global_estimate;
    ModelVector local_model;
};

enum class RejectReason { ProofInvalid, Malformed };
std::string to_string(RejectReason r);

struct RoundReport {
    unsigned round = 0;
    std::vector<std::uint32_t> accepted;
    std::vector<std::pair<std::uint32_t, RejectReason>> rejected;
    bool global_updated = true;
    std::vector<double> client_prove_ms;  ///< indexed by client - 1
    std::vector<double> client_train_ms;
    double server_train_ms = 0;
    double server_verify_ms = 0;
    double server_aggregate_ms = 0;
    Bus::Counters server_traffic;
    std::uint64_t client_bytes_sent = 0;
    std::uint64_t client_bytes_received = 0;
    std::uint64_t transcript_digest = 0;
};

struct Simulation {
    SharedContext ctx;
    ServerState server;
    std::vector<ClientState> clients;
};

/// Setup phase: circuit + keys from the trusted third party, initial global
/// model, MVNP over the bus, hash commitments, h = MODE(H), and the initial
/// model broadcast. `attack.wrong_setup_hash` lets malicious clients commit
/// bogus hashes. Throws ProtocolError when MVNP cannot complete.
Simulation run_setup(const ProtocolConfig& config, Dataset server_validation,
                     std::vector<Dataset> client_data, Bus& bus, const AttackSpec& attack = {});

/// One full round: clients unmask and train, server trains the reference
/// model and broadcasts sigma_t, clients prove and submit, server verifies,
/// aggregates the accepted masked models and broadcasts the new global.
RoundReport run_round(const SharedContext& ctx, ServerState& server,
                      std::vector<ClientState>& clients, const AttackSpec& attack, Bus& bus);

/// Most frequent element; ties broken by smallest canonical value.
/// Throws std::invalid_argument on an empty multiset.
Fe mode_of_hashes(const Field& field, std::span<const Fe> hashes);

/// One local-training pass on D_S continuing the server's reference lineage.
void server_train_reference(const SharedContext& ctx, ServerState& server);

} // namespace bpfl
