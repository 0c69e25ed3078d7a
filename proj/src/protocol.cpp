#include "bpfl/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// stable per-(seed, role, round) stream tags
constexpr std::uint64_t kTagInit = 0x01;
constexpr std::uint64_t kTagZkpSetup = 0x02;
constexpr std::uint64_t kTagKeygen = 0x03;
constexpr std::uint64_t kTagTrain = 0x10;
constexpr std::uint64_t kTagProve = 0x11;
constexpr std::uint64_t kTagShare = 0x12;
constexpr std::uint64_t kTagAttack = 0x13;

Rng stream_for(const ProtocolConfig& cfg, std::uint64_t tag, std::uint32_t who, unsigned round) {
    return Rng(cfg.seed).child(tag).child(who).child(round);
}

Envelope expect_message(const Field& field, Bus& bus, std::uint32_t who, MsgTag tag) {
    Envelope env = parse_message(field, must_recv(bus, who));
    if (env.tag() != tag)
        throw ProtocolError("unexpected message tag " +
                            std::to_string(static_cast<int>(env.tag())) + " for endpoint " +
                            std::to_string(who));
    return env;
}

void clip_model(ModelVector& w, double bound) {
    for (double& v : w) v = std::clamp(v, -bound, bound);
}

/// Clients agree on the mask through the server: encrypted shares up,
/// homomorphic sum down. Updates every client's mask in place and returns
/// the commitments the server received.
void negotiate_mask(const SharedContext& ctx, ServerState& server,
                    std::vector<ClientState>& clients, Bus& bus, const AttackSpec& attack,
                    unsigned round) {
    const Field& f = *ctx.field;
    if (clients.empty()) throw ProtocolError("mask negotiation: no clients");

    for (ClientState& c : clients) {
        Rng rng = stream_for(ctx.config, kTagShare, c.id, round);
        SeedShare share = client_share(c.id, c.he_pk, rng);
        bus.send(c.id, kServerId,
                 serialize_message(f, Envelope{round, c.id, SeedShareMsg{share.encrypted_seed}}));
    }

    std::vector<SeedShare> shares;
    shares.reserve(clients.size());
    for (std::size_t i = 0; i < clients.size(); ++i) {
        Envelope env = expect_message(f, bus, kServerId, MsgTag::SeedShare);
        shares.push_back(SeedShare{env.sender, std::get<SeedShareMsg>(env.body).share});
    }
    PaillierCiphertext aggregate = server_aggregate_seeds(clients.front().he_pk, shares);
    for (const ClientState& c : clients) {
        bus.send(kServerId, c.id,
                 serialize_message(f, Envelope{round, kServerId, SeedAggregateMsg{aggregate}}));
    }

    for (ClientState& c : clients) {
        Envelope env = expect_message(f, bus, c.id, MsgTag::SeedAggregate);
        mpz_class seed = paillier_decrypt(c.he_pk, c.he_sk, std::get<SeedAggregateMsg>(env.body).aggregate);
        c.mask = expand_mask(f, ctx.hash, seed, ctx.layout.dim);
    }

    // hash commitments and the majority mode
    std::size_t n = clients.size();
    for (ClientState& c : clients) {
        Fe commit = algebraic_hash(f, ctx.hash, c.mask.r);
        if (attack.wrong_setup_hash && attack.is_malicious(c.id, n)) {
            Rng rng = stream_for(ctx.config, kTagAttack, c.id, round);
            commit = f.sample(rng);
        }
        bus.send(c.id, kServerId, serialize_message(f, Envelope{round, c.id, HashCommitMsg{commit}}));
    }
    server.hash_commitments.clear();
    for (std::size_t i = 0; i < n; ++i) {
        Envelope env = expect_message(f, bus, kServerId, MsgTag::HashCommit);
        server.hash_commitments.push_back(std::get<HashCommitMsg>(env.body).hash_value);
    }
    server.mask_hash = mode_of_hashes(f, server.hash_commitments);
}

} // namespace

std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::ProofInvalid:
            return "proof-verification-failure";
        case RejectReason::Malformed:
            return "malformed-submission";
    }
    return "unknown";
}

Fe mode_of_hashes(const Field& field, std::span<const Fe> hashes) {
    if (hashes.empty()) throw std::invalid_argument("mode_of_hashes: empty multiset");
    std::map<mpz_class, std::size_t> counts;
    for (const Fe& h : hashes) counts[field.to_mpz(h)] += 1;
    const mpz_class* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [value, count] : counts) {
        if (count > best_count) { // map iterates ascending: ties keep the smaller
            best = &value;
            best_count = count;
        }
    }
    return field.from_mpz(*best);
}

void server_train_reference(const SharedContext& ctx, ServerState& server) {
    TrainingTask task{server.validation, ctx.config.model, ctx.config.local_epochs,
                      ctx.config.learning_rate};
    Rng rng = stream_for(ctx.config, kTagTrain, kServerId, server.round);
    server.reference_model =
        train_local(task, server.reference_model, rng.next_u64(), ctx.config.weight_bound);
}

Simulation run_setup(const ProtocolConfig& config, Dataset server_validation,
                     std::vector<Dataset> client_data, Bus& bus, const AttackSpec& attack) {
    if (config.n == 0 || client_data.size() != config.n)
        throw ConfigError("setup: need one dataset per client");

    Simulation sim;
    SharedContext& ctx = sim.ctx;
    ctx.config = config;
    ctx.field = std::make_shared<Field>(config.field_params);
    ctx.group = MockBilinearGroup(*ctx.field);
    const Field& f = *ctx.field;

    const std::size_t dim = config.model.dim();
    ctx.codec = make_codec(f, dim, config.scale, config.weight_bound);
    ctx.hash = make_hash_params(f, config.hash_rounds, config.hash_constants_seed);

    // trusted third party: circuit and reference string
    auto [r1cs, layout] = build_validity_circuit(f, dim, ctx.codec, ctx.hash);
    ctx.layout = layout;
    ctx.r1cs = std::make_shared<const R1CS>(std::move(r1cs));
    auto qap = std::make_shared<const QAP>(r1cs_to_qap(f, ctx.r1cs));
    Rng zkp_rng = stream_for(config, kTagZkpSetup, 0, 0);
    MockSetup zkp = groth16_setup(ctx.group, qap, zkp_rng);
    ctx.proving_key = std::make_shared<const MockProvingKey>(std::move(zkp.pk));

    // server: initial global model, reference model, thresholds
    ServerState& server = sim.server;
    server.vk = std::move(zkp.vk);
    server.tau_c = config.tau_c;
    server.tau_e = config.tau_e;
    server.validation = std::move(server_validation);
    Rng init_rng = stream_for(config, kTagInit, 0, 0);
    ModelVector w_g1(dim);
    for (double& v : w_g1) v = init_rng.normal(0.0, 0.01);
    server.reference_model = w_g1; // w_S^1 <- w_g^1
    server.global = EncodedSum{encode_vector(f, ctx.codec, w_g1), 0};

    // clients: the lowest-id client generates the Paillier keypair; sk is
    // pre-shared among clients only (the server never holds it)
    Rng keygen_rng = stream_for(config, kTagKeygen, 1, 0);
    PaillierKeypair keys = paillier_keygen(config.paillier_bits, keygen_rng);
    sim.clients.reserve(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        ClientState c;
        c.id = static_cast<std::uint32_t>(i + 1);
        c.data = std::move(client_data[i]);
        c.he_pk = keys.pk;
        c.he_sk = keys.sk;
        c.global_estimate = w_g1;
        sim.clients.push_back(std::move(c));
    }

    negotiate_mask(ctx, server, sim.clients, bus, attack, 0);

    // initial model broadcast (count 0: plain encoded, no mask multiples)
    for (const ClientState& c : sim.clients) {
        bus.send(kServerId, c.id,
                 serialize_message(f, Envelope{0, kServerId, GlobalModelMsg{server.global}}));
    }
    return sim;
}

RoundReport run_round(const SharedContext& ctx, ServerState& server,
                      std::vector<ClientState>& clients, const AttackSpec& attack, Bus& bus) {
    const Field& f = *ctx.field;
    const ProtocolConfig& cfg = ctx.config;
    const std::size_t n = clients.size();
    const std::size_t dim = ctx.layout.dim;
    server.round += 1;
    const unsigned round = server.round;
    bus.reset_counters();

    RoundReport report;
    report.round = round;
    report.client_prove_ms.assign(n, 0.0);
    report.client_train_ms.assign(n, 0.0);

    // --- Round 1: clients recover the global model and train locally ---
    for (ClientState& c : clients) {
        Envelope env = expect_message(f, bus, c.id, MsgTag::GlobalModel);
        const EncodedSum& payload = std::get<GlobalModelMsg>(env.body).payload;
        if (payload.count == 0) {
            c.global_estimate = decode_vector(f, ctx.codec, payload.sum);
        } else {
            c.global_estimate = unmask_global(f, ctx.codec, payload, c.mask.r);
        }
        auto t0 = Clock::now();
        TrainingTask task{c.data, cfg.model, cfg.local_epochs, cfg.learning_rate};
        Rng rng = stream_for(cfg, kTagTrain, c.id, round);
        c.local_model = train_local(task, c.global_estimate, rng.next_u64(), cfg.weight_bound);
        report.client_train_ms[c.id - 1] = ms_since(t0);
    }

    if (cfg.renegotiate_mask) negotiate_mask(ctx, server, clients, bus, attack, round);

    // --- model-poisoning attackers craft their submissions ---
    if (attack.variant != AttackVariant::None && !attack.is_protocol_behavior()) {
        std::vector<ModelVector> benign;
        for (const ClientState& c : clients) {
            if (!attack.is_malicious(c.id, n)) benign.push_back(c.local_model);
        }
        for (ClientState& c : clients) {
            if (!attack.is_malicious(c.id, n)) continue;
            Rng rng = stream_for(cfg, kTagAttack, c.id, round);
            switch (attack.variant) {
                case AttackVariant::AddNoise:
                    c.local_model = add_noise(c.local_model, attack.noise_sigma, rng.next_u64());
                    break;
                case AttackVariant::SignFlip: {
                    c.local_model = sign_flip(c.local_model);
                    for (double& v : c.local_model) v *= attack.flip_scale;
                    break;
                }
                case AttackVariant::MinMax:
                    c.local_model = min_max_attack(benign, attack.perturbation, attack.gamma_grid);
                    break;
                case AttackVariant::MinSum:
                    c.local_model = min_sum_attack(benign, attack.perturbation, attack.gamma_grid);
                    break;
                default:
                    break;
            }
            clip_model(c.local_model, cfg.weight_bound); // submissions must stay encodable
        }
    }

    // --- server trains the reference model and publishes sigma_t ---
    {
        auto t0 = Clock::now();
        server_train_reference(ctx, server);
        report.server_train_ms = ms_since(t0);
    }
    for (const ClientState& c : clients) {
        bus.send(kServerId, c.id,
                 serialize_message(f, Envelope{round, kServerId,
                                               ProofParamsMsg{server.reference_model,
                                                              server.tau_c, server.tau_e}}));
    }

    // --- Round 2: clients generate and submit proofs ---
    for (ClientState& c : clients) {
        Envelope env = expect_message(f, bus, c.id, MsgTag::ProofParams);
        const auto& params = std::get<ProofParamsMsg>(env.body);
        auto [tau_c_sq, tau_e_sq] =
            encode_thresholds(f, ctx.codec, dim, params.tau_c, params.tau_e);
        Fe own_hash = algebraic_hash(f, ctx.hash, c.mask.r);
        Rng prove_rng = stream_for(cfg, kTagProve, c.id, round);

        auto t0 = Clock::now();
        Envelope submission{round, c.id, SubmissionMsg{}};
        if (attack.is_protocol_behavior() && attack.is_malicious(c.id, n)) {
            HonestRoundView view;
            view.field = ctx.field.get();
            view.group = &ctx.group;
            view.r1cs = ctx.r1cs.get();
            view.layout = &ctx.layout;
            view.proving_key = ctx.proving_key.get();
            view.local_model = c.local_model;
            view.mask = &c.mask;
            view.ref_model = params.ref_model;
            view.tau_c_sq = tau_c_sq;
            view.tau_e_sq = tau_e_sq;
            view.mode_hash = own_hash;
            view.round = round;
            view.client_id = c.id;
            submission = malicious_client_behavior(attack.variant, view, prove_rng);
        } else {
            std::vector<Fe> local_enc = encode_vector(f, ctx.codec, c.local_model);
            std::vector<Fe> ref_enc = encode_vector(f, ctx.codec, params.ref_model);
            std::vector<Fe> masked(dim);
            for (std::size_t j = 0; j < dim; ++j) masked[j] = f.add(local_enc[j], c.mask.r[j]);
            ValidityPublicInputs pub{std::move(ref_enc), masked, tau_e_sq, tau_c_sq, own_hash};
            Witness wit =
                assign_validity_witness(f, *ctx.r1cs, ctx.layout, local_enc, c.mask.r, pub);
            // an out-of-threshold model cannot be proven; the client still
            // submits and the server rejects it
            MockProof proof = check_satisfied(f, *ctx.r1cs, wit)
                                  ? groth16_prove(ctx.group, *ctx.proving_key, wit, prove_rng)
                                  : groth16_prove_unchecked(ctx.group, *ctx.proving_key, wit,
                                                            prove_rng);
            submission.body =
                SubmissionMsg{std::move(masked), serialize_proof(ctx.group, proof)};
        }
        report.client_prove_ms[c.id - 1] = ms_since(t0);
        bus.send(c.id, kServerId, serialize_message(f, submission));
    }

    // --- Round 3: server verifies each proof and aggregates U+ ---
    server.accepted_set.clear();
    std::vector<std::vector<Fe>> accepted_models;
    {
        std::vector<Fe> ref_enc = encode_vector(f, ctx.codec, server.reference_model);
        auto [tau_c_sq, tau_e_sq] = encode_thresholds(f, ctx.codec, dim, server.tau_c, server.tau_e);
        auto t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            Envelope env = expect_message(f, bus, kServerId, MsgTag::Submission);
            const auto& msg = std::get<SubmissionMsg>(env.body);
            if (msg.masked_model.size() != dim) {
                report.rejected.emplace_back(env.sender, RejectReason::Malformed);
                continue;
            }
            MockProof proof;
            try {
                proof = parse_proof(ctx.group, msg.proof_bytes);
            } catch (const FormatError&) {
                report.rejected.emplace_back(env.sender, RejectReason::Malformed);
                continue;
            }
            ValidityPublicInputs pub{ref_enc, msg.masked_model, tau_e_sq, tau_c_sq,
                                     server.mask_hash};
            if (groth16_verify(ctx.group, server.vk, proof, pub.to_io())) {
                server.accepted_set.push_back(env.sender);
                accepted_models.push_back(msg.masked_model);
            } else {
                report.rejected.emplace_back(env.sender, RejectReason::ProofInvalid);
            }
        }
        report.server_verify_ms = ms_since(t0);
    }
    {
        auto t0 = Clock::now();
        if (!accepted_models.empty()) {
            server.global = aggregate_masked(f, accepted_models);
        } else {
            report.global_updated = false; // keep the previous broadcast
        }
        report.server_aggregate_ms = ms_since(t0);
    }
    for (const ClientState& c : clients) {
        bus.send(kServerId, c.id,
                 serialize_message(f, Envelope{round, kServerId, GlobalModelMsg{server.global}}));
    }

    std::sort(report.rejected.begin(), report.rejected.end());
    report.accepted = server.accepted_set;
    std::sort(report.accepted.begin(), report.accepted.end());
    report.server_traffic = bus.counters(kServerId);
    for (const ClientState& c : clients) {
        Bus::Counters cc = bus.counters(c.id);
        report.client_bytes_sent += cc.bytes_sent;
        report.client_bytes_received += cc.bytes_received;
    }
    report.transcript_digest = bus.transcript_digest();
    return report;
}

} // namespace bpfl
