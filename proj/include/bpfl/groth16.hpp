#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bpfl/errors.hpp"
#include "bpfl/qap.hpp"
#include "bpfl/rng.hpp"

namespace bpfl {

/// Bilinear group interface the proof system is written against. A backend
/// supplies three group types, embeddings of field scalars, group operations
/// and the pairing. A real pairing curve can be slotted in by modeling this
/// concept; the shipped backend is the insecure algebra-faithful mock below.
template <typename G>
concept BilinearGroupBackend = requires(const G g, Fe s, typename G::G1 p, typename G::G2 q,
                                        typename G::GT t, std::span<const std::uint8_t> bytes) {
    { g.embed_g1(s) } -> std::same_as<typename G::G1>;
    { g.embed_g2(s) } -> std::same_as<typename G::G2>;
    { g.g1_add(p, p) } -> std::same_as<typename G::G1>;
    { g.g2_add(q, q) } -> std::same_as<typename G::G2>;
    { g.g1_scale(p, s) } -> std::same_as<typename G::G1>;
    { g.g2_scale(q, s) } -> std::same_as<typename G::G2>;
    { g.pairing(p, q) } -> std::same_as<typename G::GT>;
    { g.gt_combine(t, t) } -> std::same_as<typename G::GT>;
    { g.gt_eq(t, t) } -> std::same_as<bool>;
    { g.g1_to_bytes(p) } -> std::same_as<std::array<std::uint8_t, 32>>;
    { g.g2_to_bytes(q) } -> std::same_as<std::array<std::uint8_t, 32>>;
    { g.g1_from_bytes(bytes) } -> std::same_as<typename G::G1>;
    { g.g2_from_bytes(bytes) } -> std::same_as<typename G::G2>;
};

/// INSECURE mock: all three groups are Z_p itself ([a] is the exponent a, the
/// pairing is field multiplication). Every algebraic identity Groth16 relies
/// on holds exactly, but discrete logs are trivial. For desk-scale protocol
/// work only.
class MockBilinearGroup {
public:
    struct G1 {
        Fe v;
        friend bool operator==(const G1&, const G1&) = default;
    };
    struct G2 {
        Fe v;
        friend bool operator==(const G2&, const G2&) = default;
    };
    struct GT {
        Fe v;
        friend bool operator==(const GT&, const GT&) = default;
    };

    MockBilinearGroup() = default; ///< unusable until bound to a field
    explicit MockBilinearGroup(const Field& f) : f_(&f) {}
    const Field& field() const { return *f_; }

    G1 embed_g1(Fe a) const { return {a}; }
    G2 embed_g2(Fe b) const { return {b}; }
    G1 g1_add(G1 a, G1 b) const { return {f_->add(a.v, b.v)}; }
    G2 g2_add(G2 a, G2 b) const { return {f_->add(a.v, b.v)}; }
    G1 g1_scale(G1 a, Fe s) const { return {f_->mul(a.v, s)}; }
    G2 g2_scale(G2 a, Fe s) const { return {f_->mul(a.v, s)}; }
    GT pairing(G1 a, G2 b) const { return {f_->mul(a.v, b.v)}; }
    GT gt_combine(GT a, GT b) const { return {f_->add(a.v, b.v)}; }
    bool gt_eq(GT a, GT b) const { return a.v == b.v; }
    std::array<std::uint8_t, 32> g1_to_bytes(G1 a) const { return f_->to_bytes(a.v); }
    std::array<std::uint8_t, 32> g2_to_bytes(G2 b) const { return f_->to_bytes(b.v); }
    G1 g1_from_bytes(std::span<const std::uint8_t> b) const { return {f_->from_bytes(b)}; }
    G2 g2_from_bytes(std::span<const std::uint8_t> b) const { return {f_->from_bytes(b)}; }

private:
    const Field* f_ = nullptr;
};

static_assert(BilinearGroupBackend<MockBilinearGroup>);

/// The toxic waste of the trusted setup. Retained only so test harnesses can
/// exercise the zero-knowledge simulator; never serialized with pk/vk.
struct ToxicWaste {
    Fe alpha, beta, gamma, delta, s;
};

/// Reference string sigma_1 exactly as displayed in the Groth16 setup.
template <BilinearGroupBackend G>
struct Sigma1 {
    typename G::G1 alpha, beta, delta;
    std::vector<typename G::G1> s_pows;        ///< s^i, i = 0..deg t - 1
    std::vector<typename G::G1> io_quotients;  ///< (beta u_i + alpha w_i + y_i)/gamma, i = 0..N
    std::vector<typename G::G1> aux_quotients; ///< (beta u_i + alpha w_i + y_i)/delta, i = N+1..m
    std::vector<typename G::G1> t_quotients;   ///< s^i t(s)/delta, i = 0..deg t - 2
};

template <BilinearGroupBackend G>
struct Sigma2 {
    typename G::G2 beta, gamma, delta;
    std::vector<typename G::G2> s_pows;
};

template <BilinearGroupBackend G>
struct ProvingKey {
    Sigma1<G> sigma1;
    Sigma2<G> sigma2;
    // Per-variable encodings of the column evaluations at s, the standard
    // query form derived from sigma during setup.
    std::vector<typename G::G1> u_at_s_g1;
    std::vector<typename G::G1> w_at_s_g1;
    std::vector<typename G::G2> w_at_s_g2;
    std::shared_ptr<const QAP> qap;
};

template <BilinearGroupBackend G>
struct VerifyingKey {
    typename G::G1 alpha;
    typename G::G2 beta, gamma, delta;
    std::vector<typename G::G1> io_quotients; ///< i = 0..N
    std::size_t io_len = 0;
};

/// pi = ([A]_1, [C]_1, [B]_2); constant size regardless of the circuit.
template <BilinearGroupBackend G>
struct Proof {
    typename G::G1 a, c;
    typename G::G2 b;
};

template <BilinearGroupBackend G>
struct SetupOutput {
    ProvingKey<G> pk;
    VerifyingKey<G> vk;
    ToxicWaste toxic;
};

template <BilinearGroupBackend G>
SetupOutput<G> groth16_setup(const G& group, std::shared_ptr<const QAP> qap, Rng& rng);

/// Honest prover: refuses (ProverError) when the witness does not satisfy
/// the circuit.
template <BilinearGroupBackend G>
Proof<G> groth16_prove(const G& group, const ProvingKey<G>& pk, const Witness& witness, Rng& rng);

/// Harness-only variant that skips the satisfaction check; used to show that
/// proofs generated from bad witnesses fail verification.
template <BilinearGroupBackend G>
Proof<G> groth16_prove_unchecked(const G& group, const ProvingKey<G>& pk, const Witness& witness,
                                 Rng& rng);

/// Pairing-product check; malformed sizes yield false, never an exception.
template <BilinearGroupBackend G>
bool groth16_verify(const G& group, const VerifyingKey<G>& vk, const Proof<G>& proof,
                    std::span<const Fe> public_inputs);

/// Witness-forwarding differential-testing backend: accepts iff the witness
/// satisfies the R1CS and its public section equals `public_inputs`.
bool oracle_verify(const Field& f, const R1CS& cs, const Witness& witness,
                   std::span<const Fe> public_inputs);

// --- concrete mock-backed aliases used by the protocol ---
using MockProof = Proof<MockBilinearGroup>;
using MockProvingKey = ProvingKey<MockBilinearGroup>;
using MockVerifyingKey = VerifyingKey<MockBilinearGroup>;
using MockSetup = SetupOutput<MockBilinearGroup>;

/// Zero-knowledge simulator: produces an accepting proof from the toxic
/// waste and public inputs alone (no witness). Test harness use only;
/// solves the pairing equation directly, which needs the mock group.
MockProof groth16_simulate(const MockBilinearGroup& group, const MockVerifyingKey& vk,
                           const ToxicWaste& toxic, std::span<const Fe> public_inputs, Rng& rng);

/// Length-prefixed byte form: 4-byte big-endian length, then [A][C][B] as
/// 32-byte big-endian elements.
std::vector<std::uint8_t> serialize_proof(const MockBilinearGroup& g, const MockProof& p);
MockProof parse_proof(const MockBilinearGroup& g, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_vk(const MockBilinearGroup& g, const MockVerifyingKey& vk);
MockVerifyingKey parse_vk(const MockBilinearGroup& g, std::span<const std::uint8_t> bytes);

} // namespace bpfl

#include "bpfl/groth16_impl.hpp"
