#include "bpfl/groth16.hpp"

namespace bpfl {

bool oracle_verify(const Field& f, const R1CS& cs, const Witness& witness,
                   std::span<const Fe> public_inputs) {
    if (witness.io.size() != public_inputs.size()) return false;
    for (std::size_t i = 0; i < public_inputs.size(); ++i) {
        if (!(witness.io[i] == public_inputs[i])) return false;
    }
    return check_satisfied(f, cs, witness);
}

MockProof groth16_simulate(const MockBilinearGroup& group, const MockVerifyingKey& vk,
                           const ToxicWaste& toxic, std::span<const Fe> public_inputs, Rng& rng) {
    const Field& f = group.field();
    if (public_inputs.size() != vk.io_len)
        throw std::invalid_argument("simulate: public input length mismatch");
    Fe a = f.sample(rng);
    Fe b = f.sample(rng);
    MockBilinearGroup::G1 acc = vk.io_quotients[0];
    for (std::size_t i = 0; i < public_inputs.size(); ++i)
        acc = group.g1_add(acc, group.g1_scale(vk.io_quotients[i + 1], public_inputs[i]));
    // io term of the verification equation; gamma cancels the 1/gamma in acc
    Fe io_sum = group.pairing(acc, vk.gamma).v;
    Fe c = f.mul(f.sub(f.sub(f.mul(a, b), f.mul(toxic.alpha, toxic.beta)), io_sum),
                 f.inv(toxic.delta));
    return MockProof{group.embed_g1(a), group.embed_g1(c), group.embed_g2(b)};
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    if (at + 4 > b.size()) throw FormatError("truncated length prefix");
    return (std::uint32_t(b[at]) << 24) | (std::uint32_t(b[at + 1]) << 16) |
           (std::uint32_t(b[at + 2]) << 8) | std::uint32_t(b[at + 3]);
}

} // namespace

std::vector<std::uint8_t> serialize_proof(const MockBilinearGroup& g, const MockProof& p) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 96);
    put_u32(out, 96);
    for (const auto& bytes : {g.g1_to_bytes(p.a), g.g1_to_bytes(p.c), g.g2_to_bytes(p.b)})
        out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
}

MockProof parse_proof(const MockBilinearGroup& g, std::span<const std::uint8_t> bytes) {
    if (get_u32(bytes, 0) != 96 || bytes.size() != 100)
        throw FormatError("proof: expected 96-byte body");
    MockProof p;
    p.a = g.g1_from_bytes(bytes.subspan(4, 32));
    p.c = g.g1_from_bytes(bytes.subspan(36, 32));
    p.b = g.g2_from_bytes(bytes.subspan(68, 32));
    return p;
}

std::vector<std::uint8_t> serialize_vk(const MockBilinearGroup& g, const MockVerifyingKey& vk) {
    std::vector<std::uint8_t> body;
    put_u32(body, static_cast<std::uint32_t>(vk.io_quotients.size()));
    auto put_elem = [&](const std::array<std::uint8_t, 32>& bytes) {
        body.insert(body.end(), bytes.begin(), bytes.end());
    };
    put_elem(g.g1_to_bytes(vk.alpha));
    put_elem(g.g2_to_bytes(vk.beta));
    put_elem(g.g2_to_bytes(vk.gamma));
    put_elem(g.g2_to_bytes(vk.delta));
    for (const auto& q : vk.io_quotients) put_elem(g.g1_to_bytes(q));
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

MockVerifyingKey parse_vk(const MockBilinearGroup& g, std::span<const std::uint8_t> bytes) {
    std::uint32_t body_len = get_u32(bytes, 0);
    if (bytes.size() != body_len + 4) throw FormatError("vk: length prefix mismatch");
    std::uint32_t count = get_u32(bytes, 4);
    std::size_t expected = 4 + 4 * 32 + std::size_t(count) * 32;
    if (body_len != expected) throw FormatError("vk: inconsistent element count");
    if (count == 0) throw FormatError("vk: missing io quotients");
    MockVerifyingKey vk;
    std::size_t at = 8;
    vk.alpha = g.g1_from_bytes(bytes.subspan(at, 32));
    at += 32;
    vk.beta = g.g2_from_bytes(bytes.subspan(at, 32));
    at += 32;
    vk.gamma = g.g2_from_bytes(bytes.subspan(at, 32));
    at += 32;
    vk.delta = g.g2_from_bytes(bytes.subspan(at, 32));
    at += 32;
    vk.io_quotients.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        vk.io_quotients.push_back(g.g1_from_bytes(bytes.subspan(at, 32)));
        at += 32;
    }
    vk.io_len = count - 1;
    return vk;
}

} // namespace bpfl
