#include "bpfl/messages.hpp"

#include <bit>
#include <cstring>

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {

struct Writer {
    std::vector<std::uint8_t> out;

    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void fe(const Field& f, const Fe& v) {
        auto bytes = f.to_bytes(v);
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    void mpz(const mpz_class& v) {
        std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
        std::vector<std::uint8_t> buf(count ? count : 1, 0);
        std::size_t written = 0;
        mpz_export(buf.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
        u32(static_cast<std::uint32_t>(written));
        out.insert(out.end(), buf.begin(), buf.begin() + static_cast<long>(written));
    }
    void fe_vector(const Field& f, std::span<const Fe> vs) {
        u32(static_cast<std::uint32_t>(vs.size()));
        for (const Fe& v : vs) fe(f, v);
    }
    void f64_vector(std::span<const double> vs) {
        u32(static_cast<std::uint32_t>(vs.size()));
        for (double v : vs) f64(v);
    }
    void bytes(std::span<const std::uint8_t> b) {
        u32(static_cast<std::uint32_t>(b.size()));
        out.insert(out.end(), b.begin(), b.end());
    }
};

struct Reader {
    std::span<const std::uint8_t> in;
    std::size_t at = 0;

    void need(std::size_t count) const {
        if (at + count > in.size())
            throw FormatError("message: truncated (need " + std::to_string(count) + " bytes at " +
                              std::to_string(at) + ", have " + std::to_string(in.size()) + ")");
    }
    std::uint8_t u8() {
        need(1);
        return in[at++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | in[at++];
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | in[at++];
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    Fe fe(const Field& f) {
        need(32);
        Fe v = f.from_bytes(in.subspan(at, 32));
        at += 32;
        return v;
    }
    mpz_class mpz() {
        std::uint32_t len = u32();
        need(len);
        mpz_class v;
        if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, in.data() + at);
        at += len;
        return v;
    }
    std::vector<Fe> fe_vector(const Field& f) {
        std::uint32_t count = u32();
        need(static_cast<std::size_t>(count) * 32);
        std::vector<Fe> vs;
        vs.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) vs.push_back(fe(f));
        return vs;
    }
    std::vector<double> f64_vector() {
        std::uint32_t count = u32();
        need(static_cast<std::size_t>(count) * 8);
        std::vector<double> vs;
        vs.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) vs.push_back(f64());
        return vs;
    }
    std::vector<std::uint8_t> bytes() {
        std::uint32_t len = u32();
        need(len);
        std::vector<std::uint8_t> b(in.begin() + static_cast<long>(at),
                                    in.begin() + static_cast<long>(at + len));
        at += len;
        return b;
    }
    void done() const {
        if (at != in.size()) throw FormatError("message: trailing bytes");
    }
};

} // namespace

std::vector<std::uint8_t> serialize_message(const Field& field, const Envelope& env) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(env.tag()));
    w.u32(env.round);
    w.u32(env.sender);
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, SeedShareMsg>) {
                w.u64(body.share.key_tag);
                w.mpz(body.share.value);
            } else if constexpr (std::is_same_v<T, SeedAggregateMsg>) {
                w.u64(body.aggregate.key_tag);
                w.mpz(body.aggregate.value);
            } else if constexpr (std::is_same_v<T, HashCommitMsg>) {
                w.fe(field, body.hash_value);
            } else if constexpr (std::is_same_v<T, GlobalModelMsg>) {
                w.u32(body.payload.count);
                w.fe_vector(field, body.payload.sum);
            } else if constexpr (std::is_same_v<T, ProofParamsMsg>) {
                w.f64(body.tau_c);
                w.f64(body.tau_e);
                w.f64_vector(body.ref_model);
            } else if constexpr (std::is_same_v<T, SubmissionMsg>) {
                w.fe_vector(field, body.masked_model);
                w.bytes(body.proof_bytes);
            }
        },
        env.body);
    return std::move(w.out);
}

Envelope parse_message(const Field& field, std::span<const std::uint8_t> bytes) {
    Reader r{bytes};
    auto tag = static_cast<MsgTag>(r.u8());
    Envelope env;
    env.round = r.u32();
    env.sender = r.u32();
    switch (tag) {
        case MsgTag::SeedShare: {
            SeedShareMsg m;
            m.share.key_tag = r.u64();
            m.share.value = r.mpz();
            env.body = std::move(m);
            break;
        }
        case MsgTag::SeedAggregate: {
            SeedAggregateMsg m;
            m.aggregate.key_tag = r.u64();
            m.aggregate.value = r.mpz();
            env.body = std::move(m);
            break;
        }
        case MsgTag::HashCommit: {
            env.body = HashCommitMsg{r.fe(field)};
            break;
        }
        case MsgTag::GlobalModel: {
            GlobalModelMsg m;
            m.payload.count = r.u32();
            m.payload.sum = r.fe_vector(field);
            env.body = std::move(m);
            break;
        }
        case MsgTag::ProofParams: {
            ProofParamsMsg m;
            m.tau_c = r.f64();
            m.tau_e = r.f64();
            m.ref_model = r.f64_vector();
            env.body = std::move(m);
            break;
        }
        case MsgTag::Submission: {
            SubmissionMsg m;
            m.masked_model = r.fe_vector(field);
            m.proof_bytes = r.bytes();
            env.body = std::move(m);
            break;
        }
        default:
            throw FormatError("message: unknown tag " + std::to_string(static_cast<int>(tag)));
    }
    r.done();
    return env;
}

} // namespace bpfl
