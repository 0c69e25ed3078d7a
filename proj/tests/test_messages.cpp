#include <doctest.h>

#include "bpfl/errors.hpp"
#include "bpfl/messages.hpp"
#include "bpfl/transport.hpp"

using namespace bpfl;

namespace {

bool body_equal(const Field& f, const Envelope& a, const Envelope& b) {
    if (a.round != b.round || a.sender != b.sender || a.body.index() != b.body.index())
        return false;
    return serialize_message(f, a) == serialize_message(f, b);
}

} // namespace

TEST_CASE("every message kind round-trips bit-exactly") {
    Field f(bn254_scalar_params());
    Rng rng(1);

    std::vector<Envelope> messages;
    messages.push_back({3, 1, SeedShareMsg{PaillierCiphertext{mpz_class("123456789012345678901234567890"), 77}}});
    messages.push_back({3, 0, SeedAggregateMsg{PaillierCiphertext{mpz_class("999"), 77}}});
    messages.push_back({0, 4, HashCommitMsg{f.sample(rng)}});
    messages.push_back({2, 0, GlobalModelMsg{EncodedSum{{f.sample(rng), f.sample(rng)}, 5}}});
    messages.push_back({2, 0, ProofParamsMsg{{0.5, -1.25, 3.75}, 0.99, 0.93}});
    messages.push_back(
        {7, 9, SubmissionMsg{{f.sample(rng)}, {0x00, 0x00, 0x00, 0x02, 0xab, 0xcd}}});

    for (const Envelope& env : messages) {
        std::vector<std::uint8_t> bytes = serialize_message(f, env);
        Envelope back = parse_message(f, bytes);
        CHECK(body_equal(f, env, back));
        CHECK(serialize_message(f, back) == bytes);
    }
}

TEST_CASE("parser rejects malformed frames with format errors") {
    Field f(bn254_scalar_params());
    Envelope env{1, 2, HashCommitMsg{f.from_u64(5)}};
    std::vector<std::uint8_t> bytes = serialize_message(f, env);

    std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
    CHECK_THROWS_AS(parse_message(f, truncated), FormatError);

    std::vector<std::uint8_t> trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(parse_message(f, trailing), FormatError);

    std::vector<std::uint8_t> bad_tag = bytes;
    bad_tag[0] = 0x7f;
    CHECK_THROWS_AS(parse_message(f, bad_tag), FormatError);
}

TEST_CASE("in-process bus: FIFO per recipient, byte accounting, digest") {
    InProcBus bus;
    bus.send(1, 0, {1, 2, 3});
    bus.send(2, 0, {4, 5});
    bus.send(0, 2, {9});
    auto first = bus.try_recv(0);
    auto second = bus.try_recv(0);
    REQUIRE(first);
    REQUIRE(second);
    CHECK(*first == std::vector<std::uint8_t>{1, 2, 3});
    CHECK(*second == std::vector<std::uint8_t>{4, 5});
    CHECK_FALSE(bus.try_recv(7));
    CHECK(bus.counters(1).bytes_sent == 3);
    CHECK(bus.counters(0).bytes_received == 5);
    CHECK(bus.counters(0).bytes_sent == 1);
    std::uint64_t digest = bus.transcript_digest();
    CHECK(digest != 0);
    bus.reset_counters();
    CHECK(bus.counters(1).bytes_sent == 0);
}

TEST_CASE("tcp loopback bus delivers length-prefixed frames through real sockets") {
    TcpLoopbackBus bus(3);
    std::vector<std::uint8_t> big(100000);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<std::uint8_t>(i * 31);
    bus.send(1, 2, big);
    bus.send(3, 2, {0xde, 0xad});
    CHECK(must_recv(bus, 2) == big);
    CHECK(must_recv(bus, 2) == std::vector<std::uint8_t>{0xde, 0xad});
    CHECK(bus.counters(2).bytes_received == big.size() + 2);
    CHECK_FALSE(bus.try_recv(1));
}

TEST_CASE("transports count exactly the serialized message lengths") {
    Field f(bn254_scalar_params());
    Envelope env{4, 2, ProofParamsMsg{{1.0, 2.0}, 0.9, 0.8}};
    std::vector<std::uint8_t> frame = serialize_message(f, env);

    InProcBus in_proc;
    in_proc.send(2, 0, frame);
    CHECK(in_proc.counters(2).bytes_sent == frame.size());

    TcpLoopbackBus tcp(2);
    tcp.send(2, 0, frame);
    CHECK(must_recv(tcp, 0) == frame);
    CHECK(tcp.counters(2).bytes_sent == frame.size());
    CHECK(tcp.counters(0).bytes_received == frame.size());
}
