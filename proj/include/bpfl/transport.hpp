#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace bpfl {

/// Message transport between protocol roles. All cross-role data passes
/// through serialized frames; no shared references cross the boundary.
class Bus {
public:
    virtual ~Bus() = default;

    virtual void send(std::uint32_t from, std::uint32_t to, std::vector<std::uint8_t> frame) = 0;
    /// Next pending frame for `who`, FIFO per recipient.
    virtual std::optional<std::vector<std::uint8_t>> try_recv(std::uint32_t who) = 0;

    struct Counters {
        std::uint64_t bytes_sent = 0;
        std::uint64_t bytes_received = 0;
        std::uint64_t frames_sent = 0;
    };
    virtual Counters counters(std::uint32_t who) const = 0;
    virtual void reset_counters() = 0;
    /// FNV-1a over all frames in send order since the last reset; used for
    /// transcript-determinism checks.
    virtual std::uint64_t transcript_digest() const = 0;
};

/// Blocking receive; throws ProtocolError if nothing arrives.
std::vector<std::uint8_t> must_recv(Bus& bus, std::uint32_t who);

/// In-process bus: frames are copied byte vectors in per-recipient queues.
class InProcBus : public Bus {
public:
    void send(std::uint32_t from, std::uint32_t to, std::vector<std::uint8_t> frame) override;
    std::optional<std::vector<std::uint8_t>> try_recv(std::uint32_t who) override;
    Counters counters(std::uint32_t who) const override;
    void reset_counters() override;
    std::uint64_t transcript_digest() const override;

private:
    mutable std::mutex mu_;
    std::map<std::uint32_t, std::deque<std::vector<std::uint8_t>>> queues_;
    std::map<std::uint32_t, Counters> counters_;
    std::uint64_t digest_ = 0xcbf29ce484222325ULL;
};

/// Loopback TCP bus: one kernel TCP connection per endpoint; every frame is
/// written as a 4-byte big-endian length followed by the payload. Exercises
/// the documented wire framing end to end.
class TcpLoopbackBus : public Bus {
public:
    /// Opens connections for endpoint ids 0..max_id.
    explicit TcpLoopbackBus(std::uint32_t max_id);
    ~TcpLoopbackBus() override;

    TcpLoopbackBus(const TcpLoopbackBus&) = delete;
    TcpLoopbackBus& operator=(const TcpLoopbackBus&) = delete;

    void send(std::uint32_t from, std::uint32_t to, std::vector<std::uint8_t> frame) override;
    std::optional<std::vector<std::uint8_t>> try_recv(std::uint32_t who) override;
    Counters counters(std::uint32_t who) const override;
    void reset_counters() override;
    std::uint64_t transcript_digest() const override;

private:
    struct Endpoint {
        int write_fd = -1;
        int read_fd = -1;
        std::vector<std::uint8_t> buffer; ///< partially read stream data
        std::mutex write_mu;
    };
    std::vector<std::unique_ptr<Endpoint>> endpoints_;
    mutable std::mutex mu_;
    std::map<std::uint32_t, Counters> counters_;
    std::uint64_t digest_ = 0xcbf29ce484222325ULL;
};

} // namespace bpfl
