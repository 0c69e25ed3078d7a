#include "bpfl/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {
std::uint64_t fnv_step(std::uint64_t h, const std::vector<std::uint8_t>& frame) {
    for (std::uint8_t b : frame) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}
} // namespace

std::vector<std::uint8_t> must_recv(Bus& bus, std::uint32_t who) {
    // the loopback transports are effectively synchronous; a short spin
    // covers scheduling gaps on the TCP path
    for (int attempt = 0; attempt < 20000; ++attempt) {
        if (auto frame = bus.try_recv(who)) return std::move(*frame);
        if (attempt > 100) usleep(100);
    }
    throw ProtocolError("bus: expected frame for endpoint " + std::to_string(who));
}

void InProcBus::send(std::uint32_t from, std::uint32_t to, std::vector<std::uint8_t> frame) {
    std::lock_guard lock(mu_);
    counters_[from].bytes_sent += frame.size();
    counters_[from].frames_sent += 1;
    digest_ = fnv_step(digest_, frame);
    queues_[to].push_back(std::move(frame));
}

std::optional<std::vector<std::uint8_t>> InProcBus::try_recv(std::uint32_t who) {
    std::lock_guard lock(mu_);
    auto it = queues_.find(who);
    if (it == queues_.end() || it->second.empty()) return std::nullopt;
    std::vector<std::uint8_t> frame = std::move(it->second.front());
    it->second.pop_front();
    counters_[who].bytes_received += frame.size();
    return frame;
}

Bus::Counters InProcBus::counters(std::uint32_t who) const {
    std::lock_guard lock(mu_);
    auto it = counters_.find(who);
    return it == counters_.end() ? Counters{} : it->second;
}

void InProcBus::reset_counters() {
    std::lock_guard lock(mu_);
    counters_.clear();
    digest_ = 0xcbf29ce484222325ULL;
}

std::uint64_t InProcBus::transcript_digest() const {
    std::lock_guard lock(mu_);
    return digest_;
}

TcpLoopbackBus::TcpLoopbackBus(std::uint32_t max_id) {
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw ProtocolError("tcp bus: socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listener, 64) != 0) {
        ::close(listener);
        throw ProtocolError("tcp bus: bind/listen failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);

    endpoints_.reserve(max_id + 1);
    for (std::uint32_t id = 0; id <= max_id; ++id) {
        int writer = ::socket(AF_INET, SOCK_STREAM, 0);
        if (writer < 0 || ::connect(writer, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            if (writer >= 0) ::close(writer);
            ::close(listener);
            throw ProtocolError("tcp bus: connect failed");
        }
        int reader = ::accept(listener, nullptr, nullptr);
        if (reader < 0) {
            ::close(writer);
            ::close(listener);
            throw ProtocolError("tcp bus: accept failed");
        }
        int flag = 1;
        ::setsockopt(writer, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof flag);
        int flags = ::fcntl(reader, F_GETFL, 0);
        ::fcntl(reader, F_SETFL, flags | O_NONBLOCK);
        auto ep = std::make_unique<Endpoint>();
        ep->write_fd = writer;
        ep->read_fd = reader;
        endpoints_.push_back(std::move(ep));
    }
    ::close(listener);
}

TcpLoopbackBus::~TcpLoopbackBus() {
    for (auto& ep : endpoints_) {
        if (ep->write_fd >= 0) ::close(ep->write_fd);
        if (ep->read_fd >= 0) ::close(ep->read_fd);
    }
}

void TcpLoopbackBus::send(std::uint32_t from, std::uint32_t to, std::vector<std::uint8_t> frame) {
    if (to >= endpoints_.size()) throw ProtocolError("tcp bus: unknown endpoint");
    std::vector<std::uint8_t> framed;
    framed.reserve(frame.size() + 4);
    std::uint32_t n = static_cast<std::uint32_t>(frame.size());
    for (int i = 3; i >= 0; --i) framed.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    framed.insert(framed.end(), frame.begin(), frame.end());

    Endpoint& ep = *endpoints_[to];
    {
        std::lock_guard wlock(ep.write_mu);
        std::size_t sent = 0;
        while (sent < framed.size()) {
            ssize_t k = ::write(ep.write_fd, framed.data() + sent, framed.size() - sent);
            if (k < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError("tcp bus: write failed");
            }
            sent += static_cast<std::size_t>(k);
        }
    }
    std::lock_guard lock(mu_);
    counters_[from].bytes_sent += frame.size();
    counters_[from].frames_sent += 1;
    digest_ = fnv_step(digest_, frame);
}

std::optional<std::vector<std::uint8_t>> TcpLoopbackBus::try_recv(std::uint32_t who) {
    if (who >= endpoints_.size()) throw ProtocolError("tcp bus: unknown endpoint");
    Endpoint& ep = *endpoints_[who];
    std::uint8_t chunk[16384];
    for (;;) {
        ssize_t k = ::read(ep.read_fd, chunk, sizeof chunk);
        if (k > 0) {
            ep.buffer.insert(ep.buffer.end(), chunk, chunk + k);
            continue;
        }
        if (k < 0 && errno == EINTR) continue;
        break; // would block or closed
    }
    if (ep.buffer.size() < 4) return std::nullopt;
    std::uint32_t n = (std::uint32_t(ep.buffer[0]) << 24) | (std::uint32_t(ep.buffer[1]) << 16) |
                      (std::uint32_t(ep.buffer[2]) << 8) | std::uint32_t(ep.buffer[3]);
    if (ep.buffer.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
    std::vector<std::uint8_t> frame(ep.buffer.begin() + 4, ep.buffer.begin() + 4 + n);
    ep.buffer.erase(ep.buffer.begin(), ep.buffer.begin() + 4 + n);
    std::lock_guard lock(mu_);
    counters_[who].bytes_received += frame.size();
    return frame;
}

Bus::Counters TcpLoopbackBus::counters(std::uint32_t who) const {
    std::lock_guard lock(mu_);
    auto it = counters_.find(who);
    return it == counters_.end() ? Counters{} : it->second;
}

void TcpLoopbackBus::reset_counters() {
    std::lock_guard lock(mu_);
    counters_.clear();
    digest_ = 0xcbf29ce484222325ULL;
}

std::uint64_t TcpLoopbackBus::transcript_digest() const {
    std::lock_guard lock(mu_);
    return digest_;
}

} // namespace bpfl
