#pragma once

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ipts/net/addr.hpp"
#include "ipts/net/event_loop.hpp"

namespace ipts::net {

// Link fault injection, applied at the receiving transport. Loss and delay are
// rolled per datagram from a seeded RNG so runs are reproducible; blocked peers
// model a network partition (dropped both directions).
struct ShimConfig {
    int loss_pct = 0;
    int delay_ms = 0;
    uint64_t seed = 1;
    std::vector<NetAddr> blocked;
};

class Transport {
public:
    using RecvHandler = std::function<void(const NetAddr& from, std::string_view data)>;

    virtual ~Transport() = default;
    virtual bool send(const NetAddr& to, std::string_view data) = 0;
    virtual NetAddr local_addr() const = 0;
    virtual bool is_datagram() const = 0;
    void set_recv_handler(RecvHandler h) { recv_ = std::move(h); }

protected:
    void deliver(const NetAddr& from, std::string_view data) {
        if (recv_) recv_(from, data);
    }
    RecvHandler recv_;
};

class UdpTransport : public Transport {
public:
    // Throws std::runtime_error if the address cannot be bound.
    UdpTransport(EventLoop& loop, const NetAddr& bind_addr);
    ~UdpTransport() override;

    bool send(const NetAddr& to, std::string_view data) override;
    NetAddr local_addr() const override { return local_; }
    bool is_datagram() const override { return true; }
    void set_shim(const ShimConfig& shim);
    int fd() const { return fd_; }

private:
    void on_readable();
    bool shim_drops(const NetAddr& peer);

    EventLoop& loop_;
    int fd_ = -1;
    NetAddr local_;
    ShimConfig shim_;
    std::mt19937_64 rng_;
};

// Stream transport framing SIP messages by header block + Content-Length.
// One connection per peer; outbound connections are made on demand.
class TcpTransport : public Transport {
public:
    TcpTransport(EventLoop& loop, const NetAddr& bind_addr);
    ~TcpTransport() override;

    bool send(const NetAddr& to, std::string_view data) override;
    NetAddr local_addr() const override { return local_; }
    bool is_datagram() const override { return false; }

private:
    struct Conn {
        int fd = -1;
        NetAddr peer;
        std::string inbuf;
    };
    void on_accept();
    void on_conn_readable(int fd);
    void close_conn(int fd);
    Conn* connect_to(const NetAddr& to);

    EventLoop& loop_;
    int listen_fd_ = -1;
    NetAddr local_;
    std::map<int, Conn> conns_;
    std::map<NetAddr, int> by_peer_;
};

// In-memory transport for unit tests: captures sends, lets tests inject
// receptions, never touches a socket.
class FakeTransport : public Transport {
public:
    explicit FakeTransport(NetAddr local = {"127.0.0.1", 5060}, bool datagram = true)
        : local_(std::move(local)), datagram_(datagram) {}

    bool send(const NetAddr& to, std::string_view data) override {
        sent.emplace_back(to, std::string(data));
        return true;
    }
    NetAddr local_addr() const override { return local_; }
    bool is_datagram() const override { return datagram_; }
    void inject(const NetAddr& from, std::string_view data) { deliver(from, data); }

    std::vector<std::pair<NetAddr, std::string>> sent;

private:
    NetAddr local_;
    bool datagram_;
};

}  // namespace ipts::net
