#include "ipts/net/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "ipts/util/log.hpp"
#include "ipts/util/strings.hpp"

namespace ipts::net {

namespace {

constexpr size_t kMaxTcpMessage = 65536;

bool to_sockaddr(const NetAddr& addr, sockaddr_in& sa) {
    std::memset(&sa, 0, sizeof(sa));
    sa.sin_family = AF_INET;
    sa.sin_port = htons(addr.port);
    std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
    return inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1;
}

NetAddr from_sockaddr(const sockaddr_in& sa) {
    char buf[INET_ADDRSTRLEN] = {0};
    inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof(buf));
    return NetAddr{buf, ntohs(sa.sin_port)};
}

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

bool addr_matches(const NetAddr& peer, const std::vector<NetAddr>& blocked) {
    for (const auto& b : blocked)
        if (b.host == peer.host && (b.port == 0 || b.port == peer.port)) return true;
    return false;
}

}  // namespace

// ---------------------------------------------------------------- UDP

UdpTransport::UdpTransport(EventLoop& loop, const NetAddr& bind_addr)
    : loop_(loop), rng_(1) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::runtime_error("udp socket() failed");
    int one = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa;
    if (!to_sockaddr(bind_addr, sa)) {
        ::close(fd_);
        throw std::runtime_error("bad bind address: " + bind_addr.to_string());
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        ::close(fd_);
        throw std::runtime_error("udp bind failed: " + bind_addr.to_string() + ": " +
                                 std::strerror(errno));
    }
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    getsockname(fd_, reinterpret_cast<sockaddr*>(&actual), &len);
    local_ = NetAddr{bind_addr.host, ntohs(actual.sin_port)};
    set_nonblocking(fd_);
    loop_.add_fd(fd_, [this] { on_readable(); });
}

UdpTransport::~UdpTransport() {
    if (fd_ >= 0) {
        loop_.remove_fd(fd_);
        ::close(fd_);
    }
}

void UdpTransport::set_shim(const ShimConfig& shim) {
    shim_ = shim;
    rng_.seed(shim.seed ? shim.seed : 1);
}

bool UdpTransport::shim_drops(const NetAddr& peer) {
    if (addr_matches(peer, shim_.blocked)) return true;
    if (shim_.loss_pct > 0 &&
        static_cast<int>(rng_() % 100) < shim_.loss_pct)
        return true;
    return false;
}

bool UdpTransport::send(const NetAddr& to, std::string_view data) {
    if (addr_matches(to, shim_.blocked)) return true;  // partition: silently dropped
    sockaddr_in sa;
    if (!to_sockaddr(to, sa)) return false;
    ssize_t n = ::sendto(fd_, data.data(), data.size(), 0, reinterpret_cast<sockaddr*>(&sa),
                         sizeof(sa));
    return n == static_cast<ssize_t>(data.size());
}

void UdpTransport::on_readable() {
    char buf[65536];
    while (true) {
        sockaddr_in sa{};
        socklen_t len = sizeof(sa);
        ssize_t n = ::recvfrom(fd_, buf, sizeof(buf), 0, reinterpret_cast<sockaddr*>(&sa), &len);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK) break;
            return;
        }
        if (n == 0) continue;
        NetAddr from = from_sockaddr(sa);
        if (shim_drops(from)) continue;
        if (shim_.delay_ms > 0) {
            std::string copy(buf, static_cast<size_t>(n));
            loop_.add_timer(shim_.delay_ms, [this, from, copy = std::move(copy)] {
                deliver(from, copy);
            });
        } else {
            deliver(from, std::string_view(buf, static_cast<size_t>(n)));
        }
    }
}

// ---------------------------------------------------------------- TCP

TcpTransport::TcpTransport(EventLoop& loop, const NetAddr& bind_addr) : loop_(loop) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("tcp socket() failed");
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa;
    if (!to_sockaddr(bind_addr, sa)) {
        ::close(listen_fd_);
        throw std::runtime_error("bad bind address: " + bind_addr.to_string());
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 ||
        ::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        throw std::runtime_error("tcp bind/listen failed: " + bind_addr.to_string());
    }
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&actual), &len);
    local_ = NetAddr{bind_addr.host, ntohs(actual.sin_port)};
    set_nonblocking(listen_fd_);
    loop_.add_fd(listen_fd_, [this] { on_accept(); });
}

TcpTransport::~TcpTransport() {
    if (listen_fd_ >= 0) {
        loop_.remove_fd(listen_fd_);
        ::close(listen_fd_);
    }
    for (auto& [fd, _] : conns_) {
        loop_.remove_fd(fd);
        ::close(fd);
    }
}

void TcpTransport::on_accept() {
    while (true) {
        sockaddr_in sa{};
        socklen_t len = sizeof(sa);
        int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
        if (fd < 0) break;
        set_nonblocking(fd);
        NetAddr peer = from_sockaddr(sa);
        conns_[fd] = Conn{fd, peer, {}};
        by_peer_[peer] = fd;
        loop_.add_fd(fd, [this, fd] { on_conn_readable(fd); });
    }
}

void TcpTransport::close_conn(int fd) {
    auto it = conns_.find(fd);
    if (it == conns_.end()) return;
    by_peer_.erase(it->second.peer);
    loop_.remove_fd(fd);
    ::close(fd);
    conns_.erase(it);
}

void TcpTransport::on_conn_readable(int fd) {
    auto it = conns_.find(fd);
    if (it == conns_.end()) return;
    Conn& c = it->second;
    char buf[16384];
    while (true) {
        ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK) break;
            close_conn(fd);
            return;
        }
        if (n == 0) {
            close_conn(fd);
            return;
        }
        c.inbuf.append(buf, static_cast<size_t>(n));
        if (c.inbuf.size() > kMaxTcpMessage) {
            log::warn("tcp: oversized frame from ", c.peer.to_string(), ", closing");
            close_conn(fd);
            return;
        }
    }
    // Extract complete messages: headers end at CRLFCRLF, body per Content-Length.
    while (true) {
        size_t hdr_end = c.inbuf.find("\r\n\r\n");
        if (hdr_end == std::string::npos) break;
        size_t body_len = 0;
        std::string_view headers(c.inbuf.data(), hdr_end);
        size_t pos = 0;
        while (pos < headers.size()) {
            size_t eol = headers.find("\r\n", pos);
            std::string_view line =
                headers.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
            size_t colon = line.find(':');
            if (colon != std::string_view::npos &&
                util::iequals(util::trim(line.substr(0, colon)), "Content-Length")) {
                auto v = util::parse_int<size_t>(util::trim(line.substr(colon + 1)));
                if (v) body_len = *v;
            }
            if (eol == std::string_view::npos) break;
            pos = eol + 2;
        }
        size_t total = hdr_end + 4 + body_len;
        if (c.inbuf.size() < total) break;
        std::string msg = c.inbuf.substr(0, total);
        c.inbuf.erase(0, total);
        NetAddr peer = c.peer;
        deliver(peer, msg);
        if (conns_.find(fd) == conns_.end()) return;  // handler closed us
    }
}

TcpTransport::Conn* TcpTransport::connect_to(const NetAddr& to) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return nullptr;
    sockaddr_in sa;
    if (!to_sockaddr(to, sa)) {
        ::close(fd);
        return nullptr;
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        ::close(fd);
        return nullptr;
    }
    set_nonblocking(fd);
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    conns_[fd] = Conn{fd, to, {}};
    by_peer_[to] = fd;
    loop_.add_fd(fd, [this, fd] { on_conn_readable(fd); });
    return &conns_[fd];
}

bool TcpTransport::send(const NetAddr& to, std::string_view data) {
    Conn* c = nullptr;
    auto it = by_peer_.find(to);
    if (it != by_peer_.end()) {
        c = &conns_[it->second];
    } else {
        c = connect_to(to);
    }
    if (!c) return false;
    size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::send(c->fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK) continue;  // loopback: transient
            close_conn(c->fd);
            return false;
        }
        off += static_cast<size_t>(n);
    }
    return true;
}

}  // namespace ipts::net
