#include "clnp/host_backend.hpp"

#ifdef __linux__
#include <net/if.h>
#include <netpacket/packet.h>
#include <sys/ioctl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#endif

namespace clnp {

RawLink::RawLink(RawLink&& other) noexcept
    : fd_(other.fd_), ifindex_(other.ifindex_), mac_(other.mac_) {
    other.fd_ = -1;
}

RawLink& RawLink::operator=(RawLink&& other) noexcept {
    if (this != &other) {
#ifdef __linux__
        if (fd_ >= 0) ::close(fd_);
#endif
        fd_ = other.fd_;
        ifindex_ = other.ifindex_;
        mac_ = other.mac_;
        other.fd_ = -1;
    }
    return *this;
}

RawLink::~RawLink() {
#ifdef __linux__
    if (fd_ >= 0) ::close(fd_);
#endif
}

#ifdef __linux__

Result<RawLink, std::string> RawLink::open(const std::string& interface_name) {
    if (interface_name.size() >= IFNAMSIZ) return std::string("interface name too long");

    const int fd = ::socket(AF_PACKET, SOCK_RAW, 0);
    if (fd < 0) {
        return std::string("cannot open packet socket: ") + std::strerror(errno);
    }

    ifreq ifr{};
    std::strncpy(ifr.ifr_name, interface_name.c_str(), IFNAMSIZ - 1);
    if (::ioctl(fd, SIOCGIFINDEX, &ifr) < 0) {
        const std::string err = std::string("unknown interface: ") + std::strerror(errno);
        ::close(fd);
        return err;
    }
    const int ifindex = ifr.ifr_ifindex;

    Mac mac{};
    if (::ioctl(fd, SIOCGIFHWADDR, &ifr) == 0) {
        std::memcpy(mac.data(), ifr.ifr_hwaddr.sa_data, mac.size());
    }
    return RawLink(fd, ifindex, mac);
}

std::optional<std::string> RawLink::send(const Frame& frame) {
    if (fd_ < 0) return std::string("link not open");
    const Bytes wire = frame.encode();

    sockaddr_ll addr{};
    addr.sll_family = AF_PACKET;
    addr.sll_ifindex = ifindex_;
    addr.sll_halen = frame.dst_mac.size();
    std::memcpy(addr.sll_addr, frame.dst_mac.data(), frame.dst_mac.size());

    const ssize_t sent = ::sendto(fd_, wire.data(), wire.size(), 0,
                                  reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
    if (sent < 0) return std::string("send failed: ") + std::strerror(errno);
    if (static_cast<std::size_t>(sent) != wire.size()) return std::string("short send");
    return std::nullopt;
}

#else  // !__linux__

Result<RawLink, std::string> RawLink::open(const std::string&) {
    return std::string("raw packet sockets are not supported on this platform");
}

std::optional<std::string> RawLink::send(const Frame&) {
    return std::string("link not open");
}

#endif

}  // namespace clnp
