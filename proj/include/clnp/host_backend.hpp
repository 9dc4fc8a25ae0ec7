#pragma once

#include <optional>
#include <string>

#include "clnp/frame.hpp"
#include "clnp/result.hpp"

namespace clnp {

/// Optional host backend: writes frames to a real network interface
/// through a raw packet socket. Available on Linux with CAP_NET_RAW;
/// open() reports an error anywhere else. Not used by the simulator or
/// the acceptance tests.
class RawLink {
public:
    RawLink(const RawLink&) = delete;
    RawLink& operator=(const RawLink&) = delete;
    RawLink(RawLink&& other) noexcept;
    RawLink& operator=(RawLink&& other) noexcept;
    ~RawLink();

    static Result<RawLink, std::string> open(const std::string& interface_name);

    /// Sends one frame; returns an error message on failure.
    std::optional<std::string> send(const Frame& frame);

    /// Hardware address of the opened interface.
    const Mac& mac() const { return mac_; }

private:
    RawLink(int fd, int ifindex, Mac mac) : fd_(fd), ifindex_(ifindex), mac_(mac) {}

    int fd_ = -1;
    int ifindex_ = 0;
    Mac mac_{};
};

}  // namespace clnp
