#pragma once

#include "bms/mocap/marker_frame.hpp"
#include "bms/stream/message.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace bms::stream {

/// WebSocket `/stream` broadcaster plus HTTP `GET /model`.
///
/// publish() never blocks on the network: each client owns a bounded queue; when it is full the
/// oldest message is dropped and the client later receives a `gap` message with the drop count.
/// seq is numbered per connection, so it strictly increases on every client even across gaps.
/// I/O runs on one background thread.
class StreamServer {
public:
    StreamServer(const std::string& address, unsigned short port, std::string model_json,
                 std::size_t queue_capacity);
    ~StreamServer();

    StreamServer(const StreamServer&) = delete;
    StreamServer& operator=(const StreamServer&) = delete;

    /// Bound port (useful when constructed with port 0).
    unsigned short port() const;

    void publish(const StreamMessage& m);

    std::size_t client_count() const;
    bool wait_for_clients(std::size_t n, std::chrono::milliseconds timeout) const;

    /// Waits until every client queue is empty.
    bool flush(std::chrono::milliseconds timeout) const;

    /// Closes client connections and stops the I/O thread. Idempotent.
    void stop();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

using LiveFrameSink = std::function<void(const std::vector<std::string>& labels, const MarkerFrame&)>;

/// Accepts one TCP connection and feeds every JsonLines marker frame it sends to `sink` until the
/// peer closes. `on_listening` receives the bound port. Returns the number of frames received.
std::size_t receive_frames(const std::string& address, unsigned short port, const LiveFrameSink& sink,
                           const std::function<void(unsigned short)>& on_listening = {});

}  // namespace bms::stream
