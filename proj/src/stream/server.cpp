#include "bms/stream/server.hpp"

#include "bms/errors.hpp"
#include "bms/mocap/recording_io.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace bms::stream {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

struct Outgoing {
    MessageKind kind;
    std::string payload;  // serialized JSON
};

std::string frame_line(std::string_view kind, std::uint64_t seq, const std::string& payload) {
    std::string s = "{\"v\":" + std::to_string(kSchemaVersion) + ",\"kind\":\"";
    s += kind;
    s += "\",\"seq\":" + std::to_string(seq) + ",\"payload\":" + payload + "}\n";
    return s;
}

class Hub;

class WsConn : public std::enable_shared_from_this<WsConn> {
public:
    WsConn(tcp::socket socket, std::size_t capacity, Hub& hub)
        : ws_(std::move(socket)), capacity_(capacity), hub_(hub) {}

    void accept(http::request<http::string_body> req);
    void enqueue(const std::shared_ptr<const Outgoing>& m);
    bool idle() const {
        std::lock_guard lock(mu_);
        return closed_ || (queue_.empty() && dropped_ == 0 && !writing_);
    }
    bool closed() const {
        std::lock_guard lock(mu_);
        return closed_;
    }
    void close();

private:
    void write_next();
    void read_loop();
    void mark_closed();

    websocket::stream<beast::tcp_stream> ws_;
    std::size_t capacity_;
    Hub& hub_;
    mutable std::mutex mu_;
    std::deque<std::shared_ptr<const Outgoing>> queue_;
    std::size_t dropped_ = 0;
    bool writing_ = false;
    bool closed_ = false;
    bool open_ = false;
    std::uint64_t seq_ = 0;
    std::string current_;
    beast::flat_buffer read_buf_;
};

class Hub {
public:
    void add(const std::shared_ptr<WsConn>& c) {
        {
            std::lock_guard lock(mu_);
            conns_.push_back(c);
        }
        cv_.notify_all();
    }
    void removed() { cv_.notify_all(); }

    std::vector<std::shared_ptr<WsConn>> live() const {
        std::lock_guard lock(mu_);
        std::vector<std::shared_ptr<WsConn>> out;
        for (const auto& w : conns_) {
            if (auto c = w.lock(); c && !c->closed()) out.push_back(c);
        }
        return out;
    }

    bool wait(std::size_t n, std::chrono::milliseconds timeout) const {
        std::unique_lock lock(mu_);
        return cv_.wait_for(lock, timeout, [&] {
            std::size_t count = 0;
            for (const auto& w : conns_) {
                if (auto c = w.lock(); c && !c->closed()) ++count;
            }
            return count >= n;
        });
    }

    void prune() {
        std::lock_guard lock(mu_);
        std::erase_if(conns_, [](const std::weak_ptr<WsConn>& w) {
            auto c = w.lock();
            return !c || c->closed();
        });
    }

private:
    mutable std::mutex mu_;
    mutable std::condition_variable_any cv_;
    std::vector<std::weak_ptr<WsConn>> conns_;
};

void WsConn::accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
        if (ec) {
            self->mark_closed();
            return;
        }
        {
            std::lock_guard lock(self->mu_);
            self->open_ = true;
        }
        self->hub_.add(self);
        self->read_loop();
    });
}

void WsConn::enqueue(const std::shared_ptr<const Outgoing>& m) {
    std::lock_guard lock(mu_);
    if (closed_ || !open_) return;
    if (queue_.size() >= capacity_) {
        queue_.pop_front();
        ++dropped_;
    }
    queue_.push_back(m);
    if (!writing_) {
        writing_ = true;
        net::post(ws_.get_executor(), [self = shared_from_this()] { self->write_next(); });
    }
}

void WsConn::write_next() {
    {
        std::lock_guard lock(mu_);
        if (closed_ || (queue_.empty() && dropped_ == 0)) {
            writing_ = false;
            return;
        }
        if (dropped_ > 0) {
            current_ = frame_line(to_string(MessageKind::Gap), ++seq_,
                                  "{\"dropped\":" + std::to_string(dropped_) + "}");
            dropped_ = 0;
        } else {
            const auto m = queue_.front();
            queue_.pop_front();
            current_ = frame_line(to_string(m->kind), ++seq_, m->payload);
        }
    }
    ws_.async_write(net::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
            self->mark_closed();
            return;
        }
        self->write_next();
    });
}

void WsConn::read_loop() {
    ws_.async_read(read_buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
            self->mark_closed();
            return;
        }
        self->read_buf_.consume(self->read_buf_.size());
        self->read_loop();
    });
}

void WsConn::mark_closed() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
        writing_ = false;
        queue_.clear();
        dropped_ = 0;
    }
    hub_.removed();
}

void WsConn::close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
        if (self->closed()) return;
        self->ws_.async_close(websocket::close_code::normal,
                              [self](beast::error_code) { self->mark_closed(); });
    });
}

class HttpConn : public std::enable_shared_from_this<HttpConn> {
public:
    HttpConn(tcp::socket socket, const std::string& model_json, std::size_t capacity, Hub& hub)
        : stream_(std::move(socket)), model_json_(model_json), capacity_(capacity), hub_(hub) {}

    void start() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (!ec) self->route();
        });
    }

private:
    void route() {
        stream_.expires_never();
        if (websocket::is_upgrade(req_)) {
            if (req_.target() == "/stream") {
                auto ws = std::make_shared<WsConn>(stream_.release_socket(), capacity_, hub_);
                ws->accept(std::move(req_));
                return;
            }
            respond(http::status::not_found, "text/plain", "unknown endpoint\n");
            return;
        }
        if (req_.target() == "/model") {
            if (req_.method() != http::verb::get) {
                respond(http::status::method_not_allowed, "text/plain", "GET only\n");
            } else {
                respond(http::status::ok, "application/json", model_json_);
            }
            return;
        }
        respond(http::status::not_found, "text/plain", "unknown endpoint\n");
    }

    void respond(http::status status, const char* type, const std::string& body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::content_type, type);
        res->keep_alive(false);
        res->body() = body;
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    beast::tcp_stream stream_;
    std::string model_json_;
    std::size_t capacity_;
    Hub& hub_;
    beast::flat_buffer buf_;
    http::request<http::string_body> req_;
};

}  // namespace

struct StreamServer::Impl {
    net::io_context ioc{1};
    tcp::acceptor acceptor{ioc};
    std::string model_json;
    std::size_t capacity = 1;
    Hub hub;
    std::thread thread;
    bool stopped = false;
    std::mutex stop_mu;

    void do_accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            std::make_shared<HttpConn>(std::move(socket), model_json, capacity, hub)->start();
            hub.prune();
            do_accept();
        });
    }
};

StreamServer::StreamServer(const std::string& address, unsigned short port, std::string model_json,
                           std::size_t queue_capacity)
    : impl_(std::make_shared<Impl>()) {
    if (queue_capacity == 0) throw ParameterError("client queue capacity must be positive");
    impl_->model_json = std::move(model_json);
    impl_->capacity = queue_capacity;
    try {
        const tcp::endpoint ep(net::ip::make_address(address), port);
        impl_->acceptor.open(ep.protocol());
        impl_->acceptor.set_option(net::socket_base::reuse_address(true));
        impl_->acceptor.bind(ep);
        impl_->acceptor.listen(net::socket_base::max_listen_connections);
    } catch (const boost::system::system_error& e) {
        throw Error("cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
    }
    impl_->do_accept();
    impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
}

StreamServer::~StreamServer() { stop(); }

unsigned short StreamServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void StreamServer::publish(const StreamMessage& m) {
    auto out = std::make_shared<const Outgoing>(Outgoing{m.kind, m.payload.dump()});
    for (const auto& c : impl_->hub.live()) c->enqueue(out);
}

std::size_t StreamServer::client_count() const { return impl_->hub.live().size(); }

bool StreamServer::wait_for_clients(std::size_t n, std::chrono::milliseconds timeout) const {
    return impl_->hub.wait(n, timeout);
}

bool StreamServer::flush(std::chrono::milliseconds timeout) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        const auto conns = impl_->hub.live();
        if (std::all_of(conns.begin(), conns.end(), [](const auto& c) { return c->idle(); })) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return false;
}

void StreamServer::stop() {
    std::lock_guard lock(impl_->stop_mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
    net::post(impl_->ioc, [impl = impl_] {
        beast::error_code ignored;
        impl->acceptor.close(ignored);
    });
    for (const auto& c : impl_->hub.live()) c->close();
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(500);
    while (impl_->hub.live().size() > 0 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    impl_->ioc.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t receive_frames(const std::string& address, unsigned short port, const LiveFrameSink& sink,
                           const std::function<void(unsigned short)>& on_listening) {
    net::io_context ioc;
    tcp::acceptor acceptor(ioc);
    tcp::socket socket(ioc);
    try {
        const tcp::endpoint ep(net::ip::make_address(address), port);
        acceptor.open(ep.protocol());
        acceptor.set_option(net::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen(1);
        if (on_listening) on_listening(acceptor.local_endpoint().port());
        acceptor.accept(socket);
    } catch (const boost::system::system_error& e) {
        throw Error("cannot accept frames on " + address + ":" + std::to_string(port) + ": " + e.what());
    }
    JsonlFrameDecoder decoder;
    std::size_t frames = 0;
    std::string buffer;
    boost::system::error_code ec;
    while (true) {
        const std::size_t n = net::read_until(socket, net::dynamic_buffer(buffer), '\n', ec);
        if (ec && n == 0) {
            if (!buffer.empty()) {
                if (auto f = decoder.decode(buffer)) {
                    sink(decoder.labels(), *f);
                    ++frames;
                }
            }
            break;
        }
        const std::string line = buffer.substr(0, n - 1);
        buffer.erase(0, n);
        if (auto f = decoder.decode(line)) {
            sink(decoder.labels(), *f);
            ++frames;
        }
    }
    return frames;
}

}  // namespace bms::stream
