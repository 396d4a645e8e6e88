#include "bms/analytics/report.hpp"
#include "bms/errors.hpp"
#include "bms/mocap/recording_io.hpp"
#include "bms/mocap/synthesize.hpp"
#include "bms/stream/message.hpp"
#include "bms/stream/server.hpp"
#include "bms/stream/session.hpp"

#include "support.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>
#include <thread>

using namespace bms;
using namespace bms::stream;

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class WsClient {
public:
    explicit WsClient(unsigned short port) : ws_(ioc_) {
        tcp::resolver resolver(ioc_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/stream");
    }

    StreamMessage read() {
        beast::flat_buffer buf;
        ws_.read(buf);
        return decode(beast::buffers_to_string(buf.data()));
    }

    std::vector<StreamMessage> read_until_last() {
        std::vector<StreamMessage> out;
        for (;;) {
            out.push_back(read());
            if (out.back().kind != MessageKind::Gap && out.back().payload.value("last", false)) return out;
        }
    }

private:
    net::io_context ioc_;
    beast::websocket::stream<tcp::socket> ws_;
};

std::pair<int, std::string> http_get(unsigned short port, const std::string& target,
                                     beast::http::verb verb = beast::http::verb::get) {
    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::tcp_stream stream(ioc);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    beast::http::request<beast::http::string_body> req{verb, target, 11};
    req.set(beast::http::field::host, "127.0.0.1");
    beast::http::write(stream, req);
    beast::flat_buffer buf;
    beast::http::response<beast::http::string_body> res;
    beast::http::read(stream, buf, res);
    return {res.result_int(), res.body()};
}

Recording empty_recording() {
    Recording rec;
    rec.labels = markers::required_labels();
    return rec;
}

std::vector<StreamMessage> collect(const Recording& rec, const EngineConfig& cfg = {}) {
    std::vector<StreamMessage> msgs;
    run_session(rec, "s1", model::builtin_model(model::ExertionPattern::WristOnly), cfg,
                [&](const StreamMessage& m) { msgs.push_back(m); });
    return msgs;
}

std::size_t count_kind(const std::vector<StreamMessage>& msgs, MessageKind k) {
    return static_cast<std::size_t>(
        std::count_if(msgs.begin(), msgs.end(), [&](const StreamMessage& m) { return m.kind == k; }));
}

}  // namespace

TEST_CASE("message encoding") {
    StreamMessage m{MessageKind::Feedback, 42, Json{{"a", 1}, {"b", "x"}}};
    const auto line = encode(m);
    CHECK(line == "{\"v\":1,\"kind\":\"feedback\",\"seq\":42,\"payload\":{\"a\":1,\"b\":\"x\"}}\n");
    const auto back = decode(line);
    CHECK(back.kind == MessageKind::Feedback);
    CHECK(back.seq == 42);
    CHECK(back.payload == m.payload);
    CHECK_THROWS_AS(decode("{\"v\":2,\"kind\":\"frame\",\"seq\":1,\"payload\":{}}"), ParseError);
    CHECK_THROWS_AS(decode("{\"v\":1,\"kind\":\"nope\",\"seq\":1,\"payload\":{}}"), ParseError);
    CHECK_THROWS_AS(decode("garbage"), ParseError);
}

TEST_CASE("five serves give five feedback messages") {
    const auto rec = synthesize_service(test::clean_params(5));
    const auto msgs = collect(rec);
    CHECK(count_kind(msgs, MessageKind::Feedback) == 5);
    CHECK(count_kind(msgs, MessageKind::SessionStats) == 1);
    CHECK(msgs.back().kind == MessageKind::SessionStats);
    CHECK(msgs.back().payload["n"] == 5);
    CHECK(count_kind(msgs, MessageKind::Frame) == rec.frames.size());
    CHECK(count_kind(msgs, MessageKind::Guidance) > 0);
    for (std::size_t i = 0; i < msgs.size(); ++i) CHECK(msgs[i].seq == i + 1);
}

TEST_CASE("an empty recording still reports its session") {
    const auto msgs = collect(empty_recording());
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0].kind == MessageKind::SessionStats);
    CHECK(msgs[0].payload["n"] == 0);
}

TEST_CASE("feedback follows the contact transition of the same serve") {
    auto p = test::clean_params(4);
    p.serves[2].dropout = Dropout{"RKTTOP", 50, 2};
    const auto msgs = collect(synthesize_service(p));
    CHECK(count_kind(msgs, MessageKind::Feedback) == 3);
    Json last_contact;
    for (const auto& m : msgs) {
        if (m.kind == MessageKind::StateChange && m.payload["to"] == "contact") last_contact = m.payload["serve_id"];
        if (m.kind == MessageKind::Feedback) {
            CHECK(m.payload["serve_id"] == last_contact);
            CHECK(m.payload["report"].contains("pitch"));
        }
    }
}

TEST_CASE("guidance only while idle or ready") {
    EngineConfig cfg;
    cfg.stream.send_frames = false;
    const auto msgs = collect(synthesize_service(test::clean_params(1)), cfg);
    CHECK(count_kind(msgs, MessageKind::Frame) == 0);
    std::string state = "idle";
    bool track_seen = false;
    for (const auto& m : msgs) {
        if (m.kind == MessageKind::StateChange) state = m.payload["to"];
        if (m.kind == MessageKind::Guidance) {
            CHECK((state == "idle" || state == "ready"));
            if (state == "ready") {
                CHECK(m.payload["swing_track"].is_object());
                track_seen = true;
            }
        }
    }
    CHECK(track_seen);
}

TEST_CASE("live and batch agree") {
    const auto rec = synthesize_service(test::clean_params(3));
    const auto model = model::builtin_model(model::ExertionPattern::WristOnly);
    EngineConfig cfg;
    const auto live = run_session(rec, "s", model, cfg, {});
    const auto batch = analytics::analyze_recording(rec, "s", model, cfg);
    REQUIRE(live.rows.size() == batch.rows.size());
    for (std::size_t i = 0; i < live.rows.size(); ++i) {
        CHECK(live.rows[i].feedback == batch.rows[i].feedback);
        CHECK(live.rows[i].keys == batch.rows[i].keys);
    }
    CHECK_THROWS_AS(run_session(rec, "s", model, cfg, {}, -1.0), ParameterError);
}

TEST_CASE("model endpoint") {
    const std::string doc = model::to_json(model::builtin_model(model::ExertionPattern::WristOnly));
    StreamServer server("127.0.0.1", 0, doc, 16);
    auto [status, body] = http_get(server.port(), "/model");
    CHECK(status == 200);
    CHECK(body == doc);
    CHECK(http_get(server.port(), "/other").first == 404);
    CHECK(http_get(server.port(), "/model", beast::http::verb::post).first == 405);
    server.stop();
}

TEST_CASE("two clients receive identical sequences") {
    StreamServer server("127.0.0.1", 0, "{}", 100000);
    WsClient a(server.port());
    WsClient b(server.port());
    REQUIRE(server.wait_for_clients(2, std::chrono::seconds(5)));

    const auto rec = synthesize_service(test::clean_params(2));
    std::size_t published = 0;
    run_session(rec, "s", model::builtin_model(model::ExertionPattern::WristOnly), EngineConfig{},
                [&](const StreamMessage& m) {
                    server.publish(m);
                    ++published;
                });
    server.publish({MessageKind::Frame, 0, Json{{"last", true}}});
    const auto ma = a.read_until_last();
    const auto mb = b.read_until_last();
    CHECK(ma.size() == published + 1);
    REQUIRE(ma.size() == mb.size());
    for (std::size_t i = 0; i < ma.size(); ++i) {
        CHECK(encode(ma[i]) == encode(mb[i]));
        CHECK(ma[i].seq == i + 1);
    }
    server.stop();
}

TEST_CASE("slow clients get gap notices instead of blocking") {
    StreamServer server("127.0.0.1", 0, "{}", 4);
    WsClient client(server.port());
    REQUIRE(server.wait_for_clients(1, std::chrono::seconds(5)));
    const std::string pad(2000, 'x');
    const int total = 20000;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < total; ++i) {
        server.publish({MessageKind::Frame, 0, Json{{"i", i}, {"pad", pad}, {"last", i == total - 1}}});
    }
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
    const auto got = client.read_until_last();
    std::uint64_t dropped = 0;
    std::size_t delivered = 0;
    int prev = -1;
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].seq == i + 1);
        if (got[i].kind == MessageKind::Gap) {
            dropped += got[i].payload["dropped"].get<std::uint64_t>();
        } else {
            const int idx = got[i].payload["i"];
            CHECK(idx > prev);
            prev = idx;
            ++delivered;
        }
    }
    CHECK(dropped > 0);
    CHECK(dropped + delivered == static_cast<std::uint64_t>(total));
    server.stop();
}

TEST_CASE("live ingest over TCP") {
    const auto rec = synthesize_service(test::clean_params(1));
    std::ostringstream doc;
    write_recording(doc, rec, RecordingFormat::JsonLines);

    std::promise<unsigned short> port;
    std::vector<MarkerFrame> frames;
    std::vector<std::string> labels;
    std::thread server([&] {
        receive_frames("127.0.0.1", 0, [&](const std::vector<std::string>& l, const MarkerFrame& f) {
            labels = l;
            frames.push_back(f);
        }, [&](unsigned short p) { port.set_value(p); });
    });
    {
        net::io_context ioc;
        tcp::socket sock(ioc);
        sock.connect({net::ip::make_address("127.0.0.1"), port.get_future().get()});
        net::write(sock, net::buffer(doc.str()));
    }
    server.join();
    CHECK(labels == rec.labels);
    CHECK(frames == rec.frames);
}
