#pragma once

#include "bms/analytics/analytics.hpp"
#include "bms/feedback/feedback.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/kinetics/kinetics.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace bms::stream {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class MessageKind { Frame, StateChange, Guidance, Feedback, SessionStats, Gap };

std::string_view to_string(MessageKind k);
MessageKind parse_kind(std::string_view s);

/// Wire form: `{"v":1,"kind":"...","seq":N,"payload":{...}}` on one line.
struct StreamMessage {
    MessageKind kind = MessageKind::Frame;
    std::uint64_t seq = 0;
    Json payload = Json::object();
};

/// One NDJSON line including the trailing newline.
std::string encode(const StreamMessage& m);
/// Throws ParseError for malformed lines or another schema version.
StreamMessage decode(std::string_view line);

Json to_json(const Vec3& v);
Json to_json(const feedback::JudgedValue& j);
Json to_json(const feedback::FeedbackReport& r);
Json to_json(const kinetics::ServiceSummary& s);
Json to_json(const analytics::SessionStats& s);
Json to_json(const feedback::SwingTrackSpec& s);

/// Serve ids pair the session id with the 1-based serve index.
Json serve_id(const std::string& session, std::size_t serve_index);

}  // namespace bms::stream
