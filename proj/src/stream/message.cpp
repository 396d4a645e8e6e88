#include "bms/stream/message.hpp"

#include "bms/errors.hpp"

namespace bms::stream {

std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Frame: return "frame";
        case MessageKind::StateChange: return "state_change";
        case MessageKind::Guidance: return "guidance";
        case MessageKind::Feedback: return "feedback";
        case MessageKind::SessionStats: return "session_stats";
        case MessageKind::Gap: return "gap";
    }
    return "frame";
}

MessageKind parse_kind(std::string_view s) {
    for (auto k : {MessageKind::Frame, MessageKind::StateChange, MessageKind::Guidance,
                   MessageKind::Feedback, MessageKind::SessionStats, MessageKind::Gap}) {
        if (to_string(k) == s) return k;
    }
    throw ParseError(1, "unknown message kind '" + std::string(s) + "'");
}

std::string encode(const StreamMessage& m) {
    Json j;
    j["v"] = kSchemaVersion;
    j["kind"] = to_string(m.kind);
    j["seq"] = m.seq;
    j["payload"] = m.payload;
    return j.dump() + "\n";
}

StreamMessage decode(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("invalid message: ") + e.what());
    }
    if (!j.is_object() || !j.contains("v") || !j.contains("kind") || !j.contains("seq") ||
        !j.contains("payload")) {
        throw ParseError(1, "message needs v, kind, seq and payload");
    }
    if (j["v"] != kSchemaVersion) throw ParseError(1, "unsupported schema version");
    StreamMessage m;
    m.kind = parse_kind(j["kind"].get<std::string>());
    m.seq = j["seq"].get<std::uint64_t>();
    m.payload = j["payload"];
    return m;
}

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json to_json(const feedback::JudgedValue& j) {
    return Json{{"value", j.value},
                {"target_mean", j.target_mean},
                {"target_sd", j.target_sd},
                {"status", feedback::to_string(j.status)},
                {"direction", feedback::to_string(j.direction)}};
}

Json to_json(const feedback::FeedbackReport& r) {
    Json trace = Json::array();
    for (const auto& p : r.height_trace) {
        trace.push_back(Json{{"t", p.t}, {"delta_m", p.delta_m}, {"within", p.within}});
    }
    return Json{{"pitch", to_json(r.pitch)},
                {"speed", to_json(r.speed)},
                {"height", to_json(r.height)},
                {"height_threshold_m", r.height_threshold_m},
                {"height_trace", std::move(trace)},
                {"wrist", to_json(r.wrist)},
                {"wrist_upper_bound_deg", r.wrist_upper_bound_deg},
                {"elbow", to_json(r.elbow)},
                {"shoulder", to_json(r.shoulder)}};
}

Json to_json(const kinetics::ServiceSummary& s) {
    return Json{{"pitch_deg", s.pitch_at_contact_deg},
                {"speed_mps", s.speed_at_contact_mps},
                {"height_diff_m", s.max_abs_height_delta_m},
                {"wrist_change_deg", s.wrist_change_deg},
                {"elbow_change_deg", s.elbow_change_deg},
                {"shoulder_change_deg", s.shoulder_change_deg},
                {"backswing_end_racket_shuttle_deg", s.backswing_end_racket_shuttle_angle_deg}};
}

Json to_json(const analytics::SessionStats& s) {
    Json vars = Json::object();
    for (auto v : analytics::kVariables) {
        if (s.n == 0) {
            vars[std::string(analytics::to_string(v))] = nullptr;
            continue;
        }
        const auto& d = s[v];
        vars[std::string(analytics::to_string(v))] =
            Json{{"mean", d.mean}, {"sd", d.sd}, {"median", d.median}, {"q1", d.q1}, {"q3", d.q3}};
    }
    return Json{{"n", s.n}, {"variables", std::move(vars)}};
}

Json to_json(const feedback::SwingTrackSpec& s) {
    return Json{{"center", to_json(s.center)},
                {"plane_height_m", s.plane_height_m},
                {"radius_m", s.radius_m},
                {"target_angular_speed", s.target_angular_speed},
                {"angular_acceleration", s.angular_acceleration},
                {"sweep_back_rad", s.sweep_back_rad},
                {"sweep_forward_rad", s.sweep_forward_rad}};
}

Json serve_id(const std::string& session, std::size_t serve_index) {
    return Json{{"session", session}, {"serve", serve_index}};
}

}  // namespace bms::stream
