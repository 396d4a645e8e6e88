#include "bms/stream/session.hpp"

#include "bms/errors.hpp"
#include "bms/mocap/replay.hpp"

#include <utility>

namespace bms::stream {

LiveSession::LiveSession(std::string session_id, const std::vector<std::string>& labels,
                         Handedness handedness, model::ExpertModel model, EngineConfig cfg,
                         MessageSink sink)
    : id_(std::move(session_id)),
      relabel_(labels, handedness),
      model_(std::move(model)),
      cfg_(std::move(cfg)),
      sink_(std::move(sink)),
      fsm_(cfg_.fsm) {
    result_.session_id = id_;
}

void LiveSession::emit(MessageKind kind, Json payload) {
    StreamMessage m{kind, ++seq_, std::move(payload)};
    ++result_.messages;
    if (sink_) sink_(m);
}

void LiveSession::emit_guidance(const SkeletonFrame& f) {
    if (!f.complete) return;
    feedback::ReadyTargets targets;
    try {
        targets = feedback::ready_targets(f, cfg_.fsm.guidance);
    } catch (const GeometryError&) {
        return;
    }
    const auto& g = cfg_.fsm.guidance;
    const Vec3& axis = targets.sagittal_axis;
    Json p;
    p["session"] = id_;
    p["state"] = fsm::to_string(fsm_.state());
    p["frame"] = frame_index_;
    p["t"] = f.timestamp;
    p["sagittal_axis"] = to_json(axis);
    p["targets"] = Json{{"racket", to_json(targets.racket_target)}, {"shuttle", to_json(targets.shuttle_target)}};
    p["actual"] = Json{{"racket", to_json(f.racket_middle)}, {"shuttle", to_json(f.shuttle_hand)}};
    p["sagittal_offset_m"] = Json{{"racket", (f.racket_middle - targets.racket_target).dot(axis)},
                                  {"shuttle", (f.shuttle_hand - targets.shuttle_target).dot(axis)}};
    p["halo"] = Json{
        {"racket", feedback::to_string(feedback::halo_state(f.racket_middle, targets.racket_target, axis,
                                                            g.halo_green_m, g.halo_yellow_m))},
        {"shuttle", feedback::to_string(feedback::halo_state(f.shuttle_hand, targets.shuttle_target, axis,
                                                             g.halo_green_m, g.halo_yellow_m))}};
    p["swing_track"] = track_ ? to_json(*track_) : Json(nullptr);
    emit(MessageKind::Guidance, std::move(p));
}

void LiveSession::release(fsm::ServiceRecord record) {
    auto row = analytics::make_row(record, model_, cfg_.jitter);
    if (row.feedback) {
        Json p;
        p["serve_id"] = serve_id(id_, row.serve_index);
        p["label"] = analytics::to_string(row.label);
        p["keyframes"] = Json{{"k_back", row.keys.k_back}, {"k_fwd", row.keys.k_fwd}, {"k_contact", row.keys.k_contact}};
        p["summary"] = to_json(*row.summary);
        p["report"] = to_json(*row.feedback);
        emit(MessageKind::Feedback, std::move(p));
    }
    result_.rows.push_back(std::move(row));
}

void LiveSession::push(const MarkerFrame& frame) {
    if (finished_) throw ParameterError("session already finished");
    const SkeletonFrame f = relabel_(frame);
    if (cfg_.stream.send_frames) {
        Json p;
        p["frame"] = frame_index_;
        p["t"] = f.timestamp;
        p["complete"] = f.complete;
        p["racket_top"] = to_json(f.racket_top);
        p["racket_middle"] = to_json(f.racket_middle);
        p["racket_bottom"] = to_json(f.racket_bottom);
        p["shuttle_hand"] = to_json(f.shuttle_hand);
        p["wrist"] = to_json(f.wrist);
        p["elbow"] = to_json(f.elbow);
        p["shoulder"] = to_json(f.shoulder);
        emit(MessageKind::Frame, std::move(p));
    }

    auto step = fsm_.step(f);
    for (const auto& t : step.transitions) {
        result_.transitions.push_back(t);
        Json p;
        p["serve_id"] = t.serve_index ? serve_id(id_, t.serve_index) : Json(nullptr);
        p["from"] = fsm::to_string(t.from);
        p["to"] = fsm::to_string(t.to);
        p["cause"] = fsm::to_string(t.cause);
        p["frame"] = t.frame_index;
        p["t"] = t.timestamp;
        emit(MessageKind::StateChange, std::move(p));
        if (t.to == fsm::ServiceState::Ready) {
            try {
                track_ = feedback::swing_track(f, model_, cfg_.fsm.guidance);
            } catch (const Error&) {
                track_.reset();
            }
        } else {
            track_.reset();
        }
    }
    if (step.record) release(std::move(*step.record));

    const auto s = fsm_.state();
    if (s == fsm::ServiceState::Idle || s == fsm::ServiceState::Ready) emit_guidance(f);
    ++frame_index_;
}

SessionResult LiveSession::finish() {
    if (!finished_) {
        if (auto r = fsm_.finish()) release(std::move(*r));
        const auto trials = [&] {
            std::vector<analytics::Trial> out;
            for (const auto& r : result_.rows) out.push_back({r.serve_index, r.label, r.summary});
            return out;
        }();
        const std::size_t valid = analytics::count_valid(trials);
        result_.stats = analytics::session_summary(trials, valid);
        Json p = to_json(result_.stats);
        p["session"] = id_;
        p["serves"] = result_.rows.size();
        std::size_t jitter = 0;
        std::size_t lost = 0;
        for (const auto& r : result_.rows) {
            jitter += r.label == analytics::TrialLabel::Jitter;
            lost += r.label == analytics::TrialLabel::LostTracking;
        }
        p["valid"] = valid;
        p["jitter"] = jitter;
        p["lost_tracking"] = lost;
        emit(MessageKind::SessionStats, std::move(p));
        finished_ = true;
    }
    return result_;
}

SessionResult run_session(const Recording& rec, const std::string& session_id,
                          const model::ExpertModel& model, const EngineConfig& cfg,
                          const MessageSink& sink, double speed_factor) {
    if (speed_factor < 0.0) throw ParameterError("speed factor must be non-negative");
    LiveSession session(session_id, rec.labels, rec.handedness, model, cfg, sink);
    if (speed_factor > 0.0) {
        replay(rec, speed_factor, [&](const MarkerFrame& f) {
            session.push(f);
            return true;
        });
    } else {
        for (const auto& f : rec.frames) session.push(f);
    }
    return session.finish();
}

}  // namespace bms::stream
