#pragma once

#include "bms/analytics/report.hpp"
#include "bms/common/config.hpp"
#include "bms/fsm/service_fsm.hpp"
#include "bms/mocap/relabel.hpp"
#include "bms/model/expert_model.hpp"
#include "bms/stream/message.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bms::stream {

using MessageSink = std::function<void(const StreamMessage&)>;

struct SessionResult {
    std::string session_id;
    std::vector<analytics::TrialRow> rows;
    analytics::SessionStats stats;  // over every valid serve
    std::vector<fsm::Transition> transitions;
    std::uint64_t messages = 0;
};

/// Per-frame pipeline: relabel, state machine, judgment, message emission. Frame messages go out
/// for every frame; StateChange for every transition; Guidance only while Idle or Ready;
/// Feedback once a judged serve is released after its Contact transition; SessionStats from
/// finish(). One instance per trainee, driven from a single context.
class LiveSession {
public:
    LiveSession(std::string session_id, const std::vector<std::string>& labels, Handedness handedness,
                model::ExpertModel model, EngineConfig cfg, MessageSink sink);

    void push(const MarkerFrame& frame);
    SessionResult finish();

    fsm::ServiceState state() const { return fsm_.state(); }

private:
    void emit(MessageKind kind, Json payload);
    void emit_guidance(const SkeletonFrame& f);
    void release(fsm::ServiceRecord record);

    std::string id_;
    Relabeler relabel_;
    model::ExpertModel model_;
    EngineConfig cfg_;
    MessageSink sink_;
    fsm::ServiceStateMachine fsm_;
    std::uint64_t seq_ = 0;
    std::size_t frame_index_ = 0;
    std::optional<feedback::SwingTrackSpec> track_;
    SessionResult result_;
    bool finished_ = false;
};

/// Runs a whole recording through a LiveSession. speed_factor > 0 paces delivery in real time
/// scaled by the factor; 0 delivers as fast as possible.
SessionResult run_session(const Recording& rec, const std::string& session_id,
                          const model::ExpertModel& model, const EngineConfig& cfg,
                          const MessageSink& sink, double speed_factor = 0.0);

}  // namespace bms::stream
