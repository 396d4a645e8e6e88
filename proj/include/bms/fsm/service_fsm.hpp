#pragma once

#include "bms/feedback/feedback.hpp"
#include "bms/kinetics/kinetics.hpp"
#include "bms/mocap/marker_frame.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

namespace bms::fsm {

enum class ServiceState { Idle, Ready, BackwardSwing, ForwardSwing, Contact };

std::string_view to_string(ServiceState s);

/// Why a transition fired.
enum class Cause {
    Progress,      // normal forward step of a serve
    Aborted,       // racket moved in a non-backward direction while ready
    LostTracking,  // incomplete frame while ready or swinging
    Dwell,         // contact dwell elapsed
};

std::string_view to_string(Cause c);

/// True for the legal edges: the serve cycle, Ready->Idle, and any state -> Idle.
bool is_legal(ServiceState from, ServiceState to);

struct FsmConfig {
    double ready_tolerance_m = 0.05;
    double v_min_mps = 0.3;
    int sustain_frames = 3;
    double dwell_s = 2.0;
    int trend_frames = 3;
    /// Frames kept after contact so the contact speed window is complete.
    int post_contact_frames = 3;
    int preroll_frames = 8;
    feedback::GuidanceConfig guidance;
};

struct Transition {
    ServiceState from = ServiceState::Idle;
    ServiceState to = ServiceState::Idle;
    Cause cause = Cause::Progress;
    std::size_t frame_index = 0;  // index in the stream of stepped frames
    double timestamp = 0.0;
    std::size_t serve_index = 0;  // 1-based serve attempt, 0 outside a serve

    bool operator==(const Transition&) const = default;
};

/// One segmented serve. Keyframes index into `frames`; `first_frame` is the stream index of
/// frames[0]. Lost-tracking serves carry no summary.
struct ServiceRecord {
    std::size_t serve_index = 0;
    std::size_t first_frame = 0;
    std::vector<SkeletonFrame> frames;
    kinetics::Keyframes keys;
    std::vector<kinetics::KineticSample> samples;
    std::optional<kinetics::ServiceSummary> summary;
    bool lost_tracking = false;

    std::size_t contact_frame() const { return first_frame + keys.k_contact; }
};

struct StepResult {
    std::vector<Transition> transitions;
    std::optional<ServiceRecord> record;
};

/// Five-state serve machine. Feed frames in timestamp order from one context.
///
/// Idle -> Ready when the racket head (racket_middle) and the shuttle hand are each within the
/// ready tolerance of their targets while the racket is slower than v_min. Ready -> BackwardSwing
/// after sustain_frames frames whose racket velocity along body-backward exceeds v_min; any other
/// sustained motion above v_min returns to Idle. The racket-to-shuttle-hand distance drives the
/// rest: trend_frames strictly decreasing samples start the forward swing (keyframe at the
/// distance maximum), trend_frames strictly increasing samples mark contact (keyframe at the
/// minimum). The completed ServiceRecord is released post_contact_frames after the contact
/// keyframe; Contact returns to Idle after dwell_s.
class ServiceStateMachine {
public:
    explicit ServiceStateMachine(FsmConfig cfg = {});

    StepResult step(const SkeletonFrame& frame);

    /// Flushes a serve whose post-contact frames were cut off by the end of the stream.
    std::optional<ServiceRecord> finish();

    ServiceState state() const { return state_; }
    const FsmConfig& config() const { return cfg_; }
    std::size_t serves_started() const { return serves_; }

private:
    void go(ServiceState to, Cause cause, const SkeletonFrame& f, StepResult& out);
    void reset_serve();
    std::optional<Vec3> racket_velocity(const SkeletonFrame& f) const;
    ServiceRecord finalize(bool truncated);
    ServiceRecord lost_record();
    bool trend(bool increasing) const;

    FsmConfig cfg_;
    ServiceState state_ = ServiceState::Idle;
    std::size_t count_ = 0;
    std::size_t serves_ = 0;
    std::optional<SkeletonFrame> prev_;

    std::deque<SkeletonFrame> preroll_;
    std::vector<SkeletonFrame> frames_;
    std::vector<double> distance_;
    std::size_t first_frame_ = 0;
    Vec3 backward_ = -Vec3::UnitZ();
    int back_run_ = 0;
    int other_run_ = 0;
    kinetics::Keyframes keys_;
    double contact_time_ = 0.0;
    bool pending_ = false;
};

/// Offline segmentation: the same machine applied to every frame, lost-tracking serves included.
std::vector<ServiceRecord> segment_recording(const Recording& rec, const FsmConfig& cfg = {});
std::vector<ServiceRecord> segment_frames(const std::vector<SkeletonFrame>& frames,
                                          const FsmConfig& cfg = {});

}  // namespace bms::fsm
