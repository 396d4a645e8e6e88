#include "bms/fsm/service_fsm.hpp"

#include "bms/errors.hpp"
#include "bms/mocap/relabel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bms::fsm {

std::string_view to_string(ServiceState s) {
    switch (s) {
        case ServiceState::Idle: return "idle";
        case ServiceState::Ready: return "ready";
        case ServiceState::BackwardSwing: return "backward_swing";
        case ServiceState::ForwardSwing: return "forward_swing";
        case ServiceState::Contact: return "contact";
    }
    return "idle";
}

std::string_view to_string(Cause c) {
    switch (c) {
        case Cause::Progress: return "progress";
        case Cause::Aborted: return "aborted";
        case Cause::LostTracking: return "lost_tracking";
        case Cause::Dwell: return "dwell";
    }
    return "progress";
}

bool is_legal(ServiceState from, ServiceState to) {
    using S = ServiceState;
    if (to == S::Idle) return from != S::Idle;
    return (from == S::Idle && to == S::Ready) || (from == S::Ready && to == S::BackwardSwing) ||
           (from == S::BackwardSwing && to == S::ForwardSwing) ||
           (from == S::ForwardSwing && to == S::Contact);
}

ServiceStateMachine::ServiceStateMachine(FsmConfig cfg) : cfg_(cfg) {
    if (cfg_.sustain_frames < 1 || cfg_.trend_frames < 2 || cfg_.post_contact_frames < 0 ||
        cfg_.preroll_frames < 0 || !(cfg_.ready_tolerance_m > 0.0) || !(cfg_.v_min_mps >= 0.0) ||
        !(cfg_.dwell_s >= 0.0)) {
        throw ParameterError("invalid state machine configuration");
    }
}

void ServiceStateMachine::go(ServiceState to, Cause cause, const SkeletonFrame& f, StepResult& out) {
    const bool in_serve = state_ != ServiceState::Idle && state_ != ServiceState::Ready;
    const bool to_serve = to == ServiceState::BackwardSwing;
    out.transitions.push_back({state_, to, cause, count_ - 1, f.timestamp,
                               (in_serve || to_serve) ? serves_ : 0});
    state_ = to;
}

void ServiceStateMachine::reset_serve() {
    frames_.clear();
    distance_.clear();
    back_run_ = 0;
    other_run_ = 0;
    keys_ = {};
    pending_ = false;
}

std::optional<Vec3> ServiceStateMachine::racket_velocity(const SkeletonFrame& f) const {
    if (!prev_ || !prev_->complete || !f.complete) return std::nullopt;
    const double dt = f.timestamp - prev_->timestamp;
    if (!(dt > 0.0)) return std::nullopt;
    return Vec3((f.racket_middle - prev_->racket_middle) / dt);
}

bool ServiceStateMachine::trend(bool increasing) const {
    const std::size_t n = distance_.size();
    const auto need = static_cast<std::size_t>(cfg_.trend_frames);
    const std::size_t from = increasing ? keys_.k_fwd : keys_.k_back;
    if (n < need || n - need < from) return false;
    for (std::size_t i = n - need + 1; i < n; ++i) {
        if (increasing ? !(distance_[i] > distance_[i - 1]) : !(distance_[i] < distance_[i - 1])) {
            return false;
        }
    }
    return true;
}

ServiceRecord ServiceStateMachine::lost_record() {
    ServiceRecord r;
    r.serve_index = serves_;
    r.first_frame = first_frame_;
    r.frames = frames_;
    r.keys = keys_;
    r.lost_tracking = true;
    return r;
}

ServiceRecord ServiceStateMachine::finalize(bool truncated) {
    ServiceRecord r;
    r.serve_index = serves_;
    r.first_frame = first_frame_;
    r.frames = std::move(frames_);
    r.keys = keys_;
    frames_.clear();
    distance_.clear();
    pending_ = false;
    const std::size_t end = std::min(r.frames.size(), keys_.k_contact + 1 +
                                                          static_cast<std::size_t>(cfg_.post_contact_frames));
    bool complete = !truncated;
    for (std::size_t i = keys_.k_back; i < end; ++i) complete = complete && r.frames[i].complete;
    r.samples = kinetics::kinetic_series(r.frames);
    if (!complete) {
        r.lost_tracking = true;
        return r;
    }
    try {
        r.summary = kinetics::summarize_swing(r.samples, r.keys);
        r.summary->speed_at_contact_mps = kinetics::racket_speed(r.frames, r.keys.k_contact);
    } catch (const Error&) {
        r.summary.reset();
        r.lost_tracking = true;
    }
    return r;
}

StepResult ServiceStateMachine::step(const SkeletonFrame& f) {
    StepResult out;
    ++count_;
    const auto velocity = racket_velocity(f);
    const double distance = f.complete ? (f.racket_middle - f.shuttle_hand).norm()
                                       : std::numeric_limits<double>::quiet_NaN();

    switch (state_) {
        case ServiceState::Idle: {
            preroll_.push_back(f);
            while (preroll_.size() > static_cast<std::size_t>(cfg_.preroll_frames) + 1) preroll_.pop_front();
            if (!f.complete || !velocity || !(velocity->norm() < cfg_.v_min_mps)) break;
            feedback::ReadyTargets targets;
            try {
                targets = feedback::ready_targets(f, cfg_.guidance);
            } catch (const GeometryError&) {
                break;
            }
            const bool near =
                (f.racket_middle - targets.racket_target).norm() <= cfg_.ready_tolerance_m &&
                (f.shuttle_hand - targets.shuttle_target).norm() <= cfg_.ready_tolerance_m;
            if (!near) break;
            reset_serve();
            backward_ = -targets.sagittal_axis;
            frames_.assign(preroll_.begin(), preroll_.end());
            first_frame_ = count_ - frames_.size();
            for (const auto& p : frames_) {
                distance_.push_back(p.complete ? (p.racket_middle - p.shuttle_hand).norm()
                                               : std::numeric_limits<double>::quiet_NaN());
            }
            preroll_.clear();
            go(ServiceState::Ready, Cause::Progress, f, out);
            break;
        }
        case ServiceState::Ready: {
            frames_.push_back(f);
            distance_.push_back(distance);
            if (!f.complete) {
                reset_serve();
                go(ServiceState::Idle, Cause::LostTracking, f, out);
                break;
            }
            // Bound the buffer while the trainee holds the ready pose.
            const std::size_t keep = static_cast<std::size_t>(cfg_.preroll_frames) + 64;
            if (frames_.size() > 2 * keep) {
                const auto drop = static_cast<std::ptrdiff_t>(frames_.size() - keep);
                frames_.erase(frames_.begin(), frames_.begin() + drop);
                distance_.erase(distance_.begin(), distance_.begin() + drop);
                first_frame_ += static_cast<std::size_t>(drop);
            }
            if (velocity && velocity->norm() > cfg_.v_min_mps) {
                if (velocity->dot(backward_) > cfg_.v_min_mps) {
                    ++back_run_;
                    other_run_ = 0;
                } else {
                    ++other_run_;
                    back_run_ = 0;
                }
            } else {
                back_run_ = 0;
                other_run_ = 0;
            }
            if (other_run_ >= cfg_.sustain_frames) {
                reset_serve();
                go(ServiceState::Idle, Cause::Aborted, f, out);
            } else if (back_run_ >= cfg_.sustain_frames) {
                // Backswing start: walk back to the last frame before backward motion began.
                std::size_t k = frames_.size() - 1;
                while (k > 0 && frames_[k].complete && frames_[k - 1].complete &&
                       (frames_[k].racket_middle - frames_[k - 1].racket_middle).dot(backward_) > 0.0) {
                    --k;
                }
                keys_.k_back = k;
                ++serves_;
                go(ServiceState::BackwardSwing, Cause::Progress, f, out);
            }
            break;
        }
        case ServiceState::BackwardSwing:
        case ServiceState::ForwardSwing: {
            frames_.push_back(f);
            distance_.push_back(distance);
            if (!f.complete) {
                out.record = lost_record();
                reset_serve();
                go(ServiceState::Idle, Cause::LostTracking, f, out);
                break;
            }
            if (state_ == ServiceState::BackwardSwing) {
                if (trend(false)) {
                    auto first = distance_.begin() + static_cast<std::ptrdiff_t>(keys_.k_back);
                    keys_.k_fwd = static_cast<std::size_t>(std::max_element(first, distance_.end()) -
                                                           distance_.begin());
                    go(ServiceState::ForwardSwing, Cause::Progress, f, out);
                }
            } else if (trend(true)) {
                auto first = distance_.begin() + static_cast<std::ptrdiff_t>(keys_.k_fwd);
                keys_.k_contact = static_cast<std::size_t>(std::min_element(first, distance_.end()) -
                                                           distance_.begin());
                if (!(keys_.k_back < keys_.k_fwd && keys_.k_fwd < keys_.k_contact)) {
                    // Degenerate distance profile; not a serve.
                    reset_serve();
                    go(ServiceState::Idle, Cause::Aborted, f, out);
                    break;
                }
                contact_time_ = f.timestamp;
                pending_ = true;
                go(ServiceState::Contact, Cause::Progress, f, out);
                if (frames_.size() > keys_.k_contact + static_cast<std::size_t>(cfg_.post_contact_frames)) {
                    out.record = finalize(false);
                }
            }
            break;
        }
        case ServiceState::Contact: {
            if (pending_) {
                frames_.push_back(f);
                distance_.push_back(distance);
                if (frames_.size() > keys_.k_contact + static_cast<std::size_t>(cfg_.post_contact_frames)) {
                    out.record = finalize(false);
                }
            }
            if (f.timestamp - contact_time_ >= cfg_.dwell_s) {
                if (pending_) out.record = finalize(true);
                reset_serve();
                go(ServiceState::Idle, Cause::Dwell, f, out);
                preroll_.clear();
                preroll_.push_back(f);
            }
            break;
        }
    }
    prev_ = f;
    return out;
}

std::optional<ServiceRecord> ServiceStateMachine::finish() {
    if (state_ == ServiceState::Contact && pending_) return finalize(true);
    return std::nullopt;
}

std::vector<ServiceRecord> segment_frames(const std::vector<SkeletonFrame>& frames, const FsmConfig& cfg) {
    std::vector<ServiceRecord> out;
    ServiceStateMachine m(cfg);
    for (const auto& f : frames) {
        auto r = m.step(f);
        if (r.record) out.push_back(std::move(*r.record));
    }
    if (auto r = m.finish()) out.push_back(std::move(*r));
    return out;
}

std::vector<ServiceRecord> segment_recording(const Recording& rec, const FsmConfig& cfg) {
    return segment_frames(relabel(rec), cfg);
}

}  // namespace bms::fsm
